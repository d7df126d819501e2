#!/usr/bin/env python3
"""Generate synthetic attention tensors for experimenting with the toolkit.

Kinds:
  uniform    every query spreads attention evenly over all keys
  collapsed  one key column soaks up most of every query's mass
  random     row-normalized uniform noise (seeded)

Example:
  python scripts/make_synthetic_attention.py --kind collapsed \
      --heads 16 --tokens 576 --out /tmp/collapsed.npy
"""

import argparse

import numpy as np

from attnprune import write_tensor


def build(kind, heads, tokens, seed, focus_index, focus_mass):
    if kind == "uniform":
        return np.full((heads, tokens, tokens), 1.0 / tokens, dtype=np.float32)
    if kind == "collapsed":
        if tokens < 2:
            raise SystemExit("collapsed maps need at least 2 tokens")
        rest = (1.0 - focus_mass) / (tokens - 1)
        data = np.full((heads, tokens, tokens), rest, dtype=np.float32)
        data[:, :, focus_index] = focus_mass
        return data
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0.0, 1.0, size=(heads, tokens, tokens))
    return (raw / raw.sum(axis=2, keepdims=True)).astype(np.float32)


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--kind", choices=["uniform", "collapsed", "random"], default="random")
    parser.add_argument("--heads", type=int, default=16)
    parser.add_argument("--tokens", type=int, default=576)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--focus-index", type=int, default=0,
                        help="key column that receives the mass (collapsed kind)")
    parser.add_argument("--focus-mass", type=float, default=0.9)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()
    data = build(args.kind, args.heads, args.tokens, args.seed,
                 args.focus_index, args.focus_mass)
    write_tensor(data, args.out)
    print(f"wrote {args.kind} tensor shape {data.shape} to {args.out}")


if __name__ == "__main__":
    main()
