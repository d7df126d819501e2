#!/usr/bin/env python3
"""Show how attention concentration evolves as maps collapse.

Builds a series of synthetic layers that interpolate from a uniform
attention map toward a single-column collapse, then prints the
concentration table. Deep encoder layers behave like the tail of this
series: most of the mass sits on a small token subset. Pass real
per-layer dumps via --attn to analyze those instead.
"""

import argparse

import numpy as np

from attnprune import layer_sweep, write_tensor
from attnprune.analysis import format_table


def synthesize(tmp_dir, steps, tokens, heads):
    import os

    uniform = np.full((heads, tokens, tokens), 1.0 / tokens, dtype=np.float32)
    collapsed = np.full((heads, tokens, tokens), 0.1 / (tokens - 1), dtype=np.float32)
    collapsed[:, :, 0] = 0.9
    paths = []
    for i in range(steps):
        blend = i / (steps - 1) if steps > 1 else 1.0
        path = os.path.join(tmp_dir, f"layer_{i:02d}.npy")
        write_tensor((1 - blend) * uniform + blend * collapsed, path)
        paths.append(path)
    return paths


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--attn", nargs="*", default=None,
                        help="per-layer attention dumps (default: synthesize a series)")
    parser.add_argument("--steps", type=int, default=6)
    parser.add_argument("--tokens", type=int, default=144)
    parser.add_argument("--heads", type=int, default=4)
    parser.add_argument("--mass-threshold", type=float, default=0.8)
    args = parser.parse_args()

    if args.attn:
        paths = args.attn
        entries = layer_sweep(paths, args.mass_threshold)
    else:
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            paths = synthesize(tmp, args.steps, args.tokens, args.heads)
            entries = layer_sweep(paths, args.mass_threshold)

    rows = []
    for e in entries:
        if e.report is None:
            rows.append((e.path, "error", e.error))
        else:
            rows.append((e.path, f"{e.report.token_fraction:.4f}", f"{e.report.gini:.4f}"))
    print(f"fraction of tokens holding {args.mass_threshold:.0%} of significance mass:")
    print(format_table(("layer", "token_fraction", "gini"), rows))


if __name__ == "__main__":
    main()
