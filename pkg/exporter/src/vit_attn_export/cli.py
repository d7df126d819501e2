"""Command-line wrapper: dump one layer's attention for one image."""

from __future__ import annotations

import argparse
import sys

from .export import ExportError, ExportRequest, export_attention


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vit-attn-export",
        description="dump a vision encoder's multi-head attention maps to NPY",
    )
    parser.add_argument("model", help="pretrained encoder identifier")
    parser.add_argument("image", help="input image path")
    parser.add_argument("--layer", default="penultimate",
                        help="encoder layer index, or 'penultimate' (default)")
    parser.add_argument("--keep-cls", action="store_true",
                        help="keep the class-token row/column instead of stripping it")
    parser.add_argument("--pre-softmax", action="store_true",
                        help="export scaled q/k logits instead of probabilities")
    parser.add_argument("--out", required=True, help="output NPY path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    req = ExportRequest(
        model=args.model,
        image=args.image,
        out=args.out,
        layer=args.layer,
        include_cls=args.keep_cls,
        pre_softmax=args.pre_softmax,
    )
    try:
        info = export_attention(req)
    except ExportError as exc:
        print(f"vit-attn-export: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"vit-attn-export: {exc}", file=sys.stderr)
        return 3
    print(
        f"layer={info['layer']} heads={info['heads']} tokens={info['tokens']} "
        f"-> {info['path']}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
