"""Command-line front end.

Subcommands: ``prune`` (full pipeline to a selection JSON), ``sweep``
(pipeline at the nine canonical retention ratios plus a summary
table), ``analyze`` (concentration/budget diagnostics), ``viz``
(score heatmap and selection mask as PGM), ``estimate`` (analytical
speedup bounds).

Exit codes: 0 success, 1 usage, 2 data/format, 3 I/O. Every failure
prints exactly one diagnostic line on stderr.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import analysis, cost_model, pruning, significance, tensor_io, viz
from .errors import AttnpruneError
from .pruning import PruneConfig, SignificanceMode, Strategy

# canonical retention ratios for sweeps; strings keep filenames stable
SWEEP_RATIOS = ("0.002", "0.027", "0.0625", "0.11", "0.17", "0.25", "0.5", "0.75", "1.0")


def run_pipeline(maps: tensor_io.AttentionMaps, config: PruneConfig):
    """Significance -> selection -> (optional) reorder, as one call.

    Returns ``(scores, selection)``. Reordering is folded into the
    selectors via ``config.reorder``. POOL4 mode ignores the scores for
    selection but still reports them for diagnostics.
    """
    if config.significance_mode is SignificanceMode.ANTI_VARIANCE:
        scores = significance.compute_significance_ablated(maps)
    else:
        scores = significance.compute_significance(maps)
    if config.significance_mode is SignificanceMode.POOL4:
        sel = pruning.pool_select(maps.tokens, config)
    elif config.strategy is Strategy.ROW:
        sel = pruning.row_select(scores, config)
    else:
        sel = pruning.rank_select(scores, config)
    return scores, sel


def _ratio(text: str) -> float:
    raw = text.strip()
    try:
        value = float(raw[:-1]) / 100.0 if raw.endswith("%") else float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse ratio {text!r}")
    if not (0.0 < value <= 1.0):
        raise argparse.ArgumentTypeError(f"retention ratio must be in (0, 1], got {text!r}")
    return value


def _mass_threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse mass threshold {text!r}")
    if not (0.0 < value <= 1.0):
        raise argparse.ArgumentTypeError(f"mass threshold must be in (0, 1], got {text!r}")
    return value


class _Parser(argparse.ArgumentParser):
    # one diagnostic line, exit code 1 for usage problems
    def error(self, message):
        self.exit(1, f"{self.prog}: {message}\n")


def _add_prune_flags(p: argparse.ArgumentParser, with_ratio_required: bool = True):
    p.add_argument("--attn", required=True, help="attention tensor file (H, N, N)")
    if with_ratio_required:
        p.add_argument("--ratio", type=_ratio, required=True,
                       help="retention ratio in (0, 1]; '25%%' also accepted")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="rank")
    p.add_argument("--mode", choices=[m.value for m in SignificanceMode],
                   default="variance", help="significance mode")
    p.add_argument("--no-reorder", action="store_true",
                   help="keep selection order instead of ascending indices")
    p.add_argument("--cls-token", choices=["none", "first"], default="none",
                   help="strip a leading class token row/column on load")


def _config(args, ratio: float | None = None) -> PruneConfig:
    return PruneConfig(
        ratio=args.ratio if ratio is None else ratio,
        strategy=Strategy(args.strategy),
        reorder=not args.no_reorder,
        significance_mode=SignificanceMode(args.mode),
    )


def cmd_prune(args) -> int:
    maps = tensor_io.load_attention(args.attn, cls_token=args.cls_token)
    scores, sel = run_pipeline(maps, _config(args))
    payload = pruning.dumps_stable(pruning.selection_document(sel, _config(args), scores))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def cmd_sweep(args) -> int:
    maps = tensor_io.load_attention(args.attn, cls_token=args.cls_token)
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for text in SWEEP_RATIOS:
        config = _config(args, ratio=float(text))
        scores, sel = run_pipeline(maps, config)
        out_path = os.path.join(args.out_dir, f"selection_r{text}.json")
        with open(out_path, "w") as fh:
            fh.write(pruning.dumps_stable(pruning.selection_document(sel, config, scores)))
        est = cost_model.estimate(maps.tokens, args.textual_tokens, float(text))
        rows.append(
            (text, len(sel.kept), f"{est.prefill_speedup:.2f}x", f"{est.decode_speedup:.2f}x")
        )
    print(analysis.format_table(("ratio", "kept", "prefill_speedup", "decode_speedup"), rows))
    print(f"note: {cost_model.MODEL_NOTE}")
    return 0


def cmd_analyze(args) -> int:
    entries = analysis.layer_sweep(args.attn, args.mass_threshold, cls_token=args.cls_token)
    rows = []
    layers_doc = []
    for e in entries:
        if e.report is not None:
            rows.append((e.path, f"{e.report.token_fraction:.4f}", f"{e.report.gini:.4f}"))
            layers_doc.append({"path": e.path, **e.report.to_document()})
        else:
            rows.append((e.path, "error", e.error))
            layers_doc.append({"path": e.path, "error": e.error})
    print(analysis.format_table(("file", "token_fraction", "gini"), rows))
    doc = {"mass_threshold": args.mass_threshold, "layers": layers_doc}
    if args.visual_tokens is not None or args.textual_tokens is not None:
        budget = analysis.token_budget(args.visual_tokens or 0, args.textual_tokens or 0)
        print(
            f"visual tokens: {budget.visual_tokens}  textual tokens: "
            f"{budget.textual_tokens}  visual fraction: {budget.visual_fraction:.4f}"
        )
        doc["token_budget"] = budget.to_document()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(pruning.dumps_stable(doc))
    return 0


def cmd_viz(args) -> int:
    maps = tensor_io.load_attention(args.attn, cls_token=args.cls_token)
    side = args.side if args.side is not None else math.isqrt(maps.tokens)
    if args.ratio is not None:
        config = _config(args)
        scores, sel = run_pipeline(maps, config)
    else:
        scores = significance.compute_significance(maps)
        sel = None
    heat_path = f"{args.out}_significance.pgm"
    viz.write_pgm(viz.heatmap(scores, side), heat_path, scale=args.scale)
    print(heat_path)
    if sel is not None:
        mask_path = f"{args.out}_mask.pgm"
        viz.write_pgm(viz.selection_mask(sel, side), mask_path, scale=args.scale)
        print(mask_path)
    return 0


def cmd_estimate(args) -> int:
    est = cost_model.estimate(args.visual_tokens, args.textual_tokens, args.ratio)
    print(f"tokens_before: {est.tokens_before}")
    print(f"tokens_after: {est.tokens_after}")
    print(f"prefill_speedup: {est.prefill_speedup:.2f}x (upper bound)")
    print(f"decode_speedup: {est.decode_speedup:.2f}x (upper bound)")
    print(f"note: {cost_model.MODEL_NOTE}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(pruning.dumps_stable(est.to_document()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="attnprune",
                     description="attention-guided visual token pruning toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prune", help="prune one attention dump to a selection JSON")
    _add_prune_flags(p)
    p.add_argument("--out", help="selection JSON path (default: stdout)")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("sweep", help="prune at the nine canonical retention ratios")
    _add_prune_flags(p, with_ratio_required=False)
    p.add_argument("--out-dir", default=".", help="directory for per-ratio selection JSONs")
    p.add_argument("--textual-tokens", type=int, default=0,
                   help="textual token count for the speedup columns")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="attention concentration and token budget")
    p.add_argument("--attn", nargs="+", required=True, help="attention tensor file(s)")
    p.add_argument("--mass-threshold", type=_mass_threshold, default=0.8)
    p.add_argument("--cls-token", choices=["none", "first"], default="none")
    p.add_argument("--visual-tokens", type=int, default=None)
    p.add_argument("--textual-tokens", type=int, default=None)
    p.add_argument("--out", help="write the report as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("viz", help="write significance heatmap (and selection mask) PGMs")
    _add_prune_flags(p, with_ratio_required=False)
    p.add_argument("--ratio", type=_ratio, default=None,
                   help="also write the selection mask at this retention ratio")
    p.add_argument("--side", type=int, default=None,
                   help="grid side (default: sqrt of token count)")
    p.add_argument("--scale", type=int, default=1, help="nearest-neighbor upscale factor")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("estimate", help="analytical prefill/decode speedup bounds")
    p.add_argument("--visual-tokens", type=int, required=True)
    p.add_argument("--textual-tokens", type=int, default=0)
    p.add_argument("--ratio", type=_ratio, required=True)
    p.add_argument("--out", help="write the estimate as JSON")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AttnpruneError, ValueError) as exc:
        print(f"attnprune: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"attnprune: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
