"""Command-line entry point.

Exit codes: 0 success, 1 domain error (bad data, missing file), 2 usage
error. Every report subcommand writes its table to ``--out`` plus a
machine-readable twin at ``<out>.json``; standard output carries a one-line
summary. Randomized subcommands echo their seed inside the report.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import reports
from .analytics import SCORINGS
from .campaign.build import build_campaign
from .campaign.config import load_config
from .campaign.export import export_campaign
from .campaign.records import Export
from .campaign.service import ServiceError
from .consistency import (
    NOISE_FAMILIES,
    NoiseModelParams,
    PREFILTER_MODES,
    ScoreMatrix,
    simulate_matrix,
)


def _write_report(out: Path, lines: list[str], summary: dict) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    twin = out.with_name(out.name + ".json")
    twin.write_text(
        json.dumps(summary, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def _load_export(path: str) -> Export:
    return Export.read(path)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esa",
        description="Error-span annotation campaigns with AI pre-fill, plus their analytics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # campaign -----------------------------------------------------------
    campaign = sub.add_parser("campaign", help="build, serve, or export a campaign")
    campaign_sub = campaign.add_subparsers(dest="action", required=True)

    build = campaign_sub.add_parser("build", help="pre-fill, batch, and write a campaign")
    build.add_argument("--config", required=True, help="key=value campaign config file")
    build.add_argument("--input", required=True, help="tab-separated segments input")
    build.add_argument("--out", required=True, help="campaign directory to create")
    build.add_argument("--seed", type=int, default=None, help="override the config seed")

    serve = campaign_sub.add_parser("serve", help="run the annotation HTTP service")
    serve.add_argument("--dir", required=True, help="campaign directory")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--token", default=None, help="shared annotator token")
    serve.add_argument("--ui", default=None, help="static UI directory to mount at /")

    export = campaign_sub.add_parser("export", help="write the canonical three-file export")
    export.add_argument("--dir", required=True, help="campaign directory")
    export.add_argument("--out", default=None, help="export directory (default <dir>/export)")

    # analyze ------------------------------------------------------------
    analyze = sub.add_parser("analyze", help="statistics over exports")
    analyze_sub = analyze.add_subparsers(dest="stat", required=True)

    summary = analyze_sub.add_parser("summary", help="spans per segment, severity split, scores")
    summary.add_argument("--export", required=True)
    summary.add_argument("--out", required=True)

    agreement = analyze_sub.add_parser("agreement", help="inter/intra annotator agreement")
    agreement.add_argument("--run-a", required=True)
    agreement.add_argument("--run-b", required=True)
    agreement.add_argument("--mode", choices=SCORINGS, default="direct")
    agreement.add_argument("--out", required=True)

    timing = analyze_sub.add_parser("timing", help="feature correlations with annotation time")
    timing.add_argument("--export", required=True)
    timing.add_argument("--out", required=True)

    speedup = analyze_sub.add_parser("speedup", help="per-annotator timing curves and slope")
    speedup.add_argument("--export", required=True)
    speedup.add_argument("--window", type=int, default=15)
    speedup.add_argument("--out", required=True)

    rank = analyze_sub.add_parser("rank", help="system ranking with significance clusters")
    rank.add_argument("--export", required=True)
    rank.add_argument("--scoring", choices=SCORINGS, default="direct")
    rank.add_argument("--alpha", type=float, default=0.05)
    rank.add_argument("--out", required=True)

    crosstau = analyze_sub.add_parser("crosstau", help="segment-level tau_c between two runs")
    crosstau.add_argument("--run-a", required=True)
    crosstau.add_argument("--run-b", required=True)
    crosstau.add_argument("--scoring-a", choices=SCORINGS, default="direct")
    crosstau.add_argument("--scoring-b", choices=SCORINGS, default="direct")
    crosstau.add_argument("--out", required=True)

    # consistency ----------------------------------------------------------
    cons = sub.add_parser(
        "consistency", help="subset-size ranking consistency over an export or the simulator"
    )
    cons.add_argument("--export", default=None, help="export directory with scores")
    cons.add_argument("--scoring", choices=SCORINGS, default="direct")
    cons.add_argument("--simulate", action="store_true", help="use the noise-model simulator")
    cons.add_argument("--abilities", type=_float_list, default=None,
                      help="comma-separated system abilities (simulator)")
    cons.add_argument("--n-segments", type=int, default=200)
    cons.add_argument("--difficulty-scale", type=float, default=1.0)
    cons.add_argument("--noise-scale", type=float, default=1.0)
    cons.add_argument("--family", choices=NOISE_FAMILIES, default="gaussian")
    cons.add_argument("--sizes", type=_int_list, required=True,
                      help="comma-separated subset sizes")
    cons.add_argument("--resamples", type=int, default=1000)
    cons.add_argument("--seed", type=int, default=0)
    cons.add_argument("--out", required=True)

    # prefilter ------------------------------------------------------------
    prefilter = sub.add_parser("prefilter", help="QE-prefiltering budget simulation")
    prefilter.add_argument("--export", required=True)
    prefilter.add_argument("--mode", choices=PREFILTER_MODES, default="substitute")
    prefilter.add_argument("--threshold", type=float, default=1.0)
    prefilter.add_argument("--out", required=True)

    # checks ---------------------------------------------------------------
    checks = sub.add_parser("checks", help="attention-check reports")
    checks_sub = checks.add_subparsers(dest="action", required=True)
    checks_report = checks_sub.add_parser("report", help="check outcomes and trust effect")
    checks_report.add_argument("--export", required=True)
    checks_report.add_argument("--pass-threshold", type=float, default=0.5,
                               help="score_ok rate needed to pass")
    checks_report.add_argument("--out", required=True)

    # diff -----------------------------------------------------------------
    diff = sub.add_parser("diff", help="pre-fill post-editing reports")
    diff_sub = diff.add_subparsers(dest="action", required=True)
    diff_report = diff_sub.add_parser("report", help="edit kinds and distribution tables")
    diff_report.add_argument("--export", required=True)
    diff_report.add_argument("--out", required=True)

    return parser


def _cmd_campaign(args) -> int:
    if args.action == "build":
        config = load_config(args.config)
        if args.seed is not None:
            config = type(config).from_dict({**config.to_dict(), "seed": args.seed})
        campaign = build_campaign(config, args.input, args.out)
        n_checks = sum(1 for t in campaign.tasks.values() if t.is_check)
        print(
            f"built {args.out}: {len(campaign.tasks)} tasks "
            f"({n_checks} checks) in {len(campaign.batches)} batches, seed {config.seed}"
        )
        return 0
    if args.action == "serve":
        import uvicorn

        from .campaign.server import create_app
        from .campaign.service import CampaignService

        service = CampaignService(args.dir)
        app = create_app(service, token=args.token, ui_dir=args.ui)
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    out = export_campaign(args.dir, args.out)
    print(f"exported to {out}")
    return 0


def _cmd_analyze(args) -> int:
    if args.stat == "summary":
        lines, summary = reports.summary_report(_load_export(args.export))
    elif args.stat == "agreement":
        lines, summary = reports.agreement_lines(
            _load_export(args.run_a), _load_export(args.run_b), args.mode
        )
    elif args.stat == "timing":
        lines, summary = reports.timing_lines(_load_export(args.export))
    elif args.stat == "speedup":
        lines, summary = reports.speedup_lines(_load_export(args.export), args.window)
    elif args.stat == "rank":
        lines, summary = reports.rank_lines(_load_export(args.export), args.scoring, args.alpha)
    else:
        lines, summary = reports.crosstau_lines(
            _load_export(args.run_a),
            _load_export(args.run_b),
            args.scoring_a,
            args.scoring_b,
        )
    _write_report(Path(args.out), lines, summary)
    print(f"wrote {args.out}")
    return 0


def _cmd_consistency(args) -> int:
    if args.simulate == bool(args.export):
        raise ValueError("pass exactly one of --export or --simulate")
    if args.simulate:
        abilities = args.abilities or [float(i) for i in range(10)]
        params = NoiseModelParams(
            abilities=tuple(abilities),
            difficulty_scale=args.difficulty_scale,
            noise_scale=args.noise_scale,
            family=args.family,
            seed=args.seed,
        )
        matrix = simulate_matrix(params, args.n_segments)
        source = (
            f"simulator(abilities={len(abilities)}, noise={args.noise_scale}, "
            f"difficulty={args.difficulty_scale}, family={args.family})"
        )
    else:
        matrix = ScoreMatrix.from_export(_load_export(args.export), scoring=args.scoring)
        source = f"export {args.export} ({args.scoring})"
    lines, summary = reports.consistency_lines(
        matrix, args.sizes, args.resamples, args.seed, source
    )
    _write_report(Path(args.out), lines, summary)
    print(f"wrote {args.out}")
    return 0


def _cmd_prefilter(args) -> int:
    lines, summary = reports.prefilter_lines(
        _load_export(args.export), args.mode, args.threshold
    )
    _write_report(Path(args.out), lines, summary)
    print(f"wrote {args.out}")
    return 0


def _cmd_checks(args) -> int:
    lines, summary = reports.checks_lines(_load_export(args.export), args.pass_threshold)
    _write_report(Path(args.out), lines, summary)
    print(f"wrote {args.out}")
    return 0


def _cmd_diff(args) -> int:
    lines, summary = reports.diff_lines(_load_export(args.export))
    _write_report(Path(args.out), lines, summary)
    print(f"wrote {args.out}")
    return 0


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "campaign": _cmd_campaign,
        "analyze": _cmd_analyze,
        "consistency": _cmd_consistency,
        "prefilter": _cmd_prefilter,
        "checks": _cmd_checks,
        "diff": _cmd_diff,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, ServiceError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
