"""Command-line entry point.

Subcommands: ``scan``, ``stratify``, ``sample``, ``classify``,
``bench gen``, ``bench run``, ``report``. All output is deterministic for
a fixed input, configuration, and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bench
from .ingest import (DEFAULT_APIS, ApiKind, CustomApi, load_config,
                     scan_corpus)
from .report import (analyze_site, dumps_line, plan_from_report,
                     prevalence_csv, read_report, strata_csv,
                     worst_severity_hit, write_report, FAIL_ON_CHOICES)
from .resolve import ResolutionBudget


@dataclass
class ScanConfig:
    apis: frozenset[ApiKind] = DEFAULT_APIS
    extras: list[CustomApi] = field(default_factory=list)
    budget: ResolutionBudget = field(default_factory=ResolutionBudget)
    confidence: float = 0.95
    margin: float = 0.05
    seed: int = 0
    fail_on: str = "NONE"
    output: str | None = None


def _config_from_args(args) -> ScanConfig:
    apis = DEFAULT_APIS
    if getattr(args, "apis", None):
        wanted = {name.strip() for name in args.apis.split(",")}
        apis = frozenset(a for a in DEFAULT_APIS if a.name in wanted)
        unknown = wanted - {a.name for a in DEFAULT_APIS}
        if unknown:
            raise SystemExit(f"unknown API names: {sorted(unknown)}")
    extras = []
    if getattr(args, "config", None):
        extras = load_config(args.config)
    budget = ResolutionBudget(
        max_indirection=getattr(args, "max_indirection", 2),
        max_candidates=getattr(args, "max_candidates", 16),
    )
    return ScanConfig(
        apis=apis,
        extras=extras,
        budget=budget,
        confidence=getattr(args, "confidence", 0.95),
        margin=getattr(args, "margin", 0.05),
        seed=getattr(args, "seed", 0),
        fail_on=getattr(args, "fail_on", "NONE").upper(),
        output=getattr(args, "output", None),
    )


def _analyze_dir(config: ScanConfig, directory: str):
    sites, warnings = scan_corpus(directory, config.apis, config.extras)
    analyses = [analyze_site(site, config.budget) for site in sites]
    return analyses, warnings


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def cmd_scan(args) -> int:
    config = _config_from_args(args)
    analyses, warnings = _analyze_dir(config, args.directory)
    out, close = _open_out(config.output)
    try:
        write_report(analyses, out, warnings)
    finally:
        if close:
            out.close()
    return 1 if worst_severity_hit(analyses, config.fail_on) else 0


def cmd_stratify(args) -> int:
    config = _config_from_args(args)
    analyses, _ = _analyze_dir(config, args.directory)
    from .report import summary_record
    summary = summary_record(analyses)
    out, close = _open_out(config.output)
    try:
        out.write(strata_csv(summary))
    finally:
        if close:
            out.close()
    return 0


def cmd_classify(args) -> int:
    config = _config_from_args(args)
    analyses, _ = _analyze_dir(config, args.directory)
    out, close = _open_out(config.output)
    try:
        for a in analyses:
            out.write(dumps_line({"id": a.site.id, "labels": a.labels,
                                  "signature": a.signature}) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_sample(args) -> int:
    config = _config_from_args(args)
    records, _ = read_report(args.report)
    plan = plan_from_report(records, config.confidence, config.margin,
                            config.seed)
    out, close = _open_out(config.output)
    try:
        out.write(json.dumps(plan, indent=2, sort_keys=True) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_report(args) -> int:
    _, summary = read_report(args.report)
    if summary is None:
        raise SystemExit(f"no summary footer in {args.report}")
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "strata.csv").write_text(strata_csv(summary),
                                       encoding="utf-8")
    (outdir / "prevalence.csv").write_text(prevalence_csv(summary),
                                           encoding="utf-8")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_bench_gen(args) -> int:
    cases = bench.generate_corpus(args.outdir, seed=args.seed)
    print(f"generated {len(cases)} cases under {args.outdir}")
    return 0


def cmd_bench_run(args) -> int:
    cases = bench.load_manifest(args.corpus)
    if args.report == "self":
        tool_report = bench.self_report(args.corpus)
    else:
        tool_report = bench.load_report_csv(args.report)
    verdicts = bench.grade(cases, tool_report)
    csv_matrix, text_matrix = bench.summarize({tool_report.tool: verdicts})
    if args.summary:
        Path(args.summary).write_text(csv_matrix, encoding="utf-8")
    print(text_matrix, end="")
    detected = sum(v.verdict == bench.DETECTED for v in verdicts)
    print(f"{detected}/{len(verdicts)} detected")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--apis", help="comma-separated ApiKind names")
    parser.add_argument("--config", help="extra-API config file")
    parser.add_argument("--confidence", type=float, default=0.95)
    parser.add_argument("--margin", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-indirection", type=int, default=2)
    parser.add_argument("--max-candidates", type=int, default=16)
    parser.add_argument("--output", "-o", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcascan",
        description="Crypto-API invocation scanner, classifier, and "
                    "misuse detector for Java source corpora.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="full pipeline over a directory")
    p_scan.add_argument("directory")
    p_scan.add_argument("--fail-on", default="NONE",
                        choices=[c.lower() for c in FAIL_ON_CHOICES]
                        + list(FAIL_ON_CHOICES))
    _add_common(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    p_strat = sub.add_parser("stratify", help="stratum table for a corpus")
    p_strat.add_argument("directory")
    _add_common(p_strat)
    p_strat.set_defaults(func=cmd_stratify)

    p_cls = sub.add_parser("classify", help="labels + signatures per site")
    p_cls.add_argument("directory")
    _add_common(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_sample = sub.add_parser("sample",
                              help="stratified sample plan from a report")
    p_sample.add_argument("report")
    _add_common(p_sample)
    p_sample.set_defaults(func=cmd_sample)

    p_report = sub.add_parser("report",
                              help="summary CSVs from a scan report")
    p_report.add_argument("report")
    p_report.add_argument("--out-dir", default=".")
    p_report.set_defaults(func=cmd_report)

    p_bench = sub.add_parser("bench", help="benchmark corpus and grading")
    bench_sub = p_bench.add_subparsers(dest="bench_command", required=True)
    p_gen = bench_sub.add_parser("gen", help="generate the 23-case corpus")
    p_gen.add_argument("outdir")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(func=cmd_bench_gen)
    p_run = bench_sub.add_parser("run", help="grade a detector report")
    p_run.add_argument("corpus")
    p_run.add_argument("--report", required=True,
                       help="'self' or a detector CSV")
    p_run.add_argument("--summary", help="write the CSV matrix here")
    p_run.set_defaults(func=cmd_bench_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
