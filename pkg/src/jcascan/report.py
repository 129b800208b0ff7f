"""Deterministic report construction and serialization.

One JSON object per invocation site, emitted in (path, offset) order, plus
a single summary footer. Identical inputs and configuration always produce
byte-identical output: keys are sorted, collections are sorted, and scores
are rounded to six decimals.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .classify import classify, signature_of
from .complexity import Stratum, count_d, draw_sample, ranged_key, score
from .ingest import RESTRICTIVE, InvocationSite
from .resolve import ResolutionBudget, resolve_site
from .rules import ERROR, WARNING, INFO, MisuseFinding, check_site

_SEVERITY_RANK = {INFO: 0, WARNING: 1, ERROR: 2}
FAIL_ON_CHOICES = (ERROR, WARNING, "NONE")


def severity_at_least(severity: str, threshold: str) -> bool:
    """True when a finding at `severity` trips a `threshold` gate."""
    if threshold == "NONE":
        return False
    return _SEVERITY_RANK[severity] >= _SEVERITY_RANK[threshold]


def finding_record(finding: MisuseFinding) -> dict:
    return {
        "rule_id": finding.rule_id,
        "severity": finding.severity,
        "message": finding.message,
        "effective_value": finding.effective_value,
        "evidence": sorted(finding.evidence),
        "evasive": finding.evasive,
    }


@dataclass
class SiteAnalysis:
    site: InvocationSite
    d: int
    score: float
    labels: list[str]
    signature: dict[str, int]
    candidates: list[str]
    residuals: list[str]
    findings: list[MisuseFinding]


def analyze_site(site: InvocationSite,
                 budget: ResolutionBudget | None = None) -> SiteAnalysis:
    """Full pipeline for one site: score, resolve, classify, rules."""
    d = count_d(site)
    s = score(d)
    resolved = None
    if site.api.category == RESTRICTIVE:
        resolved = resolve_site(site, budget or ResolutionBudget())
    labels = classify(site, resolved)
    findings = check_site(site, resolved, labels)
    return SiteAnalysis(
        site=site,
        d=d,
        score=round(s, 6),
        labels=sorted(labels.labels),
        signature=dict(sorted(signature_of(site).as_dict().items())),
        candidates=sorted(resolved.candidates) if resolved else [],
        residuals=sorted(resolved.residuals) if resolved else [],
        findings=findings,
    )


def site_record(analysis: SiteAnalysis) -> dict:
    site = analysis.site
    return {
        "id": site.id,
        "api": site.api.name,
        "category": site.api.category,
        "path": site.path,
        "start_line": site.start_line,
        "end_line": site.end_line,
        "d": analysis.d,
        "score": analysis.score,
        "labels": analysis.labels,
        "signature": analysis.signature,
        "resolved": {"candidates": analysis.candidates,
                     "residuals": analysis.residuals},
        "findings": [finding_record(f) for f in analysis.findings],
    }


def _strata_table(analyses: list[SiteAnalysis]) -> dict:
    """Stratum populations: exact-d for restrictive, ranged for flexible."""
    table: dict[str, list[dict]] = {}
    for category, mode in ((RESTRICTIVE, "exact"), ("flexible", "ranged")):
        rows: dict[int, int] = {}
        for a in analyses:
            if a.site.api.category != category:
                continue
            key = a.d if mode == "exact" else ranged_key(a.score)
            rows[key] = rows.get(key, 0) + 1
        table[category] = [{"key": k, "population": n}
                           for k, n in sorted(rows.items())]
    return table


def summary_record(analyses: list[SiteAnalysis],
                   warnings: list | None = None) -> dict:
    by_severity = {ERROR: 0, WARNING: 0, INFO: 0}
    prevalence: dict[str, int] = {}
    for a in analyses:
        for f in a.findings:
            by_severity[f.severity] += 1
        for label in a.labels:
            prevalence[label] = prevalence.get(label, 0) + 1
    return {
        "summary": {
            "sites": len(analyses),
            "findings_by_severity": by_severity,
            "strata": _strata_table(analyses),
            "prevalence": [[k, v] for k, v in sorted(prevalence.items())],
            "parse_warnings": len(warnings or []),
        }
    }


def dumps_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=True)


def write_report(analyses: list[SiteAnalysis], out,
                 warnings: list | None = None) -> None:
    """JSON-lines: one record per site in (path, offset) order + footer."""
    ordered = sorted(analyses, key=lambda a: (a.site.path,
                                              a.site.node.start
                                              if a.site.node else 0))
    for a in ordered:
        out.write(dumps_line(site_record(a)) + "\n")
    out.write(dumps_line(summary_record(ordered, warnings)) + "\n")


def read_report(path: str | Path) -> tuple[list[dict], dict | None]:
    """(site records, summary footer) from a JSON-lines report."""
    records: list[dict] = []
    summary = None
    for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: bad report line: {exc}")
        if "summary" in obj:
            summary = obj
        else:
            records.append(obj)
    return records, summary


def worst_severity_hit(analyses: list[SiteAnalysis],
                       fail_on: str) -> bool:
    return any(severity_at_least(f.severity, fail_on)
               for a in analyses for f in a.findings)


def plan_from_report(records: list[dict], confidence: float,
                     margin: float, seed: int) -> dict:
    """Recompute strata from report records and draw a sample plan."""
    plans = {}
    for category, mode in ((RESTRICTIVE, "exact"), ("flexible", "ranged")):
        buckets: dict[int, list[str]] = {}
        for rec in records:
            if rec.get("category") != category:
                continue
            key = rec["d"] if mode == "exact" else ranged_key(rec["score"])
            buckets.setdefault(key, []).append(rec["id"])
        strata = [Stratum(key=k, population=len(ids),
                          member_ids=sorted(ids))
                  for k, ids in sorted(buckets.items())]
        plan = draw_sample(strata, seed, confidence, margin)
        plans[category] = {
            "strata": [{"key": s.key, "population": s.population,
                        "sample_size": s.sample_size}
                       for s in plan.strata],
            "selected_ids": plan.selected_ids,
        }
    return {"confidence": confidence, "margin": margin, "seed": seed,
            "plans": plans}


def strata_csv(summary: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["category", "stratum_key", "population"])
    for category, rows in sorted(summary["summary"]["strata"].items()):
        for row in rows:
            writer.writerow([category, row["key"], row["population"]])
    return buf.getvalue()


def prevalence_csv(summary: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["label", "sites"])
    for label, count in summary["summary"]["prevalence"]:
        writer.writerow([label, count])
    return buf.getvalue()
