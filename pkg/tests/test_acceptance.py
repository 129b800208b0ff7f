"""Top-level acceptance checks for the analyzer.

Each test exercises one end-to-end guarantee and prints a single PASS line
so the suite output doubles as an acceptance report.
"""

from __future__ import annotations

import importlib.util
import math
import time
from pathlib import Path

from jcascan import bench
from jcascan.classify import ArgumentSignature, classify, match_signature
from jcascan.cli import main as cli_main
from jcascan.complexity import sample_size, score
from jcascan.ingest import RESTRICTIVE, scan_corpus
from jcascan.resolve import resolve_site, visible_literals
from jcascan.rules import check_site

from conftest import (BASE64_SRC, BYTE_LOOP_SRC, CHARAT_SRC, ENUM_SRC,
                      NESTED_TERNARY_SRC, REPLACE_SRC, STRINGBUFFER_SRC,
                      STRINGBUILDER_SRC, TERNARY_SRC, XOR_SRC, site_of)

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def _ok(criterion: int, text: str) -> None:
    print(f"\nACCEPTANCE {criterion}: PASS - {text}")


def test_criterion_1_score_reference_values():
    assert score(0) == -1.0
    for d, expected in [(1, 0.0), (2, 0.2923), (3, 0.4439), (4, 0.5385),
                        (10, math.tanh(1.0))]:
        assert abs(score(d) - expected) < 5e-5, (d, score(d))
    _ok(1, "complexity scores match reference values within 5e-5")


def test_criterion_2_resolver_oracles():
    start = time.perf_counter()
    oracles = [
        (CHARAT_SRC, {"AES/ECB/NoPadding"}),
        (XOR_SRC, {"AES/ECB/PKCS5Padding"}),
        (BASE64_SRC, {"DES/CBC/PKCS5Padding"}),
        (BYTE_LOOP_SRC, {"AES"}),
        (TERNARY_SRC, {"AES/GCM/NoPadding", "AES"}),
        (STRINGBUFFER_SRC, {"DESede/CBC/NoPadding"}),
        (STRINGBUILDER_SRC, {"AES/ECB/PKCS7Padding"}),
        (NESTED_TERNARY_SRC, {"RSA/ECB/OAEPWithSHA-1AndMGF1Padding",
                              "RSA/ECB/PKCS1Padding"}),
        (REPLACE_SRC, {"DES"}),
        (ENUM_SRC, {"DES/ECB/PKCS5Padding"}),
    ]
    for src, expected in oracles:
        assert resolve_site(site_of(src)).candidates == expected
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"resolver oracles took {elapsed:.2f}s"
    _ok(2, f"{len(oracles)} obfuscated-argument oracles resolved exactly "
           f"in {elapsed * 1000:.0f}ms")


def test_criterion_3_benchmark_self_detection(bench_corpus):
    outdir, cases = bench_corpus
    start = time.perf_counter()
    verdicts = bench.grade(cases, bench.self_report(outdir))
    elapsed = time.perf_counter() - start
    detected = sum(v.verdict == bench.DETECTED for v in verdicts)
    assert detected == len(verdicts) == 23
    assert elapsed < 10.0, f"self grading took {elapsed:.2f}s"
    _ok(3, f"bundled detector scores 23/23 on the generated benchmark "
           f"in {elapsed:.2f}s")


def test_criterion_4_evasion_flag_iff_hidden(bench_corpus):
    outdir, cases = bench_corpus
    sites, _ = scan_corpus(outdir)
    dir_of = {}
    evasive_dirs: set[str] = set()
    for site in sites:
        if site.api.category != RESTRICTIVE:
            continue
        resolved = resolve_site(site)
        labels = classify(site, resolved)
        findings = check_site(site, resolved, labels)
        lits = visible_literals(site, resolved)
        for finding in findings:
            hidden = finding.effective_value not in lits
            assert finding.evasive == hidden, (site.path, finding.rule_id)
            if finding.evasive:
                evasive_dirs.add(site.path.split("/")[-2])
        dir_of[site.path.split("/")[-2]] = True
    by_id = {c.case_id: c.directory for c in cases
             if c.category == RESTRICTIVE}
    for case_id in ["STROP", "METHOD*", "BAS64", "NATIVE", "STRBUF",
                    "STRBL*", "CONCT", "ENUM"]:
        assert by_id[case_id] in evasive_dirs, case_id
    for case_id in ["ID", "TEROP", "STATIC", "METHOD"]:
        assert by_id[case_id] not in evasive_dirs, case_id
    _ok(4, "evasive flag holds exactly when the effective value is "
           "absent from visible literals")


def test_criterion_5_sample_sizes():
    assert sample_size(79671, 0.95, 0.05) == 383
    for n in [1, 10, 100, 384]:
        assert sample_size(n, 0.95, 0.05) == n
    assert sample_size(385, 0.95, 0.05) < 385
    _ok(5, "stratum sample sizes match the finite-population formula "
           "(79671 -> 383; small strata sampled in full)")


def test_criterion_6_synthetic_distribution(tmp_path):
    spec = importlib.util.spec_from_file_location(
        "synthetic_distribution", SCRIPTS / "synthetic_distribution.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    corpus = tmp_path / "synthetic"
    mod.generate_synthetic_corpus(corpus, seed=0)
    dist = mod.distribution(corpus)
    restrictive = dist["restrictive"]
    plurality = max(restrictive, key=restrictive.get)
    assert plurality == 1  # single-literal arguments dominate (score 0)
    assert dist["flexible"].get(-1, 0) > 0  # empty trust bodies present
    _ok(6, "synthetic corpus peaks at the single-literal stratum and "
           "populates the empty-body stratum")


def test_criterion_7_deterministic_output(bench_corpus, tmp_path):
    outdir, _ = bench_corpus
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli_main(["scan", str(outdir), "-o", str(a)]) == 0
    assert cli_main(["scan", str(outdir), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.stat().st_size > 0
    _ok(7, "repeated scans of the same corpus are byte-identical")


def test_criterion_8_signature_retrieval(bench_corpus):
    outdir, cases = bench_corpus
    sites, _ = scan_corpus(outdir)
    pattern = ArgumentSignature.from_counts(
        {"identifier": 3, "ternary_expression": 1})
    hits = match_signature(sites, pattern)
    terop = next(c for c in cases if c.case_id == "TEROP")
    want = next(v.file for v in terop.variants if "TernaryIds" in v.file)
    matched_files = {s.path.split(str(outdir) + "/")[-1]
                     for s in sites if s.id in hits}
    assert matched_files == {want}
    _ok(8, "structural signature search retrieves exactly the "
           "identifier-ternary variant from the benchmark corpus")
