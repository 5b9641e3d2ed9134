"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.
"""

import json
import time

import numpy as np
import pytest

from condsep import (
    ENTANGLED,
    SEPARABLE,
    SearchConfig,
    SubsystemDims,
    build_extension,
    classical_cmi,
    classify,
    dedegenerate_weights,
    extract_decomposition,
    make_decomposition,
    make_distribution,
    partial_trace,
    ppt_check,
    quantum_cmi,
    random_density,
    random_separable,
    saturation_residual,
    validate_density,
    verify_extension,
)
from condsep.cli import run as cli_run
from condsep.serialize import density_to_obj, dumps

from conftest import BELL, XY22, werner


def report(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
    print(line)
    assert ok, line


def seeded_decompositions(count, start=0):
    """Random decompositions, every third one with forced degenerate and zero weights."""
    out = []
    for i in range(count):
        d = random_separable((2, 2), 3 + (i % 3), seed=start + i, factor_rank=1 + (i % 2))
        if i % 3 == 0:
            terms = [(t.weight, t.x_factor, t.y_factor) for t in d.terms]
            w0 = (terms[0][0] + terms[1][0]) / 2
            terms[0] = (w0, terms[0][1], terms[0][2])
            terms[1] = (w0, terms[1][1], terms[1][2])
            terms.append((0.0, terms[0][1], terms[0][2]))
            d = make_decomposition(terms)
        out.append(d)
    return out


def test_criterion_1_ssa_suites():
    start = time.monotonic()
    worst_q = np.inf
    for dims in ((2, 2, 2), (2, 2, 3)):
        for seed in range(1000):
            cmi = quantum_cmi(random_density(dims, seed=seed, rank=(seed % 4) + 1)).cmi
            worst_q = min(worst_q, cmi)
    rng = np.random.default_rng(12345)
    worst_c = np.inf
    for _ in range(1000):
        probs = rng.random((2, 2, 2))
        probs /= probs.sum()
        worst_c = min(worst_c, classical_cmi(make_distribution(probs)))
    elapsed = time.monotonic() - start
    report(
        "criterion 1 (SSA suites)",
        worst_q >= -1e-9 and worst_c >= -1e-12 and elapsed < 30.0,
        f"min quantum cmi {worst_q:.2e}, min classical cmi {worst_c:.2e}, {elapsed:.1f}s",
    )


def test_criterion_2_conditional_separability_zero_cmi():
    worst = 0.0
    for d in seeded_decompositions(200, start=1000):
        ext = build_extension(dedegenerate_weights(d))
        worst = max(worst, abs(quantum_cmi(ext.sigma).cmi))
    report("criterion 2 (conditionally separable => zero CMI)", worst <= 1e-9, f"max |cmi| {worst:.2e}")


def test_criterion_3_forward_round_trip():
    worst_recon = 0.0
    all_pass = True
    for d in seeded_decompositions(200, start=2000):
        dd = dedegenerate_weights(d)
        ext = build_extension(dd)
        rho = validate_density(d.reconstruct(), XY22)
        cert = verify_extension(rho, ext)
        all_pass = all_pass and cert.overall_pass
        worst_recon = max(worst_recon, cert.cond1_marginal_residual)
    report(
        "criterion 3 (forward round trip)",
        all_pass and worst_recon <= 1e-8,
        f"max marginal residual {worst_recon:.2e}",
    )


def test_criterion_4_backward_round_trip():
    worst_rebuild = 0.0
    worst_weight = 0.0
    for d in seeded_decompositions(200, start=2000):
        ext = build_extension(dedegenerate_weights(d))
        result = extract_decomposition(ext)
        worst_rebuild = max(worst_rebuild, result.rebuild_residual)
        sig_e = partial_trace(ext.sigma, ("e",)).matrix
        expected = np.sort(np.linalg.eigvalsh(sig_e))[::-1]
        worst_weight = max(worst_weight, float(np.max(np.abs(result.decomposition.weights - expected))))
    report(
        "criterion 4 (backward round trip)",
        worst_rebuild <= 1e-8 and worst_weight <= 1e-9,
        f"max rebuild residual {worst_rebuild:.2e}, max weight error {worst_weight:.2e}",
    )


def test_criterion_5_saturation_equivalence():
    counterexamples = 0
    for i in range(50):
        d = random_separable((2, 2), 2 + (i % 2), seed=5000 + i, factor_rank=2)
        sigma = build_extension(dedegenerate_weights(d)).sigma
        res = saturation_residual(sigma)
        cmi = abs(quantum_cmi(sigma).cmi)
        if (res <= 1e-8) != (cmi <= 1e-6):
            counterexamples += 1
    for i in range(50):
        sigma = random_density((2, 2, 2), seed=6000 + i)
        res = saturation_residual(sigma)
        cmi = abs(quantum_cmi(sigma).cmi)
        if (res <= 1e-8) != (cmi <= 1e-6):
            counterexamples += 1
    report("criterion 5 (saturation equivalence)", counterexamples == 0, f"{counterexamples} counterexamples")


def test_criterion_6_negative_controls():
    from condsep import ExtensionState, kron

    fx = random_density((2,), seed=1, labels=("x",))
    fy = random_density((2,), seed=2, labels=("y",))
    sigma = validate_density(
        kron(np.eye(2) / 2, kron(fx.matrix, fy.matrix)), SubsystemDims(("e", "x", "y"), (2, 2, 2))
    )
    rho = validate_density(kron(fx.matrix, fy.matrix), XY22)
    cert_a = verify_extension(rho, ExtensionState(sigma=sigma))
    only_cond4 = cert_a.cond1_pass and cert_a.cond2_pass and cert_a.cond3_pass and not cert_a.cond4_pass

    bell = validate_density(BELL, XY22)
    sigma_b = validate_density(BELL, SubsystemDims(("e", "x", "y"), (1, 2, 2)))
    cert_b = verify_extension(bell, ExtensionState(sigma=sigma_b))
    only_cond2 = (
        cert_b.cond1_pass
        and not cert_b.cond2_pass
        and cert_b.cond3_pass
        and cert_b.cond4_pass
        and abs(cert_b.cond2_cmi - 2.0) <= 1e-9
    )
    report(
        "criterion 6 (negative controls)",
        only_cond4 and only_cond2,
        f"degenerate-e fails only cond4: {only_cond4}; Bell fails only cond2 (cmi {cert_b.cond2_cmi:.10f})",
    )


def test_criterion_7_ppt_oracle():
    bell = validate_density(BELL, XY22)
    bell_min = ppt_check(bell).min_eigenvalue
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-8:
        mid = (lo + hi) / 2
        state = validate_density(werner(mid), XY22)
        if ppt_check(state).min_eigenvalue >= 0:
            lo = mid
        else:
            hi = mid
    crossing = (lo + hi) / 2
    ok = abs(bell_min + 0.5) <= 1e-10 and abs(crossing - 1 / 3) <= 1e-6
    report(
        "criterion 7 (PPT oracle)",
        ok,
        f"Bell min eigenvalue {bell_min:.12f}, Werner crossing {crossing:.8f}",
    )


def test_criterion_8_classifier():
    start = time.monotonic()
    mixed = validate_density(np.eye(4) / 4, XY22)
    results = {
        "mixed": classify(mixed, SearchConfig(seed=1)),
        "werner02": classify(validate_density(werner(0.2), XY22), SearchConfig(seed=2)),
        "werner09": classify(validate_density(werner(0.9), XY22), SearchConfig(seed=3)),
        "bell": classify(validate_density(BELL, XY22), SearchConfig(seed=4)),
    }
    elapsed = time.monotonic() - start
    ok = (
        results["mixed"].verdict == SEPARABLE
        and results["mixed"].residual <= 1e-7
        and results["werner02"].verdict == SEPARABLE
        and results["werner02"].residual <= 1e-7
        and results["werner09"].verdict == ENTANGLED
        and results["bell"].verdict == ENTANGLED
        and elapsed < 120.0
    )
    # no state may carry both certificates
    for rep in results.values():
        if rep.verdict == SEPARABLE:
            ok = ok and rep.ppt_min_eigenvalue >= -1e-10
    report(
        "criterion 8 (classifier)",
        ok,
        ", ".join(f"{k}={v.verdict}" for k, v in results.items()) + f", {elapsed:.1f}s",
    )


def test_criterion_9_determinism(tmp_path, capsys):
    rho = validate_density(werner(0.2), XY22)
    path = tmp_path / "rho.json"
    path.write_text(dumps(density_to_obj(rho)))
    docs = {"classify": [], "search": []}
    for command in ("classify", "search"):
        for workers in ("1", "4"):
            code = cli_run(
                [command, "--rho", str(path), "--seed", "11", "--restarts", "4", "--workers", workers]
            )
            assert code == 0
            doc = json.loads(capsys.readouterr().out)
            doc.pop("timing_s")
            docs[command].append(json.dumps(doc, sort_keys=True))
        # repeat serial run for byte-identity
        cli_run([command, "--rho", str(path), "--seed", "11", "--restarts", "4", "--workers", "1"])
        doc = json.loads(capsys.readouterr().out)
        doc.pop("timing_s")
        docs[command].append(json.dumps(doc, sort_keys=True))
    ok = all(len(set(v)) == 1 for v in docs.values())
    report("criterion 9 (determinism)", ok, "classify/search byte-identical across reruns and workers")
