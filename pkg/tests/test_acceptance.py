"""Acceptance suite: one test per criterion, each printing a pass/fail line.

The simulation-backed criteria run through the shipped experiment config via
the command line exactly as a user would (`cbpsim verify`), once per session;
the algebraic identities run directly.  Every tolerance is asserted here at
its stated value.  Run with ``pytest tests/test_acceptance.py -v -s`` to see
the per-criterion lines.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from cbpsim import (
    BUILTIN_DRIFTS,
    DriftSpec,
    EULER_GAMMA,
    approximant,
    approximant_rates_direct,
    general_solution_residual,
    stationarity_bound,
)

ROOT = os.path.join(os.path.dirname(__file__), "..")
SUITE_PATH = os.path.join(ROOT, "configs", "paper-suite.json")
ATLAS = BUILTIN_DRIFTS["atlas"]


def report(name: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {'PASS' if passed else 'FAIL'} {name}: {detail}")
    assert passed, f"{name}: {detail}"


def random_cases(count=50, max_m=30, seed=911):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        n0 = int(rng.integers(0, 5))
        spec = DriftSpec(tuple(rng.normal(size=n0)), tail=float(rng.normal() * 0.5))
        a = stationarity_bound(spec) + float(rng.uniform(0.1, 2.0))
        m = int(rng.integers(2, max_m + 1))
        cases.append((spec, a, m))
    return cases


@pytest.fixture(scope="session")
def suite_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("paper-suite")
    proc = subprocess.run(
        [sys.executable, "-m", "cbpsim.cli", "verify", "--config", SUITE_PATH, "--out", str(out)],
        capture_output=True,
        text=True,
    )
    print(proc.stdout)
    assert proc.returncode == 0, f"verify exited {proc.returncode}:\n{proc.stderr}"
    return out


def verdict(suite_dir, name: str) -> dict:
    with open(suite_dir / name / "verdict.json") as fh:
        return json.load(fh)


def check(payload: dict, name: str) -> dict:
    matches = [c for c in payload["checks"] if c["name"] == name]
    assert matches, f"no check named {name} in {payload['name']}"
    return matches[0]


class TestAlgebraicIdentities:
    def test_rate_formula_identity(self):
        start = time.perf_counter()
        worst = 0.0
        for spec, a, m in random_cases():
            ap = approximant(spec, a, m)
            worst = max(worst, float(np.abs(approximant_rates_direct(ap) - ap.rates).max()))
        elapsed = time.perf_counter() - start
        report(
            "rate-formula-identity",
            worst <= 1e-10 and elapsed < 1.0,
            f"max deviation {worst:.3e} <= 1e-10 over 50 cases, m <= 30 ({elapsed:.2f} s)",
        )

    def test_drift_balance_identity(self):
        start = time.perf_counter()
        worst = 0.0
        for spec, a, m in random_cases():
            ap = approximant(spec, a, m)
            worst = max(worst, abs(float(ap.drifts.mean()) + a / 2.0))
        elapsed = time.perf_counter() - start
        report(
            "drift-balance-identity",
            worst <= 1e-12 and elapsed < 1.0,
            f"max |mean drift + a/2| = {worst:.3e} <= 1e-12 over 50 cases ({elapsed:.2f} s)",
        )

    def test_rbm_residual(self):
        start = time.perf_counter()
        rng = np.random.default_rng(414)
        specs = [ATLAS]
        for _ in range(2):
            specs.append(DriftSpec(tuple(rng.normal(size=3)), tail=float(rng.normal() * 0.5)))
        worst = 0.0
        for spec in specs:
            a = stationarity_bound(spec) + 1.0
            worst = max(worst, general_solution_residual(spec, a, 100))
        elapsed = time.perf_counter() - start
        report(
            "rbm-residual",
            worst <= 1e-12 and elapsed < 1.0,
            f"max residual {worst:.3e} <= 1e-12 at n=100, 3 drift sequences ({elapsed:.2f} s)",
        )


class TestSimulationCriteria:
    def test_finite_stationarity(self, suite_dir):
        payload = verdict(suite_dir, "finite-stationarity")
        config = payload["config"]
        assert (config["N"], config["dt"], config["M"], config["seed"]) == (2, 1e-3, 10_000, 42)
        mean_check = check(payload, "gap-1-mean")
        ks_check = check(payload, "ks-gap-1")
        # band is target +- (5% of target + 3 SE) around the Exp(1) mean
        assert mean_check["threshold"] == pytest.approx(
            0.05 * 1.0 + 3 * mean_check["se"], rel=1e-12
        )
        ok = mean_check["pass"] and ks_check["pass"] and ks_check["pvalue"] >= 1e-3
        report(
            "finite-stationarity",
            bool(ok),
            f"mean Z1(1)={mean_check['value']:.4f} (dev {mean_check['statistic']:.4f} <= "
            f"{mean_check['threshold']:.4f}), KS p={ks_check['pvalue']:.4f} >= 0.001, seed 42",
        )

    def test_drift_identity(self, suite_dir):
        payload = verdict(suite_dir, "drift-identity")
        assert payload["config"]["N"] == 5 and payload["config"]["M"] == 10_000
        devs = []
        for k in range(1, 6):
            c = check(payload, f"dY-{k}-mean")
            assert c["target"] == pytest.approx(0.2, abs=1e-15)
            assert c["threshold"] == pytest.approx(3 * c["se"] + 0.05, rel=1e-12)
            devs.append((c["statistic"], c["pass"]))
        ok = all(p for _, p in devs)
        worst = max(d for d, _ in devs)
        report(
            "drift-identity",
            bool(ok),
            f"all 5 ranks: |E dY_k - 0.2| <= 3SE + 0.05 (worst dev {worst:.4f})",
        )

    def test_theorem_b_drift(self, suite_dir):
        payload = verdict(suite_dir, "theorem-b-drift")
        config = payload["config"]
        assert (config["a"], config["m"], config["seed"]) == (1.0, 5, 7)
        c = check(payload, "dY-1-mean")
        assert c["target"] == -0.5
        assert c["threshold"] == pytest.approx(3 * c["se"] + 0.05, rel=1e-12)
        report(
            "theorem-b-drift",
            bool(c["pass"]),
            f"25 particles from stationarity: E dY_1 = {c['value']:.4f} vs -0.5 "
            f"(dev {c['statistic']:.4f} <= {c['threshold']:.4f}), seed 7",
        )

    def test_approximant_stationarity(self, suite_dir):
        payload = verdict(suite_dir, "approximant-stationarity")
        assert payload["config"]["seed"] == 7
        results = []
        for k, rate in enumerate([3.0, 4.0, 5.0, 6.0], start=1):
            c = check(payload, f"ks-gap-{k}")
            assert c["rate"] == rate
            results.append((c["pvalue"], c["pass"]))
        ok = all(p for _, p in results)
        report(
            "approximant-stationarity",
            bool(ok),
            "first 4 gap marginals KS p >= 0.001 vs rates (3,4,5,6): "
            + ", ".join(f"{p:.3f}" for p, _ in results),
        )

    def test_growth(self, suite_dir):
        payload = verdict(suite_dir, "growth")
        assert payload["config"]["seeds"] == 100 and payload["config"]["n"] == 10_000
        c = check(payload, "log-slope-band")
        assert c["band"] == [0.8, 1.2] and c["window"] == [3.0, 7.0]
        report(
            "growth",
            bool(c["pass"] and c["statistic"] >= 0.95),
            f"log N(x) slope in [0.8, 1.2] for {100 * c['statistic']:.0f}/100 seeded samples "
            f"(median slope {c['median_slope']:.3f})",
        )

    def test_singularity(self, suite_dir):
        payload = verdict(suite_dir, "singularity")
        config = payload["config"]
        assert (config["a"], config["a2"], config["n"], config["seeds"]) == (1.0, 2.0, 100_000, 20)
        own = check(payload, "own-parameter-limit")
        cross = check(payload, "cross-parameter-limit")
        sep = check(payload, "separation")
        assert own["threshold"] == 0.02 and cross["threshold"] == 0.03
        assert own["target"] == pytest.approx(-EULER_GAMMA, abs=1e-15)
        assert cross["target"] == pytest.approx(-EULER_GAMMA + math.log(2.0), abs=1e-15)
        ok = own["pass"] and cross["pass"] and sep["pass"]
        report(
            "singularity",
            bool(ok),
            f"all 20 seeds: |S(1) + gamma| <= 0.02 (worst {own['statistic']:.4f}), "
            f"|S(2) + gamma - log 2| <= 0.03 (worst {cross['statistic']:.4f}), "
            f"separation >= {sep['threshold']:.0f}x SE (min ratio {sep['statistic']:.0f})",
        )

    def test_local_time_reconstruction(self, suite_dir):
        payload = verdict(suite_dir, "ranked-decomposition")
        config = payload["config"]
        assert (config["N"], config["M"]) == (3, 1000)
        tol = 10 * math.sqrt(config["dt"])
        monotone = check(payload, "local-time-monotone")
        flat = check(payload, "local-time-flat-off-collisions")
        assert monotone["threshold"] == pytest.approx(-tol, rel=1e-12)
        assert flat["threshold"] == pytest.approx(tol, rel=1e-12)
        qv_checks = [check(payload, f"brownian-qv-rank-{k}") for k in (1, 2, 3)]
        assert all(c["threshold"] == 0.05 for c in qv_checks)
        replay = check(payload, "replay-bit-identical")
        ok = (
            monotone["pass"]
            and flat["pass"]
            and replay["pass"]
            and all(c["pass"] for c in qv_checks)
        )
        report(
            "local-time-reconstruction",
            bool(ok),
            f"10^3 trajectories: L nondecreasing within 10 sqrt(dt) "
            f"(min incr {monotone['statistic']:.2e}), flat off collisions "
            f"(max rate {flat['statistic']:.3f} <= {tol:.3f}), Brownian QV within 5% "
            f"(worst dev {max(c['statistic'] for c in qv_checks):.4f})",
        )

    def test_whole_suite_passes(self, suite_dir):
        names = [
            "finite-stationarity",
            "drift-identity",
            "theorem-b-drift",
            "approximant-stationarity",
            "growth",
            "singularity",
            "rbm-residual",
            "ranked-decomposition",
        ]
        failed = [n for n in names if verdict(suite_dir, n)["pass"] is not True]
        report(
            "full-verification-suite",
            not failed,
            "verify exited 0; all 8 experiments pass" if not failed else f"failed: {failed}",
        )
