"""Exit criteria. Each test records one PASS/FAIL line, printed after the run."""

import math
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from risfocus.cli import run
from risfocus.evaluation import aggregate, codebook, gain_map, leakage
from risfocus.ris import (
    RayPair,
    linear_codeword,
    linear_response,
    normalized_gain,
    response,
    unit_cell_factor,
)
from risfocus.scenario import paper_scenario
from risfocus.sdr import build_problem, opt_codeword

from conftest import ACCEPTANCE_LINES, WAVE, directions, quarter, random_direction, random_pair, summed_response
from oracles import quantized_optimum

SEEDS = range(20)


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def aligned_phase_error(a, b):
    rot = np.vdot(b, a)
    return float(np.max(np.abs(np.angle(a * np.conj(b) * np.exp(-1j * np.angle(rot))))))


def test_01_linear_peak_gain():
    rng = np.random.default_rng(101)
    g = quarter(7, 7)
    gbar = unit_cell_factor(g, WAVE)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        design = random_pair(rng)
        gain = normalized_gain(response(linear_codeword(g, WAVE, design), g, WAVE, design, gbar),
                               gbar, g.n)
        worst = max(worst, abs(gain - 1.0))
    elapsed = time.perf_counter() - start
    record(1, "linear peak gain", worst <= 1e-9 and elapsed < 1.0,
           f"max |gain - 1| = {worst:.2e} (tol 1e-9), {elapsed:.3f}s")


def test_02_closed_form_equivalence():
    rng = np.random.default_rng(202)
    g = quarter(7, 7)
    gbar = unit_cell_factor(g, WAVE)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        ray, design = random_pair(rng), random_pair(rng)
        closed = linear_response(g, WAVE, ray, design, gbar)
        direct = summed_response(linear_codeword(g, WAVE, design).coefficients, g, WAVE, ray,
                                 gbar)
        worst = max(worst, abs(closed - direct) / abs(direct))
    elapsed = time.perf_counter() - start
    record(2, "closed-form equivalence", worst <= 1e-9 and elapsed < 1.0,
           f"max relative error = {worst:.2e} (tol 1e-9), {elapsed:.3f}s")


def test_03_single_pair_tightness():
    rng = np.random.default_rng(303)
    start = time.perf_counter()
    worst_ratio, worst_phase = np.inf, 0.0
    for nx in (4, 7):
        g = quarter(nx, nx)
        gbar = unit_cell_factor(g, WAVE)
        for _ in range(5):
            t, r = random_direction(rng), random_direction(rng)
            sol = opt_codeword(g, WAVE, [t], [r], gbar)
            worst_ratio = min(worst_ratio, sol.gamma_restored / (gbar**2 * g.n**2))
            lin = linear_codeword(g, WAVE, RayPair(t, r))
            worst_phase = max(worst_phase,
                              aligned_phase_error(sol.codeword.coefficients, lin.coefficients))
    elapsed = time.perf_counter() - start
    record(3, "single-pair SDR tightness",
           worst_ratio >= 0.999 and worst_phase <= 1e-3 and elapsed < 30,
           f"min gamma/(gbar^2 N^2) = {worst_ratio:.6f} (>= 0.999), "
           f"max phase deviation = {worst_phase:.1e} rad (<= 1e-3), {elapsed:.2f}s")


def test_04_oracle_dominance():
    rng = np.random.default_rng(404)
    g = quarter(2, 2)
    start = time.perf_counter()
    worst = np.inf
    for k in range(20):
        n_inc, n_ref = [(1, 2), (2, 1), (1, 3), (3, 1)][k % 4]
        inc = [random_direction(rng) for _ in range(n_inc)]
        ref = [random_direction(rng) for _ in range(n_ref)]
        sol = opt_codeword(g, WAVE, inc, ref, 1.0)
        best = quantized_optimum(build_problem(g, WAVE, inc, ref, 1.0).constraint_vectors)
        worst = min(worst, sol.gamma_restored / best)
    elapsed = time.perf_counter() - start
    record(4, "oracle dominance (8-level grid, 4096 codewords)", worst >= 0.9 and elapsed < 60,
           f"min gamma_restored / quantized optimum = {worst:.4f} (>= 0.9), {elapsed:.2f}s")


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(directions, min_size=1, max_size=3), st.lists(directions, min_size=1, max_size=3),
       st.sampled_from([(1, 1), (2, 2), (3, 2), (4, 4)]))
def test_05_relaxation_bound_property(inc, ref, shape):
    g = quarter(*shape)
    sol = opt_codeword(g, WAVE, inc, ref, unit_cell_factor(g, WAVE))
    assert sol.gamma_restored <= sol.gamma_relaxed * (1 + 1e-6)


def test_05_relaxation_bound_paper_instances():
    worst = 0.0
    count = 0
    for seed in range(5):
        for nx, spread in ((7, 20), (10, 10)):
            scn = paper_scenario(seed, (nx, nx), math.radians(spread))
            for src in scn.ris_ids:
                for target in scn.targets(src):
                    sol = opt_codeword(scn.ris_node(src).geometry, scn.wave,
                                       scn.bs_arrivals(src), scn.departures(src, target))
                    worst = max(worst, sol.gamma_restored / sol.gamma_relaxed)
                    count += 1
    record(5, "relaxation bound", worst <= 1 + 1e-6,
           f"max gamma_restored/gamma_relaxed = {worst:.6f} over {count} paper instances "
           "(<= 1 + 1e-6; also enforced on every SdrSolution and by the property test)")


@pytest.fixture(scope="module")
def fig4_runs():
    out = []
    for seed in SEEDS:
        scn = paper_scenario(seed, (7, 7), math.radians(20))
        out.append({m: gain_map(scn, codebook(scn, 1, m)[3], 1, 3).min_gain
                    for m in ("linear", "opt")})
    return out


def test_06_fig4_min_gain_trend(fig4_runs):
    start = time.perf_counter()
    lin = np.mean([r["linear"] for r in fig4_runs])
    opt = np.mean([r["opt"] for r in fig4_runs])
    record(6, "opt beats linear on min-gain (N=7x7, 20 deg, RIS 1->3)", opt > lin,
           f"mean min-gain opt = {opt:.4f} vs linear = {lin:.4f} over {len(fig4_runs)} seeds")
    assert time.perf_counter() - start < 600


@pytest.fixture(scope="module")
def fig5_runs():
    out = []
    for seed in SEEDS:
        scn = paper_scenario(seed, (10, 10), math.radians(10))
        row = {}
        for m in ("linear", "opt"):
            code = codebook(scn, 1, m)[3]
            row[m] = (leakage(scn, code, 1, 3, 2).max_leak, leakage(scn, code, 1, 3, 4).max_leak)
        out.append(row)
    return out


def test_07_fig5a_leakage_to_ris2(fig5_runs):
    med = {m: float(np.median([r[m][0] for r in fig5_runs])) for m in ("linear", "opt")}
    record(7, "leakage towards RIS 2 (N=10x10, 10 deg)", all(v < 0.05 for v in med.values()),
           f"median max leak linear = {med['linear']:.4f}, opt = {med['opt']:.4f} (< 0.05)")


def test_08_fig5b_ris4_exceeds_ris2(fig5_runs):
    frac = float(np.mean([r["opt"][1] > r["opt"][0] for r in fig5_runs]))
    record(8, "opt leakage RIS 4 > RIS 2", frac >= 0.7,
           f"fraction of seeds = {frac:.2f} (>= 0.70)")


def test_09_determinism(tmp_path, monkeypatch):
    commands = [
        ["scenario", "gen", "--paper", "--seed", "5", "--nx", "6", "--nz", "6",
         "--delta-a-deg", "15"],
        ["codebook", "build", "--scenario", "scenario.json", "--source", "1", "--method", "both"],
        ["evaluate", "gains", "--scenario", "scenario.json", "--codebook", "codebook_ris1.json",
         "--source", "1", "--focus", "3"],
        ["evaluate", "leakage", "--scenario", "scenario.json", "--codebook",
         "codebook_ris1.json", "--source", "1", "--focus", "3", "--leak", "4"],
        ["aggregate", "--seeds", "1..2", "--nx", "4", "--nz", "4", "--delta-a-deg", "15"],
    ]
    outputs = []
    for name in ("first", "second"):
        d = tmp_path / name
        d.mkdir()
        monkeypatch.chdir(d)
        for cmd in commands:
            assert run(cmd) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    same = outputs[0] == outputs[1]
    record(9, "determinism", same and len(outputs[0]) >= 9,
           f"{len(outputs[0])} files byte-identical across two runs: {same}")


def test_10_linear_gain_narrows_with_size():
    lin7 = aggregate(SEEDS, ["linear"], (7, 7), math.radians(20))[0].mean_intended_gain
    lin10 = aggregate(SEEDS, ["linear"], (10, 10), math.radians(20))[0].mean_intended_gain
    record(10, "aggregate: mean linear intended gain falls from 7x7 to 10x10 (20 deg)",
           lin10 < lin7, f"{lin7:.4f} -> {lin10:.4f}")
