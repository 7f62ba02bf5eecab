"""Gain maps, leakage toward unintended RISs, and seed-averaged reports."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .ris import PhaseVector, linear_codebook, normalized_gain, response_matrix
from .scenario import Scenario, paper_scenario
from .sdr import DEFAULT_TOL, opt_codebook

METHODS = ("linear", "opt")


@dataclass(frozen=True, eq=False)
class GainMap:
    """Normalised gains indexed ``[l2, l1]``: BS ray l2 at the source, ray l1 to the target."""

    source: object
    focus_target: object
    entries: np.ndarray
    method: str | None = None

    @property
    def min_gain(self) -> float:
        return float(self.entries.min())

    @property
    def mean_gain(self) -> float:
        return float(self.entries.mean())


@dataclass(frozen=True, eq=False)
class LeakageReport:
    source: object
    focus_target: object
    leak_target: object
    entries: np.ndarray
    method: str | None = None

    @property
    def max_leak(self) -> float:
        return float(self.entries.max())


@dataclass(frozen=True)
class AggregateReport:
    method: str
    spread: float
    n_elements: tuple[int, int]
    mean_intended_gain: float
    mean_leakage: float
    mean_min_gain: float
    mean_combined: float
    seed_count: int


def _map(scenario: Scenario, codeword: PhaseVector, source, target) -> np.ndarray:
    node = scenario.ris_node(source)
    if codeword.geometry.n != node.geometry.n:
        raise ValueError(f"codeword size {len(codeword)} does not match RIS {source} "
                         f"({node.geometry.n} elements)")
    grid = scenario.ray_pairs(source, target)
    flat = [pair for row in grid for pair in row]
    g = scenario.gbar(source)
    vals = g * (response_matrix(node.geometry, scenario.wave, flat) @ codeword.coefficients)
    return normalized_gain(vals, g, node.geometry.n).reshape(len(grid), len(grid[0]))


def gain_map(scenario: Scenario, codeword: PhaseVector, source, focus_target,
             method: str | None = None) -> GainMap:
    return GainMap(source, focus_target, _map(scenario, codeword, source, focus_target), method)


def leakage(scenario: Scenario, codeword: PhaseVector, source, focus_target, leak_target,
            method: str | None = None) -> LeakageReport:
    if leak_target == focus_target:
        raise ValueError("leak target must differ from the focus target")
    if leak_target == source:
        raise ValueError("leak target must differ from the source")
    return LeakageReport(source, focus_target, leak_target,
                         _map(scenario, codeword, source, leak_target), method)


def codebook(scenario: Scenario, source, method: str, tol: float = DEFAULT_TOL) -> dict:
    """Codebook of ``source`` keyed by target id, built with ``method``."""
    if method == "linear":
        node = scenario.ris_node(source)
        return linear_codebook(node.geometry, scenario.wave,
                               ((t, scenario.design_pair(source, t))
                                for t in scenario.targets(source)))
    if method == "opt":
        return opt_codebook(scenario, source, tol)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def scenario_maps(scenario: Scenario, method: str, tol: float = DEFAULT_TOL):
    """All intended gain maps and leakage maps of one scenario.

    Returns ``(intended, leaks)``: lists of :class:`GainMap` (one per ordered
    RIS pair) and :class:`LeakageReport` (one per unintended triple).
    """
    intended, leaks = [], []
    for src in scenario.ris_ids:
        book = codebook(scenario, src, method, tol)
        for focus, code in book.items():
            intended.append(gain_map(scenario, code, src, focus, method))
            for other in scenario.targets(src):
                if other != focus:
                    leaks.append(leakage(scenario, code, src, focus, other, method))
    return intended, leaks


def aggregate(seeds: Iterable[int], methods: Sequence[str] = METHODS,
              n_elements: tuple[int, int] = (7, 7), spread: float = math.radians(10.0),
              tol: float = DEFAULT_TOL,
              family: Callable[..., Scenario] = paper_scenario) -> list[AggregateReport]:
    """Uniform averages over seeds, ordered RIS pairs and ray pairs, one report per method.

    ``mean_combined`` averages every intended and leakage entry together.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    sums = {m: np.zeros(4) for m in methods}
    counts = {m: np.zeros(4) for m in methods}
    for seed in seeds:
        scn = family(seed, n_elements, spread)
        for m in methods:
            intended, leaks = scenario_maps(scn, m, tol)
            gi = np.concatenate([gm.entries.ravel() for gm in intended])
            gl = (np.concatenate([lk.entries.ravel() for lk in leaks])
                  if leaks else np.zeros(0))
            mins = np.array([gm.min_gain for gm in intended])
            sums[m] += [gi.sum(), gl.sum(), mins.sum(), gi.sum() + gl.sum()]
            counts[m] += [gi.size, gl.size, mins.size, gi.size + gl.size]
    out = []
    for m in methods:
        with np.errstate(invalid="ignore"):
            means = sums[m] / counts[m]
        means = np.where(counts[m] > 0, means, 0.0)
        out.append(AggregateReport(m, float(spread), tuple(n_elements), *map(float, means),
                                   len(seeds)))
    return out
