"""Benchmark harness: timed method comparisons and criteria cross tables."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .atoms import AtomSet
from .baselines import backward_select, exchange_select
from .criteria import CriterionSpec, build_info_state, phi_p_value
from .measures import Measure, measure_of_sample, round_to_sample
from .solvers import SolverConfig, efficiency_bounds, solve_hybrid

REFERENCE_GAP = 1e-8


def make_gaussian_pool(N: int, k: int, rng: np.random.Generator) -> AtomSet:
    """Regression pool with an intercept and k-1 standard normal features."""
    X = np.empty((N, k))
    X[:, 0] = 1.0
    X[:, 1:] = rng.standard_normal((N, k - 1))
    return AtomSet.from_vectors(X)


def _solve_reference(atoms: AtomSet, spec: CriterionSpec, n: int) -> Measure:
    cfg = SolverConfig(epsilon=1.0 / n, v=REFERENCE_GAP)
    return solve_hybrid(atoms, spec, cfg).w


def _phi_of_sample(atoms: AtomSet, spec: CriterionSpec, sample) -> float:
    w = measure_of_sample(sample, len(atoms))
    return phi_p_value(build_info_state(atoms, w.weights, spec), spec)


@dataclass
class BenchRow:
    method: str
    seconds: float
    efficiency: float
    certified: float
    phi_value: float
    note: str = ""


@dataclass
class BenchResult:
    N: int
    k: int
    n: int
    p: float
    rows: list[BenchRow] = field(default_factory=list)

    def row(self, method: str) -> BenchRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)


def run_bench(atoms: AtomSet, n: int, p: float = 0.0,
              methods=("hybrid", "exchange", "backward"),
              time_budget: float | None = None,
              solver_cfg: SolverConfig | None = None,
              reference: Measure | None = None) -> BenchResult:
    """Time each selection method and certify it against a tightly solved
    relaxation of the same instance.

    Methods expected to exceed ``time_budget`` seconds (when given) are
    skipped with an explanatory note instead of blocking the run.  A
    precomputed reference measure (solved to REFERENCE_GAP) avoids repeating
    the expensive certification solve across benchmarks of one instance.
    """
    spec = CriterionSpec(p=p)
    N = len(atoms)
    w_ref = reference if reference is not None else _solve_reference(atoms, spec, n)
    result = BenchResult(N=N, k=atoms.k, n=n, p=p)

    for method in methods:
        t0 = time.perf_counter()
        try:
            if method == "hybrid":
                cfg = solver_cfg if solver_cfg is not None else SolverConfig(epsilon=1.0 / n)
                if cfg.epsilon is None:
                    cfg = replace(cfg, epsilon=1.0 / n)
                res = solve_hybrid(atoms, spec, cfg)
                sample = round_to_sample(res.w, n, res.scores)
            elif method == "exchange":
                sample = exchange_select(atoms, n).sample
            elif method == "backward":
                if time_budget is not None and N * (N - n) * atoms.k > 5e11:
                    result.rows.append(BenchRow(method, float("nan"), float("nan"),
                                                float("nan"), float("nan"),
                                                note="skipped: over time budget"))
                    continue
                sample = backward_select(atoms, n).sample
            else:
                raise ValueError(f"unknown method {method!r}")
        except Exception as exc:  # record, keep benchmarking the rest
            result.rows.append(BenchRow(method, time.perf_counter() - t0,
                                        float("nan"), float("nan"), float("nan"),
                                        note=f"failed: {type(exc).__name__}"))
            continue
        seconds = time.perf_counter() - t0
        w_sample = measure_of_sample(sample, N)
        bounds = efficiency_bounds(w_sample, w_ref, atoms, spec)
        result.rows.append(BenchRow(method=method, seconds=seconds,
                                    efficiency=bounds.ratio,
                                    certified=bounds.certified_lower_bound,
                                    phi_value=_phi_of_sample(atoms, spec, sample)))
    return result


@dataclass
class CrossCriteriaRow:
    n: int
    a_eff_of_d: float
    d_eff_of_a: float


def run_cross_criteria(atoms: AtomSet, ns, v: float = REFERENCE_GAP) -> list[CrossCriteriaRow]:
    """How well does each criterion's optimum score under the other one?

    For each budget, solve the trace criterion (p = 1) and the determinant
    criterion (p = 0), then report the cross efficiencies; both are below
    one and climb toward it as the cap loosens.
    """
    d_spec = CriterionSpec(p=0.0)
    a_spec = CriterionSpec(p=1.0)
    rows = []
    for n in ns:
        cfg = SolverConfig(epsilon=1.0 / n, v=v)
        w_d = solve_hybrid(atoms, d_spec, cfg).w
        w_a = solve_hybrid(atoms, a_spec, cfg).w
        a_eff = efficiency_bounds(w_d, w_a, atoms, a_spec).ratio
        d_eff = efficiency_bounds(w_a, w_d, atoms, d_spec).ratio
        rows.append(CrossCriteriaRow(n=int(n), a_eff_of_d=a_eff, d_eff_of_a=d_eff))
    return rows
