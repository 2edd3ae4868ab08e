"""Local correction and local testing, with a Berlekamp-Welch Reed-Solomon decoder."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codes import LiftedCode
from .errors import DecodeFailure, UsageError
from .gf import FieldCtx, solve
from .space import FuncTable, coefficient_array, domain_points, point_index, random_subspace_through

SCENARIO_CORRECT_GENERIC = "correct_generic"
SCENARIO_CORRECT_RS = "correct_rs"
SCENARIO_TEST = "test"
SCENARIO_TEST_RANDOM = "test_random"
SCENARIOS = (SCENARIO_CORRECT_GENERIC, SCENARIO_CORRECT_RS, SCENARIO_TEST, SCENARIO_TEST_RANDOM)

MAX_ATTEMPTS = 3


class OracleFunction:
    """Query access to a function on F_Q^m that counts every query."""

    def __init__(self, f: FuncTable) -> None:
        self.f = f
        self.queries = 0

    @property
    def ctx(self) -> FieldCtx:
        return self.f.ctx

    def query(self, point: Sequence[int]) -> int:
        self.queries += 1
        return int(self.f.values[point_index(self.f.ctx, point)])

    def query_indices(self, indices) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        self.queries += indices.size
        return self.f.values[indices]


@dataclass
class CorrectorReport:
    value: int | None
    queries: int
    attempts: int
    subspace: dict | None = None
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.value is not None


# -- Reed-Solomon ------------------------------------------------------------


def poly_eval(ctx: FieldCtx, coeffs: Sequence[int], x) -> np.ndarray:
    """Horner evaluation of sum c_i x^i at x (array)."""
    x = np.asarray(x, dtype=np.int64)
    acc = np.zeros_like(x)
    for c in reversed(list(coeffs)):
        acc = ctx.add(ctx.mul(acc, x), int(c))
    return acc


def _poly_divmod(ctx: FieldCtx, num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    num = list(num)
    while len(den) > 1 and den[-1] == 0:
        den = den[:-1]
    lead_inv = ctx.inv(den[-1])
    out = [0] * max(1, len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = ctx.mul(num[i + len(den) - 1], lead_inv)
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] = ctx.sub(num[i + j], ctx.mul(c, dj))
    return out, num[: len(den) - 1]


def rs_radius(Q: int, d: int) -> int:
    return (Q - d - 1) // 2


def rs_decode(ctx: FieldCtx, values: Sequence[int], d: int) -> list[int]:
    """Berlekamp-Welch decoding of a word indexed by all of F_Q in canonical order.

    Returns the d+1 coefficients of the unique polynomial of degree <= d
    within distance floor((Q-d-1)/2); raises :class:`DecodeFailure` otherwise.
    """
    Q = ctx.Q
    y = np.asarray(values, dtype=np.int64)
    if y.shape != (Q,):
        raise UsageError(f"expected {Q} received symbols")
    if not 0 <= d <= Q - 1:
        raise UsageError("degree bound out of range")
    e = rs_radius(Q, d)
    xs = np.arange(Q, dtype=np.int64)
    coeffs = coefficient_array(ctx, 1, y)
    if not np.any(coeffs[d + 1 :]):
        return [int(c) for c in coeffs[: d + 1]]
    if e == 0:
        raise DecodeFailure("received word is not a codeword and the radius is 0")
    # Unknowns: E_0..E_{e-1} (E monic of degree e), N_0..N_{e+d}.
    powers = np.stack([ctx.pow(xs, j) for j in range(e + d + 1)], axis=1)
    A = np.concatenate([ctx.neg(ctx.mul(y[:, None], powers[:, :e])), powers], axis=1)
    rhs = ctx.mul(y, powers[:, e])
    sol = solve(ctx, A, rhs)
    if sol is None:
        raise DecodeFailure("no error locator within the decoding radius")
    E = [int(c) for c in sol[:e]] + [1]
    N = [int(c) for c in sol[e:]]
    g, rem = _poly_divmod(ctx, N, E)
    if any(rem):
        raise DecodeFailure("error locator does not divide the key polynomial")
    g = (g + [0] * (d + 1))[: d + 1]
    if np.count_nonzero(poly_eval(ctx, g, xs) != y) > e:
        raise DecodeFailure("candidate lies outside the decoding radius")
    return g


# -- correctors and tester ---------------------------------------------------


def correct_generic(f: OracleFunction, x: Sequence[int], code: LiftedCode, rng: np.random.Generator,
                    attempts: int = MAX_ATTEMPTS) -> CorrectorReport:
    """Decode f(x) from a random t-dimensional subspace through x.

    Each attempt queries the Q^t - 1 points of the subspace other than x,
    finds the unique base codeword g agreeing there and returns g(0).
    An inconsistent subspace triggers a fresh sample, at most ``attempts`` times.
    """
    ctx = code.ctx
    solver = code.base.punctured_solver()
    used = 0
    for attempt in range(1, attempts + 1):
        V = random_subspace_through(ctx, tuple(x), code.t, rng)
        idx = V.indices()[1:]
        before = f.queries
        h = f.query_indices(idx)
        used = max(used, f.queries - before)
        g = solver.solve(h)
        if g is not None:
            return CorrectorReport(int(g[0]), used, attempt, {"base": V.base, "basis": V.basis})
    return CorrectorReport(None, used, attempts, failure="no consistent base codeword")


def random_nonzero_vector(ctx: FieldCtx, m: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        b = rng.integers(0, ctx.Q, size=m)
        if np.any(b):
            return b


def correct_rs_lifted(f: OracleFunction, x: Sequence[int], code: LiftedCode, rng: np.random.Generator,
                      degree: int | None = None) -> CorrectorReport:
    """Line decoder: read f on the line {x + t b}, Reed-Solomon decode, output g(0).

    Uses exactly Q queries; a decoding failure is reported, not retried.
    """
    ctx = code.ctx
    d = code.base.rs_degree if degree is None else degree
    if d is None or code.t != 1:
        raise UsageError("the line decoder needs a lifted Reed-Solomon code")
    b = random_nonzero_vector(ctx, code.m, rng)
    ts = np.arange(ctx.Q, dtype=np.int64)
    pts = ctx.add(np.array(x, dtype=np.int64)[None, :], ctx.mul(ts[:, None], b[None, :]))
    before = f.queries
    h = f.query_indices(point_index(ctx, pts))
    used = f.queries - before
    line = {"base": tuple(int(c) for c in x), "basis": (tuple(int(c) for c in b),)}
    try:
        g = rs_decode(ctx, h, d)
    except DecodeFailure as exc:
        return CorrectorReport(None, used, 1, line, failure=str(exc))
    return CorrectorReport(int(g[0]), used, 1, line)


def test_local(f: OracleFunction, code: LiftedCode, rng: np.random.Generator) -> bool:
    """Query a uniformly random t-dimensional affine subspace; accept iff f|_V is in the base code."""
    ctx = code.ctx
    x = rng.integers(0, ctx.Q, size=code.m)
    V = random_subspace_through(ctx, tuple(int(c) for c in x), code.t, rng)
    vals = f.query_indices(V.indices())
    return bool(code.base.contains(vals))


test_local.__test__ = False  # not a pytest test


# -- Monte Carlo ---------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per (seed, trial), so any execution order gives the same results."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def corrupt(f: FuncTable, errors: int, rng: np.random.Generator) -> tuple[FuncTable, np.ndarray]:
    """Replace ``errors`` distinct random positions by different random values of the value field."""
    if not 0 <= errors <= f.size:
        raise UsageError(f"cannot corrupt {errors} of {f.size} positions")
    ctx = f.ctx
    positions = np.sort(rng.choice(f.size, size=errors, replace=False)) if errors else np.zeros(0, dtype=np.int64)
    elems = ctx.subfield_elements(f.value_order)
    offsets = elems[1:][rng.integers(0, elems.size - 1, size=errors)]
    vals = f.values.copy()
    vals[positions] = ctx.add(vals[positions], offsets)
    return FuncTable(ctx, f.m, vals, f.value_order, check=False), positions


@dataclass
class MonteCarloReport:
    scenario: str
    trials: int
    successes: int
    seed: int
    errors: int
    queries_max: int = 0
    failures: int = 0
    target: str | None = None
    per_trial: list[dict] = field(default_factory=list, repr=False)

    @property
    def frequency(self) -> float | None:
        return self.successes / self.trials if self.trials else None

    @property
    def ci95(self) -> list[float] | None:
        return list(wilson_interval(self.successes, self.trials)) if self.trials else None

    @property
    def stderr(self) -> float:
        p = self.frequency or 0.0
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else 0.0

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "trials": self.trials,
            "successes": self.successes,
            "frequency": self.frequency,
            "ci95": self.ci95,
            "queries_max": self.queries_max,
            "seed": self.seed,
            "errors": self.errors,
            "failures": self.failures,
            "target": self.target,
        }


def monte_carlo(code: LiftedCode, scenario: str, error_count: int, trials: int, seed: int,
                target: str = "random", keep_trials: bool = False) -> MonteCarloReport:
    """Run a seeded experiment.

    Each trial draws a uniform codeword and corrupts ``error_count`` positions.
    ``correct_*`` scenarios decode one target point (a corrupted one when
    ``target='corrupted'`` and errors exist, else uniform) and succeed on the
    true value.  ``test`` counts acceptances of corrupted codewords and
    ``test_random`` counts acceptances of uniformly random functions.
    """
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}")
    if target not in ("corrupted", "random"):
        raise UsageError("target must be 'corrupted' or 'random'")
    report = MonteCarloReport(scenario, trials, 0, seed, error_count,
                              target=target if scenario.startswith("correct") else None)
    pts = domain_points(code.ctx, code.m)
    for i in range(trials):
        rng = trial_rng(seed, i)
        if scenario == SCENARIO_TEST_RANDOM:
            elems = code.ctx.subfield_elements(code.value_order)
            received = FuncTable(code.ctx, code.m, elems[rng.integers(0, elems.size, size=code.length)],
                                 code.value_order, check=False)
        else:
            word = code.random_codeword(rng)
            received, positions = corrupt(word, error_count, rng)
        oracle = OracleFunction(received)
        row: dict = {"trial": i}
        if scenario in (SCENARIO_TEST, SCENARIO_TEST_RANDOM):
            ok = test_local(oracle, code, rng)
            report.queries_max = max(report.queries_max, oracle.queries)
        else:
            if target == "corrupted" and positions.size:
                where = int(positions[rng.integers(0, positions.size)])
            else:
                where = int(rng.integers(0, code.length))
            x = tuple(int(c) for c in pts[where])
            if scenario == SCENARIO_CORRECT_GENERIC:
                res = correct_generic(oracle, x, code, rng)
            else:
                res = correct_rs_lifted(oracle, x, code, rng)
            ok = res.ok and res.value == int(word.values[where])
            report.failures += not res.ok
            report.queries_max = max(report.queries_max, res.queries)
            row["target"] = where
        report.successes += bool(ok)
        row["success"] = bool(ok)
        if keep_trials:
            report.per_trial.append(row)
    return report
