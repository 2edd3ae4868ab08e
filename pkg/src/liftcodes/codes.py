"""Base codes, their lifts, membership, orbit-basis encoding and the four constructions."""

from __future__ import annotations

import json
import math
import threading
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .degrees import (
    ROW_MULTINOMIAL,
    DegreeSet,
    lift_degree_set_multivariate,
    lift_degree_set_univariate,
)
from .errors import GuardError, ParameterError, UsageError
from .gf import FieldCtx, field_for, rref
from .space import FuncTable, coefficient_array, domain_points, monomial_values, subspace_index_matrix

Checker = Callable[[np.ndarray], np.ndarray]

BY_DEGREES = "by_degrees"
BY_RESTRICTION = "by_restriction"


def orbit_basis_tables(ctx: FieldCtx, D: DegreeSet, value_order: int) -> tuple[np.ndarray, list[tuple]]:
    """An F_q-basis of Fam(D) as evaluation tables, one row per basis function.

    For each orbit representative d of size b and each element beta of a
    polynomial basis of F_{q^b}/F_q, the row is x -> sum_i (beta x^d)^(q^i), i < b.
    Returns the ``(dim, Q^m)`` table and the matching ``(d, b, beta)`` labels.
    """
    q = value_order
    rows, labels = [], []
    for rep, b in D.orbits():
        mono = monomial_values(ctx, rep)
        for beta in subfield_basis(ctx, q, b):
            rows.append(ctx.orbit_trace(ctx.mul(beta, mono), q, b))
            labels.append((rep, b, beta))
    if not rows:
        return np.zeros((0, ctx.Q**D.m), dtype=np.int64), labels
    return np.array(rows, dtype=np.int64), labels


def subfield_basis(ctx: FieldCtx, q: int, b: int) -> list[int]:
    """Powers 1, g, ..., g^(b-1) of a generator g of F_{q^b}; a basis over F_q."""
    gen = ctx.pow(ctx.primitive, (ctx.Q - 1) // (q**b - 1))
    out, cur = [], 1
    for _ in range(b):
        out.append(cur)
        cur = ctx.mul(cur, gen)
    return out


def _in_value_field(ctx: FieldCtx, values: np.ndarray, order: int) -> np.ndarray:
    if order == ctx.Q:
        return np.ones(values.shape[:-1], dtype=bool)
    return np.all(ctx.is_in_subfield(values, order), axis=-1)


@dataclass(frozen=True, eq=False)
class BaseCode:
    """A linear affine-invariant code {F_Q^t -> F_q} described by its degree set.

    ``checker`` optionally tests membership directly from values (batched over
    leading axes); ``rs_degree`` marks Reed-Solomon bases for the line decoder.
    """

    ctx: FieldCtx
    t: int
    value_order: int
    degrees: DegreeSet
    checker: Checker | None = None
    name: str = "custom"
    rs_degree: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        D = self.degrees
        if (D.Q, D.q, D.m) != (self.ctx.Q, self.value_order, self.t):
            raise UsageError("degree set does not match the base code's field or arity")
        if not D.is_q_shift_closed():
            raise UsageError("base degree set must be q-shift closed")

    @property
    def dimension(self) -> int:
        return len(self.degrees)

    @property
    def length(self) -> int:
        return self.ctx.Q**self.t

    def _forbidden_mask(self) -> np.ndarray:
        return _forbidden(self.ctx, self.degrees)

    def contains_by_degrees(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=np.int64)
        coeffs = coefficient_array(self.ctx, self.t, values)
        ok = ~np.any(coeffs[..., self._forbidden_mask()] != 0, axis=-1)
        return ok & _in_value_field(self.ctx, values, self.value_order)

    def contains(self, values) -> np.ndarray:
        """Membership for one table or a batch; uses the direct checker when present."""
        values = np.asarray(values, dtype=np.int64)
        if self.checker is None:
            return self.contains_by_degrees(values)
        return np.asarray(self.checker(values)) & _in_value_field(self.ctx, values, self.value_order)

    def basis(self) -> np.ndarray:
        return _cached_basis(self.ctx, self.degrees, self.value_order)

    def as_lift(self) -> "LiftedCode":
        return LiftedCode(self, self.t)

    def punctured_solver(self) -> "_PuncturedSolver":
        if "solver" not in self._cache:
            self._cache["solver"] = _PuncturedSolver(self)
        return self._cache["solver"]


_BASIS_CACHE: dict[tuple, np.ndarray] = {}


def _cached_basis(ctx: FieldCtx, D: DegreeSet, order: int) -> np.ndarray:
    key = (ctx, D, order)
    hit = _BASIS_CACHE.get(key)
    if hit is None:
        hit, _ = orbit_basis_tables(ctx, D, order)
        hit.flags.writeable = False
        _BASIS_CACHE[key] = hit
    return hit


def _forbidden(ctx: FieldCtx, D: DegreeSet) -> np.ndarray:
    mask = np.ones(ctx.Q**D.m, dtype=bool)
    if D.degrees:
        weights = ctx.Q ** np.arange(D.m - 1, -1, -1)
        idx = np.array(sorted(D.degrees), dtype=np.int64) @ weights
        mask[idx] = False
    return mask


class _PuncturedSolver:
    """Recover g in the base code from its values off the origin.

    Row-reducing [G | I], with G the basis evaluated at u != 0, gives a
    matrix T such that h is consistent iff the zero rows of T h vanish and
    the basis coefficients are the pivot rows of T h.
    """

    def __init__(self, base: BaseCode) -> None:
        ctx = base.ctx
        B = base.basis()
        G = B[:, 1:].T
        rows, cols = G.shape
        R, piv = rref(ctx, np.concatenate([G, np.eye(rows, dtype=np.int64)], axis=1))
        piv = [c for c in piv if c < cols]
        if len(piv) != cols:
            raise UsageError("base code is not determined by its values off the origin")
        self.base = base
        self.ctx = ctx
        self.T_coef = R[: len(piv), cols:]
        self.T_check = R[len(piv):, cols:]
        self.basis = B

    def solve(self, h) -> np.ndarray | None:
        """The unique codeword agreeing with ``h`` (values at u != 0), or None."""
        ctx = self.ctx
        h = np.asarray(h, dtype=np.int64)
        if self.T_check.size and np.any(ctx.dot(self.T_check, h[None, :]) != 0):
            return None
        alpha = ctx.dot(self.T_coef, h[None, :])
        if alpha.size == 0:
            return np.zeros(self.basis.shape[1], dtype=np.int64)
        return ctx.sum(ctx.mul(alpha[:, None], self.basis), axis=0)


# -- base code constructors ---------------------------------------------------


def _parity_checker(ctx: FieldCtx) -> Checker:
    return lambda values: ctx.sum(values, axis=-1) == 0


def base_parity_univariate(Q: int, q: int = 2) -> BaseCode:
    """{f : F_Q -> F_q with sum of all values 0}; degree set {0..Q-2}."""
    ctx = field_for(Q, q)
    D = DegreeSet.univariate(Q, q, range(Q - 1))
    return BaseCode(ctx, 1, q, D, _parity_checker(ctx), name="parity")


def base_parity_multivariate(Q: int, t: int, q: int = 2) -> BaseCode:
    """Parity on F_Q^t: every degree vector except (Q-1, ..., Q-1)."""
    if t < 1:
        raise UsageError("t must be positive")
    ctx = field_for(Q, q)
    top = (Q - 1,) * t
    pts = domain_points(ctx, t)
    D = DegreeSet(Q, q, t, (tuple(d) for d in pts.tolist() if tuple(d) != top))
    return BaseCode(ctx, t, q, D, _parity_checker(ctx), name="parity" if t == 1 else "parity-multi")


def base_reed_solomon(Q: int, d: int) -> BaseCode:
    """F_Q-valued univariate polynomials of degree at most d."""
    if not 0 <= d <= Q - 2:
        raise UsageError(f"Reed-Solomon degree bound must satisfy 0 <= d <= Q-2, got d={d}")
    ctx = field_for(Q, Q)
    D = DegreeSet.univariate(Q, Q, range(d + 1))
    return BaseCode(ctx, 1, Q, D, name="reed-solomon", rs_degree=d)


def base_from_degrees(Q: int, q: int, degrees, t: int = 1, name: str = "degrees") -> BaseCode:
    """Fam(D) for an arbitrary q-shift closed D."""
    ctx = field_for(Q, q)
    D = DegreeSet.univariate(Q, q, degrees) if t == 1 else DegreeSet(Q, q, t, degrees)
    return BaseCode(ctx, t, q, D, name=name)


# -- lifted codes -----------------------------------------------------------


class LiftedCode:
    """Lift_m of a base code.  The degree set and basis are computed once, on demand."""

    def __init__(self, base: BaseCode, m: int, relation: str = ROW_MULTINOMIAL) -> None:
        if m < base.t:
            raise UsageError(f"lift dimension m={m} is smaller than the base arity t={base.t}")
        self.base = base
        self.m = m
        self.relation = relation
        self._lock = threading.Lock()
        self._degree_set: DegreeSet | None = None

    @property
    def ctx(self) -> FieldCtx:
        return self.base.ctx

    @property
    def t(self) -> int:
        return self.base.t

    @property
    def value_order(self) -> int:
        return self.base.value_order

    @property
    def length(self) -> int:
        return self.ctx.Q**self.m

    @property
    def degree_set(self) -> DegreeSet:
        with self._lock:
            if self._degree_set is None:
                D = self.base.degrees
                if self.m == self.t:
                    self._degree_set = D
                elif self.t == 1:
                    self._degree_set = lift_degree_set_univariate(D, self.m)
                else:
                    self._degree_set = lift_degree_set_multivariate(D, self.m, relation=self.relation)
            return self._degree_set

    @property
    def dimension(self) -> int:
        return len(self.degree_set)

    def orbits(self) -> list[tuple[tuple[int, ...], int]]:
        return self.degree_set.orbits()

    def basis(self) -> np.ndarray:
        """F_q-basis of the code as a ``(dim, Q^m)`` table."""
        return _cached_basis(self.ctx, self.degree_set, self.value_order)

    # -- membership --------------------------------------------------------

    def contains(self, values, mode: str = BY_DEGREES) -> np.ndarray:
        """Batched membership of value tables shaped ``(..., Q^m)``."""
        values = np.asarray(values, dtype=np.int64)
        if values.shape[-1] != self.length:
            raise UsageError("value table has the wrong length for this code")
        if mode == BY_DEGREES:
            coeffs = coefficient_array(self.ctx, self.m, values)
            bad = coeffs[..., _forbidden(self.ctx, self.degree_set)] != 0
            return ~np.any(bad, axis=-1) & _in_value_field(self.ctx, values, self.value_order)
        if mode == BY_RESTRICTION:
            idx = subspace_index_matrix(self.ctx, self.m, self.t)
            return np.all(self.base.contains(values[..., idx]), axis=-1)
        raise UsageError(f"unknown membership mode {mode!r}")

    def member(self, f: FuncTable, mode: str = BY_DEGREES) -> bool:
        if f.ctx != self.ctx or f.m != self.m:
            raise UsageError("function domain does not match the code")
        return bool(self.contains(f.values, mode))

    # -- encoding ----------------------------------------------------------

    def message_fields(self) -> list[tuple[tuple[int, ...], int]]:
        """(orbit representative, order of the coefficient field) per message slot."""
        return [(rep, self.value_order**b) for rep, b in self.orbits()]

    def encode(self, message: Sequence[int]) -> FuncTable:
        """sum over orbits of x -> sum_i (f_d x^d)^(q^i), with f_d in F_{q^b}."""
        ctx, q = self.ctx, self.value_order
        orbits = self.orbits()
        if len(message) != len(orbits):
            raise UsageError(f"message needs {len(orbits)} coefficients, got {len(message)}")
        acc = np.zeros(self.length, dtype=np.int64)
        for (rep, b), coef in zip(orbits, message):
            coef = int(coef)
            if not 0 <= coef < ctx.Q or not ctx.is_in_subfield(coef, q**b):
                raise UsageError(f"coefficient {coef} for orbit {rep} must lie in F_{q**b}")
            if coef:
                term = ctx.orbit_trace(ctx.mul(coef, monomial_values(ctx, rep)), q, b)
                acc = ctx.add(acc, term)
        return FuncTable(ctx, self.m, acc, q, check=False)

    def random_message(self, rng: np.random.Generator) -> list[int]:
        out = []
        for _, order in self.message_fields():
            out.append(int(rng.choice(self.ctx.subfield_elements(order))))
        return out

    def random_codeword(self, rng: np.random.Generator) -> FuncTable:
        """Uniform codeword: a uniform F_q-combination of the basis."""
        B = self.basis()
        elems = self.ctx.subfield_elements(self.value_order)
        alpha = elems[rng.integers(0, elems.size, size=B.shape[0])]
        vals = self.ctx.sum(self.ctx.mul(alpha[:, None], B), axis=0) if B.shape[0] else np.zeros(self.length, dtype=np.int64)
        return FuncTable(self.ctx, self.m, vals, self.value_order, check=False)

    def codewords(self, limit: int = 1 << 20) -> np.ndarray:
        """All codewords as a ``(q^dim, Q^m)`` array (guarded by ``limit``)."""
        return enumerate_span(self.ctx, self.basis(), self.value_order, limit)

    def descriptor(self, theorem: int | None = None, locality: int | None = None) -> dict:
        D = self.base.degrees
        return {
            "theorem": theorem,
            "p": self.ctx.p,
            "q": self.value_order,
            "Q": self.ctx.Q,
            "t": self.t,
            "m": self.m,
            "D": [list(d) if len(d) > 1 else d[0] for d in D],
            "dim": self.dimension,
            "locality": self.ctx.Q**self.t - 1 if locality is None else locality,
        }

    def __repr__(self) -> str:
        return f"LiftedCode(base={self.base.name}, Q={self.ctx.Q}, q={self.value_order}, t={self.t}, m={self.m})"


def lift(base: BaseCode, m: int) -> LiftedCode:
    return LiftedCode(base, m)


def enumerate_span(ctx: FieldCtx, basis: np.ndarray, q: int, limit: int = 1 << 20) -> np.ndarray:
    """Every F_q-combination of the rows of ``basis``."""
    k, n = basis.shape
    if q**k > limit:
        raise GuardError(f"{q}^{k} codewords exceed the enumeration limit {limit}")
    elems = ctx.subfield_elements(q)
    words = np.zeros((1, n), dtype=np.int64)
    for row in basis:
        scaled = ctx.mul(elems[:, None], row[None, :])
        words = ctx.add(words[None, :, :], scaled[:, None, :]).reshape(-1, n)
    return words


# -- the four constructions ---------------------------------------------------


@dataclass
class ConstructionParams:
    """Derived parameters of one construction, plus its claimed dimension bound."""

    theorem: int
    p: int
    q: int
    Q: int
    m: int
    t: int
    N: int
    ell: int | None = None
    s: int | None = None
    k: int | None = None
    eps: float | None = None
    delta: float | None = None
    N0: int | None = None
    b: int | None = None
    c: int | None = None
    gamma: Fraction | None = None
    tau: Fraction | None = None
    d: int | None = None
    c_k: Fraction | None = None
    eps_prime: float | None = None
    locality: int = 0
    radius: Fraction = Fraction(0)
    dim_bound: float | int | None = None
    dim_exact: int | None = None
    bound_source: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            if isinstance(val, Fraction):
                val = {"num": val.numerator, "den": val.denominator, "value": float(val)}
            out[key] = val
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _ceil_log2(x: float) -> int:
    if x <= 1:
        return 0
    return math.ceil(math.log2(x) - 1e-12)


def _ceil_log(x: float, base: int) -> int:
    k = 0
    while base**k < x:
        k += 1
    return k


def construct(theorem: int, **inputs) -> tuple[ConstructionParams, LiftedCode]:
    """Derive parameters and build the code for theorem 1, 2, 3 or 4."""
    builders = {1: _construct_one, 2: _construct_two, 3: _construct_three, 4: _construct_four}
    if theorem not in builders:
        raise UsageError(f"theorem must be one of 1-4, got {theorem}")
    return builders[theorem](**{k: v for k, v in inputs.items() if v is not None})


def _require_int(name: str, value) -> int:
    if value is None:
        raise UsageError(f"missing required input {name!r}")
    if int(value) != value:
        raise UsageError(f"{name} must be an integer")
    return int(value)


def _construct_one(k: int | None = None, ell: int | None = None, m: int | None = None) -> tuple[ConstructionParams, LiftedCode]:
    if k is None and ell is None:
        raise UsageError("theorem 1 needs k (= Q = 2^ell) or ell")
    if k is not None:
        k = _require_int("k", k)
        ell = int(math.log2(k)) if k > 0 else -1
        if k < 2 or 2**ell != k:
            raise ParameterError("k = 2^ell", f"k={k}")
    ell = _require_int("ell", ell)
    if ell < 1:
        raise ParameterError("ell >= 1")
    m = _require_int("m", m)
    if m < 1:
        raise ParameterError("m >= 1")
    Q = 2**ell
    code = lift(base_parity_univariate(Q, 2), m)
    c_k = Fraction(1, Q ** (Q - 2) * math.factorial(Q))
    params = ConstructionParams(
        theorem=1, p=2, q=2, Q=Q, m=m, t=1, N=Q**m, ell=ell, k=Q, c_k=c_k,
        locality=Q - 1, radius=Fraction(1, 3 * Q),
        dim_bound=math.comb(m, Q - 2), bound_source="dimension >= C(m, Q-2)",
        extra={"ltc_queries": Q, "ltc_distance": float(Fraction(1, Q))},
    )
    return params, code


def _construct_two(eps: float | None = None, p: int = 2, N0: int | None = None,
                   ell: int | None = None, m: int | None = None) -> tuple[ConstructionParams, LiftedCode]:
    if m is None:
        if eps is None or not 0 < eps <= 1:
            raise UsageError("theorem 2 needs 0 < eps <= 1 (or an explicit m)")
        m = math.ceil(1 / eps - 1e-12)
    m = _require_int("m", m)
    if ell is None:
        if N0 is None:
            raise UsageError("theorem 2 needs N0 (or an explicit ell)")
        ell = max(1, _ceil_log(N0, p**m))
    ell = _require_int("ell", ell)
    if ell < 1 or m < 1:
        raise ParameterError("ell >= 1 and m >= 1")
    Q = p**ell
    N = Q**m
    if N0 is not None and N < N0:
        raise ParameterError("p^(m ell) >= N0", f"N={N} < N0={N0}")
    code = lift(base_parity_univariate(Q, p), m)
    block = 1 + _ceil_log(m, p)
    if ell >= block:
        nonmembers = (p ** (m * block) - 1) ** (ell // block) * p ** (m * (ell - block * (ell // block)))
        bound = N - nonmembers
    else:
        bound = 0
    eps_prime = 1 / (m * block * p ** (m * block))
    params = ConstructionParams(
        theorem=2, p=p, q=p, Q=Q, m=m, t=1, N=N, ell=ell, eps=eps, N0=N0, b=block,
        eps_prime=eps_prime, locality=Q - 1, radius=Fraction(1, 3 * Q), dim_bound=bound,
        bound_source="N minus vectors with no all-zero block of 1+ceil(log_p m) digits",
        extra={"ltc_queries": Q},
    )
    return params, code


def _construct_three(eps: float | None = None, ell: int | None = None, m: int | None = None) -> tuple[ConstructionParams, LiftedCode]:
    if ell is None:
        if eps is None or not 0 < eps < 1:
            raise UsageError("theorem 3 needs 0 < eps < 1 (or an explicit ell)")
        ell = max(1, _ceil_log2(1 / eps))
    ell = _require_int("ell", ell)
    m = _require_int("m", m)
    if m < 2:
        raise ParameterError("m >= 2 (so that t = m-1 >= 1)")
    if ell < 1:
        raise ParameterError("ell >= 1")
    Q = 2**ell
    t = m - 1
    code = lift(base_parity_multivariate(Q, t, 2), m)
    exact = 2 ** (m * ell) - (m + 1) ** ell
    params = ConstructionParams(
        theorem=3, p=2, q=2, Q=Q, m=m, t=t, N=Q**m, ell=ell, eps=eps,
        locality=Q**t - 1, radius=Fraction(1, 3 * Q**t), dim_bound=exact, dim_exact=exact,
        bound_source="dimension = 2^(m ell) - (m+1)^ell",
        extra={"ltc_queries": Q**t},
    )
    return params, code


def _construct_four(delta: float | None = None, eps: float | None = None, N0: int | None = None,
                    s: int | None = None, m: int | None = None, c: int | None = None) -> tuple[ConstructionParams, LiftedCode]:
    if m is None:
        if delta is None or not 0 < delta <= 1:
            raise UsageError("theorem 4 needs 0 < delta <= 1 (or an explicit m)")
        m = math.ceil(1 / delta - 1e-12)
    m = _require_int("m", m)
    if m < 1:
        raise ParameterError("m >= 1")
    if s is None:
        if N0 is None or delta is None:
            raise UsageError("theorem 4 needs N0 and delta (or an explicit s)")
        s = max(1, math.ceil(math.log2(N0 ** (delta)) - 1e-12))
    s = _require_int("s", s)
    b = 1 + _ceil_log2(m)
    if c is None:
        if eps is None or not 0 < eps < 1:
            raise UsageError("theorem 4 needs 0 < eps < 1 (or an explicit c)")
        c = math.ceil(b * 2 ** (b * m) * math.log2(1 / eps) - 1e-9)
    c = _require_int("c", c)
    if c < 1:
        raise ParameterError("c >= 1")
    if c > s:
        raise ParameterError("c <= s", f"c={c}, s={s}: d = (1 - 2^-c) Q is not an integer")
    if c == s:
        raise ParameterError("c < s", f"c=s={s} gives d = Q-1 and the base code is everything")
    if 2**s > 1 << 16:
        raise ParameterError("Q = 2^s <= 2^16", f"s={s}")
    Q = 2**s
    d = Q - 2 ** (s - c)
    gamma = Fraction(1, 2**c)
    tau = gamma / 6
    N = Q**m
    lemma_bound = N * (1 - (1 - Fraction(1, 2 ** (m * b))) ** (c // b))
    if m == 2:
        frac = (Fraction(4**c) - Fraction(5, 4) * 3**c + Fraction(1, 4)) / 4**c
        bound, source = frac * N, "dimension >= ((4^c - (5/4) 3^c + 1/4) / 4^c) N"
    else:
        bound, source = lemma_bound, "dimension >= (1 - (1 - 2^(-mb))^floor(c/b)) N"
    code = lift(base_reed_solomon(Q, d), m)
    params = ConstructionParams(
        theorem=4, p=2, q=Q, Q=Q, m=m, t=1, N=N, s=s, eps=eps, delta=delta, N0=N0, b=b, c=c,
        gamma=gamma, tau=tau, d=d, locality=Q, radius=tau,
        dim_bound=float(bound), bound_source=source,
        extra={"lemma_bound": float(lemma_bound)},
    )
    return params, code
