"""Functions F_Q^m -> F_q as dense tables, plus affine subspaces and maps.

Points of F_Q^m are indexed row-major: ``(x_1, ..., x_m)`` sits at
``x_1 Q^(m-1) + ... + x_m``.  Degree vectors use the same layout, so a
coefficient array and a value array have the same shape.
"""

from __future__ import annotations

import functools
import itertools
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import UsageError
from .gf import FieldCtx, get_field, rank

Point = tuple[int, ...]


@functools.lru_cache(maxsize=64)
def domain_points(ctx: FieldCtx, m: int) -> np.ndarray:
    """All points of F_Q^m as a read-only ``(Q^m, m)`` array in canonical order."""
    Q = ctx.Q
    if m == 0:
        pts = np.zeros((1, 0), dtype=np.int64)
    else:
        pts = np.stack(np.unravel_index(np.arange(Q**m), (Q,) * m), axis=1).astype(np.int64)
    pts.flags.writeable = False
    return pts


def point_index(ctx: FieldCtx, coords) -> np.ndarray | int:
    coords = np.asarray(coords, dtype=np.int64)
    m = coords.shape[-1]
    if m == 0:
        return 0 if coords.ndim == 1 else np.zeros(coords.shape[:-1], dtype=np.int64)
    weights = ctx.Q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    idx = (coords * weights).sum(axis=-1)
    return int(idx) if idx.ndim == 0 else idx


def point_coords(ctx: FieldCtx, m: int, index: int) -> Point:
    return tuple(int(c) for c in domain_points(ctx, m)[index])


class FuncTable:
    """A function F_Q^m -> F_{value_order} stored as its full evaluation table.

    ``value_order`` is the order of the subfield holding the values
    (``ctx.q`` by default; ``ctx.Q`` for F_Q-valued functions).  Instances
    are immutable; the value array is read-only.
    """

    __slots__ = ("ctx", "m", "values", "value_order")

    def __init__(self, ctx: FieldCtx, m: int, values, value_order: int | None = None, check: bool = True):
        vals = np.array(values, dtype=np.int64).reshape(-1)
        order = ctx.q if value_order is None else int(value_order)
        if check:
            if vals.size != ctx.Q**m:
                raise UsageError(f"table has {vals.size} entries, expected Q^m = {ctx.Q**m}")
            if np.any((vals < 0) | (vals >= ctx.Q)):
                raise UsageError("table entries must be elements of F_Q")
            if order != ctx.Q and not np.all(ctx.is_in_subfield(vals, order)):
                raise UsageError(f"table values do not lie in F_{order}")
        vals.flags.writeable = False
        self.ctx = ctx
        self.m = m
        self.values = vals
        self.value_order = order

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, ctx: FieldCtx, m: int, value_order: int | None = None) -> "FuncTable":
        return cls(ctx, m, np.zeros(ctx.Q**m, dtype=np.int64), value_order, check=False)

    @classmethod
    def constant(cls, ctx: FieldCtx, m: int, c: int, value_order: int | None = None) -> "FuncTable":
        return cls(ctx, m, np.full(ctx.Q**m, c, dtype=np.int64), value_order)

    @classmethod
    def from_callable(cls, ctx: FieldCtx, m: int, fn: Callable[..., int], value_order: int | None = None) -> "FuncTable":
        vals = [fn(*pt) for pt in domain_points(ctx, m).tolist()]
        return cls(ctx, m, vals, value_order)

    # -- accessors ----------------------------------------------------------

    @property
    def size(self) -> int:
        return self.values.size

    def __call__(self, *point: int) -> int:
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        return int(self.values[point_index(self.ctx, point)])

    def cube(self) -> np.ndarray:
        return self.values.reshape((self.ctx.Q,) * self.m)

    def weight(self) -> int:
        return int(np.count_nonzero(self.values))

    def distance(self, other: "FuncTable") -> float:
        """Normalized Hamming distance."""
        self._same_shape(other)
        return float(np.count_nonzero(self.values != other.values)) / self.size

    def _same_shape(self, other: "FuncTable") -> None:
        if other.ctx != self.ctx or other.m != self.m:
            raise UsageError("functions live on different domains")

    def __add__(self, other: "FuncTable") -> "FuncTable":
        self._same_shape(other)
        order = max(self.value_order, other.value_order)
        return FuncTable(self.ctx, self.m, self.ctx.add(self.values, other.values), order, check=False)

    def __sub__(self, other: "FuncTable") -> "FuncTable":
        self._same_shape(other)
        order = max(self.value_order, other.value_order)
        return FuncTable(self.ctx, self.m, self.ctx.sub(self.values, other.values), order, check=False)

    def scale(self, c: int) -> "FuncTable":
        return FuncTable(self.ctx, self.m, self.ctx.mul(c, self.values), self.value_order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FuncTable):
            return NotImplemented
        return self.ctx == other.ctx and self.m == other.m and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.ctx, self.m, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"FuncTable(Q={self.ctx.Q}, m={self.m}, values in F_{self.value_order}, weight={self.weight()})"

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        c = self.ctx
        return {"p": c.p, "s": c.s, "n": c.n, "m": self.m, "value_field": self.value_order,
                "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "FuncTable":
        ctx = get_field(int(data["p"]), int(data["s"]), int(data["n"]))
        return cls(ctx, int(data["m"]), data["values"], int(data["value_field"]))


# -- interpolation -----------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _lagrange_matrix(ctx: FieldCtx) -> np.ndarray:
    """Row j holds the x^j coefficient of each point indicator.

    The indicator of a is 1 - (x - a)^(Q-1), and (x - a)^(Q-1) expands to
    sum_j a^(Q-1-j) x^j because binom(Q-1, j) = (-1)^j mod p.
    """
    Q = ctx.Q
    a = np.arange(Q, dtype=np.int64)
    M = np.empty((Q, Q), dtype=np.int64)
    for j in range(Q):
        M[j] = ctx.neg(ctx.pow(a, Q - 1 - j))
    M[0] = ctx.add(M[0], 1)
    M.flags.writeable = False
    return M


@functools.lru_cache(maxsize=32)
def _vandermonde(ctx: FieldCtx) -> np.ndarray:
    """V[x, j] = x^j with 0^0 = 1."""
    a = np.arange(ctx.Q, dtype=np.int64)
    V = np.stack([ctx.pow(a, j) for j in range(ctx.Q)], axis=1)
    V.flags.writeable = False
    return V


def _apply_per_axis(ctx: FieldCtx, arr: np.ndarray, M: np.ndarray, m: int) -> np.ndarray:
    """Apply the Q x Q matrix ``M`` along each of the trailing ``m`` axes."""
    Q = ctx.Q
    lead = arr.shape[:-1]
    cube = arr.reshape(lead + (Q,) * m)
    for ax in range(m):
        pos = len(lead) + ax
        moved = np.moveaxis(cube, pos, -1)
        moved = ctx.sum(ctx.mul(M, moved[..., None, :]), axis=-1)
        cube = np.moveaxis(moved, -1, pos)
    return np.ascontiguousarray(cube).reshape(lead + (Q**m,))


def coefficient_array(ctx: FieldCtx, m: int, values) -> np.ndarray:
    """Coefficients of the reduced interpolating polynomial(s), batched over leading axes."""
    return _apply_per_axis(ctx, np.asarray(values, dtype=np.int64), _lagrange_matrix(ctx), m)


def evaluation_array(ctx: FieldCtx, m: int, coeffs) -> np.ndarray:
    """Inverse of :func:`coefficient_array`."""
    return _apply_per_axis(ctx, np.asarray(coeffs, dtype=np.int64), _vandermonde(ctx), m)


def coefficients(f: FuncTable) -> dict[Point, int]:
    """Nonzero coefficients of f's polynomial with per-variable degree < Q."""
    arr = coefficient_array(f.ctx, f.m, f.values)
    pts = domain_points(f.ctx, f.m)
    return {tuple(int(c) for c in pts[i]): int(arr[i]) for i in np.nonzero(arr)[0]}


def evaluate_poly(coeffs: Mapping[Sequence[int], int], ctx: FieldCtx, m: int,
                  value_order: int | None = None) -> FuncTable:
    """Evaluate ``sum c_d x^d`` on every point of F_Q^m."""
    arr = np.zeros(ctx.Q**m, dtype=np.int64)
    for d, c in coeffs.items():
        d = (d,) if isinstance(d, (int, np.integer)) else tuple(d)
        if len(d) != m or any(not 0 <= e < ctx.Q for e in d):
            raise UsageError(f"degree vector {d} outside {{0..{ctx.Q - 1}}}^{m}")
        c = int(c)
        if not 0 <= c < ctx.Q:
            raise UsageError(f"coefficient {c} is not an element of F_{ctx.Q}")
        idx = point_index(ctx, d)
        arr[idx] = ctx.add(int(arr[idx]), c)
    vals = evaluation_array(ctx, m, arr)
    return FuncTable(ctx, m, vals, ctx.Q if value_order is None else value_order)


def support(f: FuncTable) -> set[Point]:
    return set(coefficients(f))


def monomial_values(ctx: FieldCtx, degree: Sequence[int]) -> np.ndarray:
    """Table of x^d over F_Q^m (0^0 = 1)."""
    pts = domain_points(ctx, len(degree))
    out = np.ones(pts.shape[0], dtype=np.int64)
    for i, e in enumerate(degree):
        out = ctx.mul(out, ctx.pow(pts[:, i], int(e)))
    return out


def monomial_trace_function(ctx: FieldCtx, lam: int, degree: Sequence[int] | int,
                            value_order: int | None = None) -> FuncTable:
    """The basic function x -> Tr(lam * x^d) with values in F_{value_order}."""
    degree = (degree,) if isinstance(degree, (int, np.integer)) else tuple(degree)
    if any(not 0 <= e < ctx.Q for e in degree):
        raise UsageError(f"degree vector {degree} out of range")
    order = ctx.q if value_order is None else value_order
    vals = ctx.trace(ctx.mul(lam, monomial_values(ctx, degree)), order)
    return FuncTable(ctx, len(degree), vals, order, check=False)


# -- affine geometry ---------------------------------------------------------


def _as_vec(ctx: FieldCtx, v, m: int | None = None) -> tuple[int, ...]:
    out = tuple(int(c) for c in v)
    if m is not None and len(out) != m:
        raise UsageError(f"expected a vector of length {m}, got {len(out)}")
    if any(not 0 <= c < ctx.Q for c in out):
        raise UsageError("vector entries must be elements of F_Q")
    return out


class AffineSubspace:
    """``{base + u_1 b_1 + ... + u_t b_t}`` with an ordered, independent basis.

    The ordered basis fixes the identification F_Q^t -> V, u -> base + sum u_i b_i.
    """

    __slots__ = ("ctx", "base", "basis")

    def __init__(self, ctx: FieldCtx, base: Sequence[int], basis: Iterable[Sequence[int]]) -> None:
        self.ctx = ctx
        self.base = _as_vec(ctx, base)
        self.basis = tuple(_as_vec(ctx, b, len(self.base)) for b in basis)
        if len(self.basis) > self.m:
            raise UsageError("more basis vectors than ambient dimension")
        if self.basis and rank(ctx, np.array(self.basis)) != len(self.basis):
            raise UsageError("basis vectors are linearly dependent")

    @property
    def m(self) -> int:
        return len(self.base)

    @property
    def t(self) -> int:
        return len(self.basis)

    def coords(self) -> np.ndarray:
        """Points of V as an ``(Q^t, m)`` array, ordered by u."""
        ctx = self.ctx
        u = domain_points(ctx, self.t)
        acc = np.broadcast_to(np.array(self.base, dtype=np.int64), (u.shape[0], self.m)).copy()
        for i, b in enumerate(self.basis):
            acc = ctx.add(acc, ctx.mul(u[:, i : i + 1], np.array(b, dtype=np.int64)[None, :]))
        return acc

    def indices(self) -> np.ndarray:
        return point_index(self.ctx, self.coords())

    def __repr__(self) -> str:
        return f"AffineSubspace(base={self.base}, basis={self.basis})"


class AffineMap:
    """``x -> M x + b`` on F_Q^m; ``M`` may be singular."""

    __slots__ = ("ctx", "matrix", "translation", "invertible")

    def __init__(self, ctx: FieldCtx, matrix, translation=None) -> None:
        M = np.array(matrix, dtype=np.int64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise UsageError("affine map needs a square matrix")
        m = M.shape[0]
        b = np.zeros(m, dtype=np.int64) if translation is None else np.array(_as_vec(ctx, translation, m))
        if np.any((M < 0) | (M >= ctx.Q)):
            raise UsageError("matrix entries must be elements of F_Q")
        M.flags.writeable = False
        b.flags.writeable = False
        self.ctx = ctx
        self.matrix = M
        self.translation = b
        self.invertible = rank(ctx, M) == m

    @classmethod
    def identity(cls, ctx: FieldCtx, m: int) -> "AffineMap":
        return cls(ctx, np.eye(m, dtype=np.int64))

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def apply(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        out = self.ctx.dot(self.matrix[None, :, :], coords[:, None, :], axis=-1)
        return self.ctx.add(out, self.translation[None, :])

    def image_indices(self) -> np.ndarray:
        """Index of A(x) for every x in canonical order."""
        return point_index(self.ctx, self.apply(domain_points(self.ctx, self.m)))

    def image_subspace(self, V: AffineSubspace) -> AffineSubspace:
        """A(V) with the transported ordered basis; requires A invertible."""
        if not self.invertible:
            raise UsageError("image of a subspace under a singular map may drop dimension")
        base = self.apply(np.array([V.base]))[0]
        basis = [self.ctx.dot(self.matrix, np.array(b)[None, :], axis=-1) for b in V.basis]
        return AffineSubspace(self.ctx, base, basis)


def restrict(f: FuncTable, V: AffineSubspace) -> FuncTable:
    """f|_V as a function on F_Q^t."""
    if V.ctx != f.ctx or V.m != f.m:
        raise UsageError("subspace does not live in the function's domain")
    return FuncTable(f.ctx, V.t, f.values[V.indices()], f.value_order, check=False)


def compose_affine(f: FuncTable, A: AffineMap) -> FuncTable:
    """The function x -> f(A(x))."""
    if A.ctx != f.ctx or A.m != f.m:
        raise UsageError("affine map dimension does not match the function")
    return FuncTable(f.ctx, f.m, f.values[A.image_indices()], f.value_order, check=False)


def random_subspace_through(ctx: FieldCtx, x: Sequence[int], t: int, rng: np.random.Generator) -> AffineSubspace:
    """Subspace through ``x`` with a uniformly random independent ordered basis."""
    m = len(x)
    if not 0 <= t <= m:
        raise UsageError(f"t={t} must lie in 0..{m}")
    while True:
        basis = rng.integers(0, ctx.Q, size=(t, m))
        if t == 0 or rank(ctx, basis) == t:
            return AffineSubspace(ctx, x, basis.tolist())


def _rref_bases(ctx: FieldCtx, m: int, t: int) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Every t-dimensional linear subspace once, as (pivot columns, RREF basis)."""
    Q = ctx.Q
    for pivots in itertools.combinations(range(m), t):
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, m) if c not in pivots]
        for fill in itertools.product(range(Q), repeat=len(free)):
            B = np.zeros((t, m), dtype=np.int64)
            for r, pc in enumerate(pivots):
                B[r, pc] = 1
            for (r, c), v in zip(free, fill):
                B[r, c] = v
            yield pivots, B


def enumerate_subspaces(ctx: FieldCtx, m: int, t: int) -> Iterator[AffineSubspace]:
    """Every t-dimensional affine subspace of F_Q^m exactly once.

    Linear parts are listed by reduced row-echelon basis; cosets by base
    points that vanish on the pivot columns.
    """
    for pivots, B in _rref_bases(ctx, m, t):
        rest = [c for c in range(m) if c not in pivots]
        for vals in itertools.product(range(ctx.Q), repeat=len(rest)):
            base = [0] * m
            for c, v in zip(rest, vals):
                base[c] = v
            yield AffineSubspace(ctx, base, B.tolist())


@functools.lru_cache(maxsize=32)
def subspace_index_matrix(ctx: FieldCtx, m: int, t: int) -> np.ndarray:
    """Row i lists the point indices of the i-th subspace from :func:`enumerate_subspaces`."""
    rows = [V.indices() for V in enumerate_subspaces(ctx, m, t)]
    out = np.array(rows, dtype=np.int64).reshape(len(rows), ctx.Q**t)
    out.flags.writeable = False
    return out


def count_subspaces(Q: int, m: int, t: int) -> int:
    """Number of t-dimensional affine subspaces of F_Q^m."""
    num = den = 1
    for i in range(t):
        num *= Q**m - Q**i
        den *= Q**t - Q**i
    return Q ** (m - t) * (num // den)


def count_subspaces_through_point(Q: int, m: int, t: int) -> int:
    """Number of t-dimensional affine subspaces containing a fixed point."""
    return count_subspaces(Q, m, t) * Q**t // Q**m
