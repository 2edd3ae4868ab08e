"""Exhaustive oracles: minimum distance, lift versus restriction, affine closure, Nikodym sets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .codes import BY_DEGREES, BY_RESTRICTION, BaseCode, LiftedCode, base_from_degrees, base_reed_solomon
from .degrees import q_shift_orbit, shadow_enumerate, smallest_prime_factor
from .errors import GuardError, UsageError
from .gf import FieldCtx, field_for, rref
from .space import domain_points, point_index

DIRECT_LIMIT = 1 << 24      # codewords enumerated directly
DUAL_LIMIT = 1 << 28        # dual codewords enumerated for the MacWilliams route
ORACLE_BITS_LIMIT = 20      # log2 of the number of functions in an exhaustive oracle run
AFFINE_LIMIT = 1 << 24      # maps x codewords checked for affine closure

Code = BaseCode | LiftedCode


# -- weight distributions -------------------------------------------------------


def _pack_bits(rows: np.ndarray) -> np.ndarray:
    """0/1 rows of length N -> (k, ceil(N/64)) uint64 words."""
    k, n = rows.shape
    w = max(1, -(-n // 64))
    padded = np.zeros((k, w * 64), dtype=np.uint64)
    padded[:, :n] = rows
    shifts = np.arange(64, dtype=np.uint64)
    return np.bitwise_or.reduce(padded.reshape(k, w, 64) << shifts, axis=2)


def _xor_span(packed: np.ndarray) -> np.ndarray:
    words = np.zeros((1, packed.shape[1]), dtype=np.uint64)
    for row in packed:
        words = np.concatenate([words, words ^ row])
    return words


def _binary_weight_counts(rows: np.ndarray, n: int, block: int = 1 << 19) -> list[int]:
    """Weight distribution of the F_2-span of 0/1 ``rows`` by packed popcounts."""
    k = rows.shape[0]
    packed = _pack_bits(rows)
    h = min(k, 13)
    head = _xor_span(packed[:h])
    tail = _xor_span(packed[h:])
    counts = np.zeros(n + 1, dtype=np.int64)
    step = max(1, block // head.shape[0])
    for i in range(0, tail.shape[0], step):
        words = head[None, :, :] ^ tail[i : i + step, None, :]
        w = np.bitwise_count(words).sum(axis=-1, dtype=np.int64)
        counts += np.bincount(w.reshape(-1), minlength=n + 1)
    return [int(c) for c in counts]


def _generic_weight_counts(ctx: FieldCtx, basis: np.ndarray, q: int, block: int = 1 << 20) -> list[int]:
    k, n = basis.shape
    elems = ctx.subfield_elements(q)
    h = 0
    while h < k and q ** (h + 1) * n <= block:
        h += 1
    head = np.zeros((1, n), dtype=np.int64)
    for row in basis[:h]:
        head = ctx.add(head[None, :, :], ctx.mul(elems[:, None], row[None, :])[:, None, :]).reshape(-1, n)
    counts = np.zeros(n + 1, dtype=np.int64)
    rest = basis[h:]
    for combo in itertools.product(range(q), repeat=rest.shape[0]):
        if rest.shape[0]:
            alpha = elems[np.array(combo)]
            shift = ctx.sum(ctx.mul(alpha[:, None], rest), axis=0)
        else:
            shift = np.zeros(n, dtype=np.int64)
        w = np.count_nonzero(ctx.add(head, shift[None, :]), axis=1)
        counts += np.bincount(w, minlength=n + 1)
    return [int(c) for c in counts]


def null_space(ctx: FieldCtx, M: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {v : M v = 0}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, piv = rref(ctx, M) if M.shape[0] else (M, [])
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        for r, pc in enumerate(piv):
            out[i, pc] = ctx.neg(int(R[r, f]))
    return out


def krawtchouk(n: int, w: int, j: int) -> int:
    return sum((-1) ** i * math.comb(j, i) * math.comb(n - j, w - i) for i in range(min(j, w) + 1))


def macwilliams_binary(dual_counts: Sequence[int]) -> list[int]:
    """Weight distribution of a binary code from that of its dual."""
    n = len(dual_counts) - 1
    size = sum(dual_counts)
    out = []
    for w in range(n + 1):
        num = sum(b * krawtchouk(n, w, j) for j, b in enumerate(dual_counts) if b)
        if num % size:
            raise ArithmeticError("MacWilliams transform produced a non-integer count")
        out.append(num // size)
    return out


def weight_distribution(code: Code, limit: int = DIRECT_LIMIT, dual_limit: int = DUAL_LIMIT) -> tuple[list[int], str]:
    """Exact weight counts A_0..A_N and the route used (``direct`` or ``dual``).

    Binary codes too large to enumerate go through their dual and the
    MacWilliams identity when the dual is small enough.
    """
    ctx, q = code.ctx, code.value_order
    B = np.asarray(code.basis())
    k, n = B.shape
    binary = q == 2
    if q**k <= limit:
        if binary:
            return _binary_weight_counts(B, n), "direct"
        return _generic_weight_counts(ctx, B, q), "direct"
    if binary and 2 ** (n - k) <= dual_limit:
        dual = null_space(ctx, B)
        return macwilliams_binary(_binary_weight_counts(dual, n)), "dual"
    raise GuardError(f"{q}^{k} codewords exceed the exhaustive limit {limit}; "
                     "estimate the distance with Monte-Carlo sampling instead")


def min_distance_exhaustive(code: Code, limit: int = DIRECT_LIMIT) -> Fraction:
    """Exact normalized minimum weight of a nonzero codeword."""
    counts, _ = weight_distribution(code, limit)
    for w in range(1, len(counts)):
        if counts[w]:
            return Fraction(w, len(counts) - 1)
    raise UsageError("the zero code has no minimum distance")


# -- distance theorem -------------------------------------------------------------


@dataclass
class DistanceReport:
    base_degrees: list
    Q: int
    q: int
    t: int
    m: int
    dim_base: int
    dim_lift: int
    delta_base: Fraction
    delta_lift: Fraction
    upper: bool            # δ(L) <= δ(F)
    additive: bool         # δ(L) >= δ(F) - Q^-t
    general: bool          # δ(L) > δ(F) - (1 - δ(F)) / (Q^t - 1), equality allowed only when δ(F) = 1
    small_field: bool | None  # δ(L) >= δ(F) when Q in {2, 3} and δ(F) > Q^-t; None when not applicable

    @property
    def general_equality_case(self) -> bool:
        # with δ(F) = 1 the strict bound would demand δ(L) > 1, so only equality is possible
        return self.delta_base == 1

    @property
    def ok(self) -> bool:
        return self.upper and self.additive and self.general and self.small_field is not False

    def to_dict(self) -> dict:
        return {
            "base_degrees": self.base_degrees,
            "Q": self.Q, "q": self.q, "t": self.t, "m": self.m,
            "dim_base": self.dim_base, "dim_lift": self.dim_lift,
            "delta_base": float(self.delta_base), "delta_lift": float(self.delta_lift),
            "delta_base_exact": str(self.delta_base), "delta_lift_exact": str(self.delta_lift),
            "upper": self.upper, "additive": self.additive, "general": self.general,
            "small_field": self.small_field, "general_equality_case": self.general_equality_case,
            "ok": self.ok,
        }


def verify_distance_theorem(base: BaseCode, m: int, limit: int = DIRECT_LIMIT) -> DistanceReport:
    L = LiftedCode(base, m)
    dF = min_distance_exhaustive(base, limit)
    dL = min_distance_exhaustive(L, limit)
    Q, t = base.ctx.Q, base.t
    unit = Fraction(1, Q**t)
    small = None
    if Q in (2, 3) and dF > unit:
        small = dL >= dF
    return DistanceReport(
        base_degrees=[d[0] if t == 1 else list(d) for d in base.degrees],
        Q=Q, q=base.value_order, t=t, m=m,
        dim_base=base.dimension, dim_lift=L.dimension,
        delta_base=dF, delta_lift=dL,
        upper=dL <= dF,
        additive=dL >= dF - unit,
        general=dL > dF - (1 - dF) / (Q**t - 1) or (dF == 1 and dL == 1),
        small_field=small,
    )


def is_shadow_closed(D: Iterable[int], p: int) -> bool:
    D = set(D)
    return all(e in D for d in D for e in shadow_enumerate(d, p))


def affine_invariant_degree_sets(Q: int, q: int) -> list[tuple[int, ...]]:
    """Nonempty proper univariate degree sets in {0..Q-1} closed under q-shifts and p-shadows.

    These are exactly the degree sets of nonzero, non-full affine-invariant
    codes F_Q -> F_q.  Sets are built as unions of q-shift orbits.
    """
    p = smallest_prime_factor(Q)
    orbits: list[frozenset] = []
    seen: set[int] = set()
    for d in range(Q):
        if d not in seen:
            orb, _ = q_shift_orbit(d, q, Q)
            orb = frozenset(x[0] if isinstance(x, tuple) else x for x in orb)
            seen |= orb
            orbits.append(orb)
    if len(orbits) > 20:
        raise GuardError(f"{len(orbits)} q-shift orbits give too many candidate degree sets")
    out = []
    for mask in range(1, 2 ** len(orbits) - 1):
        D = set().union(*(o for i, o in enumerate(orbits) if mask >> i & 1))
        if is_shadow_closed(D, p):
            out.append(tuple(sorted(D)))
    return sorted(out, key=lambda s: (len(s), s))


def distance_sweep(Q: int, q: int, m: int, limit: int = DIRECT_LIMIT) -> list[DistanceReport]:
    """Check the distance inequalities for every affine-invariant univariate base at (Q, q)."""
    return [verify_distance_theorem(base_from_degrees(Q, q, D), m, limit)
            for D in affine_invariant_degree_sets(Q, q)]


# -- lift versus restriction --------------------------------------------------------


@dataclass
class OracleReport:
    mode: str
    functions: int
    equal: bool
    disagreements: int
    codewords: int | None = None
    members: int | None = None
    non_members: int | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _all_functions(ctx: FieldCtx, n: int, q: int, start: int, stop: int) -> np.ndarray:
    """Functions number start..stop-1 in base-q order, as value tables."""
    elems = ctx.subfield_elements(q)
    idx = np.arange(start, stop, dtype=np.int64)
    digits = (idx[:, None] // (q ** np.arange(n - 1, -1, -1, dtype=np.int64))[None, :]) % q
    return elems[digits]


def oracle_equivalence(base: BaseCode, m: int, mode: str = "exhaustive", samples: int = 10_000,
                       seed: int = 0, chunk: int = 1 << 12) -> OracleReport:
    """Compare membership by restrictions with membership by the lifted degree set.

    Exhaustive mode runs over every function F_Q^m -> F_q.  Sampled mode uses
    ``samples`` random codewords and ``samples`` codewords altered at one
    point (never codewords, since the distance is at least two points).
    """
    L = LiftedCode(base, m)
    ctx, q, n = L.ctx, L.value_order, L.length
    if mode == "exhaustive":
        if n * math.log2(q) > ORACLE_BITS_LIMIT:
            raise GuardError(f"{q}^{n} functions exceed the exhaustive oracle limit 2^{ORACLE_BITS_LIMIT}; "
                             "use sampled mode")
        total = q**n
        bad = both = 0
        for s in range(0, total, chunk):
            F = _all_functions(ctx, n, q, s, min(total, s + chunk))
            a = L.contains(F, BY_RESTRICTION)
            b = L.contains(F, BY_DEGREES)
            bad += int(np.count_nonzero(a != b))
            both += int(np.count_nonzero(a & b))
        return OracleReport("exhaustive", total, bad == 0, bad, codewords=both)
    if mode != "sampled":
        raise UsageError("mode must be 'exhaustive' or 'sampled'")
    rng = np.random.default_rng(seed)
    B = L.basis()
    elems = ctx.subfield_elements(q)
    bad = members = non_members = 0
    for s in range(0, samples, chunk):
        size = min(chunk, samples - s)
        alpha = elems[rng.integers(0, q, size=(size, B.shape[0]))]
        words = ctx.sum(ctx.mul(alpha[:, :, None], B[None, :, :]), axis=1)
        flipped = words.copy()
        pos = rng.integers(0, n, size=size)
        flipped[np.arange(size), pos] = ctx.add(flipped[np.arange(size), pos], elems[rng.integers(1, q, size=size)])
        for F, want in ((words, True), (flipped, False)):
            a = L.contains(F, BY_RESTRICTION)
            b = L.contains(F, BY_DEGREES)
            bad += int(np.count_nonzero((a != b) | (a != want)))
            if want:
                members += int(np.count_nonzero(a & b))
            else:
                non_members += int(np.count_nonzero(~a & ~b))
    return OracleReport("sampled", 2 * samples, bad == 0, bad, members=members, non_members=non_members)


# -- affine closure -----------------------------------------------------------------


@dataclass
class AffineClosureReport:
    maps: int
    codewords: int
    violations: int

    @property
    def closed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {"maps": self.maps, "codewords": self.codewords, "violations": self.violations, "closed": self.closed}


def all_affine_image_indices(ctx: FieldCtx, m: int) -> np.ndarray:
    """Row r lists, for every point x, the index of A_r(x) over all Q^(m^2+m) affine maps A_r."""
    Q = ctx.Q
    pts = domain_points(ctx, m)
    rows = []
    for flat in itertools.product(range(Q), repeat=m * m):
        M = np.array(flat, dtype=np.int64).reshape(m, m)
        lin = ctx.sum(ctx.mul(pts[:, None, :], M[None, :, :]), axis=-1)  # (Q^m, m): M x
        img = ctx.add(lin[None, :, :], pts[:, None, :])                  # every translation
        rows.append(point_index(ctx, img))
    return np.concatenate(rows, axis=0)


def verify_affine_closure(code: LiftedCode, limit: int = AFFINE_LIMIT, chunk: int = 64) -> AffineClosureReport:
    """Every codeword composed with every affine map (singular ones included) stays in the code."""
    ctx, m = code.ctx, code.m
    n_maps = ctx.Q ** (m * m + m)
    words = code.codewords(limit)
    if n_maps * words.shape[0] > limit:
        raise GuardError(f"{n_maps} maps x {words.shape[0]} codewords exceed the limit {limit}")
    images = all_affine_image_indices(ctx, m)
    bad = 0
    for s in range(0, n_maps, chunk):
        composed = words[:, images[s : s + chunk]]
        bad += int(np.count_nonzero(~code.contains(composed)))
    return AffineClosureReport(n_maps, words.shape[0], bad)


# -- Nikodym sets -------------------------------------------------------------------


class PointSet:
    """A subset of F_q^m, stored as a boolean mask over canonical point indices."""

    def __init__(self, q: int, m: int, points: Iterable = ()) -> None:
        self.ctx = field_for(q, q)
        self.q, self.m = q, m
        self.mask = np.zeros(q**m, dtype=bool)
        for x in points:
            i = int(x) if np.ndim(x) == 0 else int(point_index(self.ctx, x))
            if not 0 <= i < q**m:
                raise UsageError(f"point {x} outside F_{q}^{m}")
            self.mask[i] = True

    @classmethod
    def from_mask(cls, q: int, m: int, mask) -> "PointSet":
        s = cls(q, m)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != s.mask.shape:
            raise UsageError("mask has the wrong length")
        s.mask = mask.copy()
        return s

    @classmethod
    def full(cls, q: int, m: int) -> "PointSet":
        return cls.from_mask(q, m, np.ones(q**m, dtype=bool))

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(point_index(self.ctx, x))])

    def indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.mask)]

    def complement(self) -> "PointSet":
        return PointSet.from_mask(self.q, self.m, ~self.mask)

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "points": self.indices()}


def projective_directions(ctx: FieldCtx, m: int) -> np.ndarray:
    """One nonzero direction per line through the origin: first nonzero coordinate equal to 1."""
    pts = domain_points(ctx, m)[1:]
    first = pts[np.arange(pts.shape[0]), np.argmax(pts != 0, axis=1)]
    return pts[first == 1]


def punctured_line_table(q: int, m: int) -> np.ndarray:
    """(q^m, directions, q-1) indices of x + t y for t != 0."""
    ctx = field_for(q, q)
    pts = domain_points(ctx, m)
    dirs = projective_directions(ctx, m)
    ts = np.arange(1, q, dtype=np.int64)
    steps = ctx.mul(ts[None, :, None], dirs[:, None, :])  # (dirs, q-1, m)
    coords = ctx.add(pts[:, None, None, :], steps[None, :, :, :])
    return point_index(ctx, coords)


def _nikodym_masks(masks: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Batched test: masks (..., q^m) bool -> (...,) bool."""
    covered = np.all(masks[..., table], axis=-1)       # (..., points, dirs)
    return np.all(np.any(covered, axis=-1), axis=-1)


def is_nikodym(S: PointSet) -> bool:
    """Every point has a whole punctured line through it inside S."""
    return bool(_nikodym_masks(S.mask, punctured_line_table(S.q, S.m)))


def is_nikodym_direct(S: PointSet) -> bool:
    """Definitional double loop over points and all nonzero directions."""
    ctx = S.ctx
    pts = domain_points(ctx, S.m)
    for x in pts:
        found = False
        for y in pts[1:]:
            if all(ctx.add(x, ctx.mul(t, y)).tolist() in [list(p) for p in pts[S.mask]] for t in range(1, S.q)):
                found = True
                break
        if not found:
            return False
    return True


def nikodym_lower_bound(q: int, m: int) -> int:
    """dim Lift_m of the univariate degree <= q-2 code over F_q, a lower bound on Nikodym set size."""
    return LiftedCode(base_reed_solomon(q, q - 2), m).dimension


def scan_subsets(q: int, m: int, size: int, chunk: int = 4096) -> tuple[int, int]:
    """(subsets checked, Nikodym subsets found) over every ``size``-point subset of F_q^m."""
    n = q**m
    total = math.comb(n, size)
    if total > DIRECT_LIMIT:
        raise GuardError(f"{total} subsets exceed the scan limit")
    table = punctured_line_table(q, m)
    found = 0
    combos = itertools.combinations(range(n), size)
    while True:
        batch = list(itertools.islice(combos, chunk))
        if not batch:
            break
        masks = np.zeros((len(batch), n), dtype=bool)
        np.put_along_axis(masks, np.array(batch), True, axis=1)
        found += int(np.count_nonzero(_nikodym_masks(masks, table)))
    return total, found


def greedy_nikodym(q: int, m: int, rng: np.random.Generator) -> PointSet:
    """Start from all of F_q^m and drop points in random order while the set stays Nikodym."""
    table = punctured_line_table(q, m)
    mask = np.ones(q**m, dtype=bool)
    for i in rng.permutation(q**m):
        mask[i] = False
        if not _nikodym_masks(mask, table):
            mask[i] = True
    return PointSet.from_mask(q, m, mask)


def nikodym_search(q: int, m: int, restarts: int, seed: int) -> list[PointSet]:
    return [greedy_nikodym(q, m, np.random.default_rng([seed, r])) for r in range(restarts)]
