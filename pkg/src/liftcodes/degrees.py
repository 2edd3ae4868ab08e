"""Degree sets: mod* reduction, p-shadows, q-shift orbits and lifting.

Membership in a lifted degree set quantifies over every shadow of a
degree vector.  Sums are reduced with mod* as they are accumulated, which
is sound because ``(a mod* Q) + b`` and ``a + b`` agree after a final mod*.
"""

from __future__ import annotations

import itertools
import json
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import UsageError

Degree = tuple[int, ...]


def modstar(a: int, Q: int) -> int:
    """0 stays 0; any other a maps to its residue mod Q-1 taken in 1..Q-1."""
    if a < 0 or Q < 2:
        raise UsageError("modstar needs a >= 0 and Q >= 2")
    if a == 0:
        return 0
    return (a - 1) % (Q - 1) + 1


def base_digits(a: int, p: int) -> list[int]:
    out = []
    while a:
        a, r = divmod(a, p)
        out.append(r)
    return out


def _leq_scalar(e: int, d: int, p: int) -> bool:
    if e < 0 or d < 0:
        raise UsageError("p-shadow comparison needs nonnegative integers")
    while e:
        if e % p > d % p:
            return False
        e //= p
        d //= p
    return True


def p_shadow_leq(e: int | Sequence[int], d: int | Sequence[int], p: int) -> bool:
    """Digitwise e <= d in base p; coordinatewise for vectors."""
    if isinstance(e, int) and isinstance(d, int):
        return _leq_scalar(e, d, p)
    if isinstance(e, int) or isinstance(d, int) or len(e) != len(d):
        raise UsageError("shape mismatch in p-shadow comparison")
    return all(_leq_scalar(int(a), int(b), p) for a, b in zip(e, d))


@lru_cache(maxsize=None)
def _shadow_list(d: int, p: int) -> tuple[int, ...]:
    out = [0]
    place = 1
    for digit in base_digits(d, p):
        out = [x + k * place for k in range(digit + 1) for x in out]
        place *= p
    return tuple(sorted(out))


def shadow_enumerate(d: int | Sequence[int], p: int) -> Iterator:
    """Every e with e <=_p d, each exactly once."""
    if isinstance(d, int):
        yield from _shadow_list(d, p)
        return
    yield from itertools.product(*(_shadow_list(int(x), p) for x in d))


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        num = den = 1
        for i in range(b):
            num *= a - i
            den *= i + 1
        out = out * (num // den) % p
        n //= p
        k //= p
    return out


def multinomial_nonzero_mod_p(d: int, e: Sequence[int], p: int) -> bool:
    """Whether (d; e_1, ..., e_t, d - sum e) is nonzero mod p.

    Factored as C(d, e_1) C(d - e_1, e_2) ..., with Lucas per factor.
    """
    if any(x < 0 for x in e) or sum(e) > d:
        raise UsageError("multinomial needs nonnegative parts summing to at most d")
    rest = d
    for part in e:
        if binom_mod_p(rest, part, p) == 0:
            return False
        rest -= part
    return True


def vector_shadow_leq(e: Sequence[int], d: int, p: int) -> bool:
    """Every f <=_p e has sum(f) <=_p d (checked by enumerating the f)."""
    return all(_leq_scalar(sum(f), d, p) for f in shadow_enumerate(tuple(e), p))


# Row relations for multivariate lifts: which rows e in Z^t may appear below d.
ROW_DEFINITIONAL = "definitional"
ROW_MULTINOMIAL = "multinomial"


@lru_cache(maxsize=None)
def row_shadows(d: int, t: int, p: int, relation: str = ROW_MULTINOMIAL) -> tuple[Degree, ...]:
    """All rows e in {0..d}^t related to d under the chosen relation."""
    cands = itertools.product(_shadow_list(d, p), repeat=t)
    if relation == ROW_DEFINITIONAL:
        return tuple(e for e in cands if vector_shadow_leq(e, d, p))
    if relation == ROW_MULTINOMIAL:
        return tuple(e for e in cands if sum(e) <= d and multinomial_nonzero_mod_p(d, e, p))
    raise UsageError(f"unknown row relation {relation!r}")


def smallest_prime_factor(n: int) -> int:
    for r in range(2, n + 1):
        if n % r == 0:
            return r
    raise UsageError(f"{n} has no prime factor")


# -- q-shift orbits ----------------------------------------------------------


def q_shift(d: Degree, q: int, Q: int) -> Degree:
    return tuple(modstar(q * x, Q) for x in d)


def q_shift_orbit(d: int | Sequence[int], q: int, Q: int) -> tuple[frozenset, int]:
    """Orbit of d under coordinatewise d -> q d mod* Q, and its size b."""
    scalar = isinstance(d, int)
    cur = (d,) if scalar else tuple(int(x) for x in d)
    seen = [cur]
    while True:
        cur = q_shift(cur, q, Q)
        if cur == seen[0]:
            break
        seen.append(cur)
    orbit = frozenset(x[0] for x in seen) if scalar else frozenset(seen)
    return orbit, len(seen)


class DegreeSet:
    """A set of degree vectors in {0..Q-1}^m, for codes with values in F_q."""

    __slots__ = ("Q", "q", "m", "p", "degrees")

    def __init__(self, Q: int, q: int, m: int, degrees: Iterable) -> None:
        if Q < 2 or q < 2 or m < 0:
            raise UsageError("need Q, q >= 2 and m >= 0")
        p = smallest_prime_factor(Q)
        if smallest_prime_factor(q) != p or _log(Q, p) is None or _log(q, p) is None or _log(Q, p) % _log(q, p):
            raise UsageError(f"q={q} is not a subfield order of Q={Q}")
        degs = set()
        for d in degrees:
            d = (int(d),) if isinstance(d, (int,)) or hasattr(d, "__index__") else tuple(int(x) for x in d)
            if len(d) != m or any(not 0 <= x < Q for x in d):
                raise UsageError(f"degree {d} outside {{0..{Q - 1}}}^{m}")
            degs.add(d)
        self.Q, self.q, self.m, self.p = Q, q, m, p
        self.degrees = frozenset(degs)

    @classmethod
    def univariate(cls, Q: int, q: int, degrees: Iterable[int]) -> "DegreeSet":
        return cls(Q, q, 1, ((d,) for d in degrees))

    def __contains__(self, d) -> bool:
        d = (d,) if isinstance(d, int) else tuple(d)
        return d in self.degrees

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self) -> Iterator[Degree]:
        return iter(sorted(self.degrees))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DegreeSet):
            return NotImplemented
        return (self.Q, self.q, self.m, self.degrees) == (other.Q, other.q, other.m, other.degrees)

    def __hash__(self) -> int:
        return hash((self.Q, self.q, self.m, self.degrees))

    def __le__(self, other: "DegreeSet") -> bool:
        return self.degrees <= other.degrees

    def __repr__(self) -> str:
        return f"DegreeSet(Q={self.Q}, q={self.q}, m={self.m}, |D|={len(self)})"

    def is_q_shift_closed(self) -> bool:
        return all(q_shift(d, self.q, self.Q) in self.degrees for d in self.degrees)

    def orbits(self) -> list[tuple[Degree, int]]:
        """(lexicographically least representative, orbit size) per q-shift orbit."""
        left = set(self.degrees)
        out = []
        while left:
            d = min(left)
            orbit, b = q_shift_orbit(d, self.q, self.Q)
            if not orbit <= left:
                raise UsageError("degree set is not q-shift closed")
            left -= orbit
            out.append((min(orbit), b))
        return sorted(out)

    def to_json(self) -> str:
        return json.dumps({"Q": self.Q, "q": self.q, "m": self.m, "degrees": [list(d) for d in self]})

    @classmethod
    def from_json(cls, text: str) -> "DegreeSet":
        data = json.loads(text)
        return cls(data["Q"], data["q"], data["m"], data["degrees"])


def _log(x: int, base: int) -> int | None:
    j = 0
    while x > 1 and x % base == 0:
        x //= base
        j += 1
    return j if x == 1 else None


def dimension(D: DegreeSet) -> int:
    """F_q-dimension of the code with degree set D, i.e. |D|."""
    if not D.is_q_shift_closed():
        raise UsageError("dimension is defined for q-shift closed degree sets only")
    return len(D)


# -- lifting -----------------------------------------------------------------


class _UnivariateLifter:
    """Membership in Lift_m(D) for univariate D using bitmask sum-sets.

    A set of residues in {0..Q-1} is an int with bit v for residue v.
    Adding a > 0 rotates residues 1..Q-1 cyclically and moves 0 to a.
    """

    def __init__(self, D: DegreeSet) -> None:
        self.Q = D.Q
        self.p = D.p
        self.allowed = sum(1 << d[0] for d in D.degrees)
        self._full = (1 << (self.Q - 1)) - 1
        self._cache: dict[tuple[int, int], int] = {}

    def _shift(self, mask: int, a: int) -> int:
        if a == 0:
            return mask
        n = self.Q - 1
        r = a % n
        nz = mask >> 1
        nz = ((nz << r) | (nz >> (n - r))) & self._full
        out = nz << 1
        if mask & 1:
            out |= 1 << a
        return out

    def add_coordinate(self, mask: int, d: int) -> int:
        key = (mask, d)
        hit = self._cache.get(key)
        if hit is None:
            hit = 0
            for a in _shadow_list(d, self.p):
                hit |= self._shift(mask, a)
            self._cache[key] = hit
        return hit

    def sums(self, degree: Sequence[int]) -> int:
        mask = 1
        for d in degree:
            mask = self.add_coordinate(mask, d)
        return mask

    def member(self, degree: Sequence[int]) -> bool:
        mask = 1
        for d in degree:
            mask = self.add_coordinate(mask, d)
            # 0 is always a shadow, so a bad partial sum can never disappear.
            if mask & ~self.allowed:
                return False
        return True


class _MultivariateLifter:
    def __init__(self, D: DegreeSet, relation: str) -> None:
        self.Q, self.p, self.t = D.Q, D.p, D.m
        self.allowed = D.degrees
        self.relation = relation

    def _add(self, sums: frozenset, d: int) -> frozenset:
        Q = self.Q
        rows = row_shadows(d, self.t, self.p, self.relation)
        return frozenset(
            tuple(modstar(a + b, Q) for a, b in zip(s, e)) for s in sums for e in rows
        )

    def member(self, degree: Sequence[int]) -> bool:
        sums = frozenset([(0,) * self.t])
        for d in degree:
            sums = self._add(sums, d)
            if not sums <= self.allowed:
                return False
        return True


def _candidates(Q: int, q: int, m: int, prune_orbits: bool) -> Iterator[tuple[Degree, frozenset]]:
    """Candidate degree vectors, one per q-shift orbit when pruning."""
    if not prune_orbits or q == Q:
        for d in itertools.product(range(Q), repeat=m):
            yield d, frozenset([d])
        return
    seen: set[Degree] = set()
    for d in itertools.product(range(Q), repeat=m):
        if d in seen:
            continue
        orbit, _ = q_shift_orbit(d, q, Q)
        seen |= orbit
        yield d, orbit


def lift_degree_set_univariate(D: DegreeSet, m: int, prune_orbits: bool = True) -> DegreeSet:
    """Lift_m(D): all d in {0..Q-1}^m whose shadows all sum (mod*) into D."""
    if D.m != 1:
        raise UsageError("univariate lift needs a degree set in {0..Q-1}")
    if m < 1:
        raise UsageError("m must be positive")
    lifter = _UnivariateLifter(D)
    out: set[Degree] = set()
    for rep, orbit in _candidates(D.Q, D.q, m, prune_orbits):
        if lifter.member(rep):
            out |= orbit
    return DegreeSet(D.Q, D.q, m, out)


def lift_degree_set_multivariate(D: DegreeSet, m: int, relation: str = ROW_MULTINOMIAL,
                                 prune_orbits: bool = True) -> DegreeSet:
    """Lift_m(D) for D in {0..Q-1}^t: every shadow matrix E of d has Sigma(E) mod* Q in D.

    Row i of E ranges over :func:`row_shadows` of d_i; ``relation`` picks
    the no-carry multinomial criterion (default) or the sub-shadow-sum one.
    """
    if m < D.m:
        raise UsageError(f"cannot lift a {D.m}-variate degree set to m={m} < t")
    lifter = _MultivariateLifter(D, relation)
    out: set[Degree] = set()
    for rep, orbit in _candidates(D.Q, D.q, m, prune_orbits):
        if lifter.member(rep):
            out |= orbit
    return DegreeSet(D.Q, D.q, m, out)


def lift_degree_set(D: DegreeSet, m: int, **kw) -> DegreeSet:
    """Dispatch on the arity of D."""
    if D.m == 1 and "relation" not in kw:
        return lift_degree_set_univariate(D, m, **kw)
    return lift_degree_set_multivariate(D, m, **kw)


def lift_member(D: DegreeSet, degree: Sequence[int], relation: str = ROW_MULTINOMIAL) -> bool:
    """Whether a single degree vector lies in Lift_m(D)."""
    if D.m == 1:
        return _UnivariateLifter(D).member(degree)
    return _MultivariateLifter(D, relation).member(degree)
