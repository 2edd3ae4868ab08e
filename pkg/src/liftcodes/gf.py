"""Finite-field tower arithmetic F_p <= F_q <= F_Q.

Elements of F_Q are plain integers in ``range(Q)``: the element
``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` (coefficients over F_p, reduced
modulo the field's irreducible polynomial) is stored as
``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``.  Enumerating ``range(Q)`` therefore
lists elements lexicographically with the leading coefficient most
significant, zero first, and the prime subfield occupies ``0..p-1``.

Every arithmetic method of :class:`FieldCtx` accepts Python ints or numpy
integer arrays and broadcasts.  :class:`FieldElement` is a thin operator
wrapper for interactive use.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass

import numpy as np

from .errors import UsageError

SUPPORTED_PRIMES = (2, 3, 5)
MAX_ORDER = 1 << 16
_ADD_TABLE_LIMIT = 1024

# Monic irreducibles over F_p, coefficients listed from x^0 up to the leading 1.
# All are primitive except x^2 + 1 over F_3, where a generator is searched for.
IRREDUCIBLES: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 14): (1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 16): (1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1),
    (3, 1): (0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 0, 2, 1),
    (3, 4): (2, 0, 0, 1, 1),
    (3, 5): (1, 0, 0, 0, 2, 1),
    (3, 6): (2, 0, 0, 0, 0, 1, 1),
    (3, 7): (1, 0, 0, 0, 0, 2, 0, 1),
    (3, 8): (2, 0, 0, 0, 0, 1, 0, 0, 1),
    (3, 9): (1, 0, 0, 0, 0, 2, 0, 0, 0, 1),
    (3, 10): (2, 0, 0, 0, 0, 0, 0, 1, 0, 1, 1),
    (5, 1): (0, 1),
    (5, 2): (2, 1, 1),
    (5, 3): (2, 0, 1, 1),
    (5, 4): (2, 0, 2, 1, 1),
    (5, 5): (2, 0, 0, 0, 3, 1),
    (5, 6): (2, 0, 0, 0, 0, 1, 1),
}


def _poly_divmod_is_zero(a: list[int], b: list[int], p: int) -> bool:
    """True iff the monic polynomial ``b`` divides ``a`` over F_p."""
    a = list(a)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return not any(x % p for x in a[:db])


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    k = len(poly) - 1
    if k < 1 or poly[-1] != 1:
        return False
    if k == 1:
        return True
    if poly[0] % p == 0:
        return False
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if _poly_divmod_is_zero(list(poly), list(low) + [1], p):
                return False
    return True


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


class FieldCtx:
    """Arithmetic context for the tower F_p <= F_q <= F_Q with q = p^s, Q = q^n.

    Immutable after construction.  Multiplication goes through exp/log
    tables built from a primitive element, so ``Q`` is limited to 2^16.
    """

    def __init__(self, p: int, s: int = 1, n: int = 1) -> None:
        if not _is_prime(p):
            raise UsageError(f"p={p} is not prime")
        if p not in SUPPORTED_PRIMES:
            raise UsageError(f"p={p} unsupported (choose from {SUPPORTED_PRIMES})")
        if s < 1 or n < 1:
            raise UsageError("extension degrees s and n must be positive")
        k = s * n
        if p**k > MAX_ORDER or (p, k) not in IRREDUCIBLES:
            raise UsageError(f"field of order {p}^{k} exceeds the supported range")
        self.p = p
        self.s = s
        self.n = n
        self.k = k
        self.q = p**s
        self.Q = p**k
        self.irreducible = IRREDUCIBLES[(p, k)]
        if not is_irreducible(self.irreducible, p):
            raise UsageError(f"table polynomial for {p}^{k} is reducible")
        self._pow_p = np.array([p**i for i in range(k)], dtype=np.int64)
        self._build_tables()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_spec(cls, spec: str, q: int | None = None) -> "FieldCtx":
        """Resolve a ``"p^k"`` string, optionally with value subfield order ``q``."""
        m = re.fullmatch(r"\s*(\d+)\s*\^\s*(\d+)\s*", spec)
        if m is None:
            if spec.strip().isdigit():
                return cls.from_order(int(spec), q)
            raise UsageError(f"cannot parse field spec {spec!r}; expected 'p^k'")
        p, k = int(m.group(1)), int(m.group(2))
        return cls.from_order(p**k, q, p=p)

    @classmethod
    def from_order(cls, Q: int, q: int | None = None, p: int | None = None) -> "FieldCtx":
        """Build the tower F_p <= F_q <= F_Q from the orders ``Q`` and ``q``."""
        if p is None:
            p = next((r for r in SUPPORTED_PRIMES if Q % r == 0), None)
            if p is None:
                raise UsageError(f"Q={Q} is not a power of a supported prime")
        k = _log_exact(Q, p)
        if q is None:
            q = Q
        s = _log_exact(q, p)
        if k is None or s is None or s == 0 or k % s:
            raise UsageError(f"invalid tower: q={q} must be a subfield order of Q={Q}")
        return cls(p, s, k // s)

    def _mulx(self, a: int) -> int:
        """Multiply an element by the class of x (shift + reduce)."""
        p, k = self.p, self.k
        digits = [(a // p**i) % p for i in range(k)]
        top = digits[-1]
        shifted = [0] + digits[:-1]
        if top:
            shifted = [(c - top * r) % p for c, r in zip(shifted, self.irreducible[:-1])]
        return sum(c * p**i for i, c in enumerate(shifted))

    def _slow_mul(self, a: int, b: int) -> int:
        acc, cur = 0, a
        for i in range(self.k):
            c = (b // self.p**i) % self.p
            for _ in range(c):
                acc = self._slow_add(acc, cur)
            cur = self._mulx(cur)
        return acc

    def _slow_add(self, a: int, b: int) -> int:
        p = self.p
        out, place = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * place
            a //= p
            b //= p
            place *= p
        return out

    def _cycle(self, gen: int) -> list[int]:
        step = self._mulx if gen == self.p and self.k > 1 else (lambda a: self._slow_mul(a, gen))
        exp, cur = [1], step(1)
        while cur != 1 and len(exp) < self.Q:
            exp.append(cur)
            cur = step(cur)
        return exp

    def _build_tables(self) -> None:
        Q = self.Q
        order = Q - 1
        candidates = ([self.p] if self.k > 1 else []) + [c for c in range(2, Q) if c != self.p]
        gen, exp = 1, [1]
        for cand in candidates:
            if len(exp) == order:
                break
            gen, exp = cand, self._cycle(cand)
        if len(exp) != order:  # pragma: no cover - impossible for an irreducible modulus
            raise UsageError("no primitive element found")
        self.primitive = gen
        self._exp = np.array(exp + exp, dtype=np.int64)
        log = np.zeros(Q, dtype=np.int64)
        log[np.array(exp, dtype=np.int64)] = np.arange(order, dtype=np.int64)
        self._log = log
        self._add_table = None
        if self.p != 2 and Q <= _ADD_TABLE_LIMIT:
            a = np.arange(Q, dtype=np.int64)
            self._add_table = self._digit_add(a[:, None], a[None, :])
        a = np.arange(Q, dtype=np.int64)
        self._neg = self._from_digits((-self.digits(a)) % self.p)

    # -- representation ---------------------------------------------------

    def digits(self, x) -> np.ndarray:
        """Coefficient vectors over F_p (little-endian), shape ``x.shape + (k,)``."""
        x = np.asarray(x, dtype=np.int64)
        return (x[..., None] // self._pow_p) % self.p

    def _from_digits(self, d: np.ndarray) -> np.ndarray:
        return (np.asarray(d, dtype=np.int64) * self._pow_p).sum(axis=-1)

    def from_digits(self, d) -> np.ndarray | int:
        d = np.asarray(d, dtype=np.int64)
        if d.shape[-1] != self.k or np.any((d < 0) | (d >= self.p)):
            raise UsageError("coefficient vector has wrong length or out-of-range digits")
        out = self._from_digits(d)
        return int(out) if out.ndim == 0 else out

    def serialize(self, x: int) -> str:
        """Little-endian digit string over F_p, e.g. ``'01'`` for x in F_4."""
        return "".join(str(int(c)) for c in self.digits(x))

    def deserialize(self, text: str) -> int:
        return int(self.from_digits([int(ch) for ch in text]))

    def elements(self) -> range:
        return range(self.Q)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, self._check(value))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def _check(self, value) -> int:
        value = int(value)
        if not 0 <= value < self.Q:
            raise UsageError(f"{value} is not an element of F_{self.Q}")
        return value

    # -- arithmetic (vectorized) -----------------------------------------

    def _digit_add(self, a, b) -> np.ndarray:
        return self._from_digits((self.digits(a) + self.digits(b)) % self.p)

    def add(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self._add_table is not None:
            out = self._add_table[a, b]
        else:
            out = self._digit_add(a, b)
        return _unbox(out, a, b)

    def neg(self, a):
        return _unbox(self._neg[a], a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a_arr = np.asarray(a, dtype=np.int64)
        b_arr = np.asarray(b, dtype=np.int64)
        prod = self._exp[self._log[a_arr] + self._log[b_arr]]
        out = np.where((a_arr == 0) | (b_arr == 0), 0, prod)
        return _unbox(out, a, b)

    def inv(self, a):
        a_arr = np.asarray(a, dtype=np.int64)
        if np.any(a_arr == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        out = self._exp[(-self._log[a_arr]) % (self.Q - 1)]
        return _unbox(out, a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        """``a**e``; the exponent is reduced mod Q-1 for nonzero bases, ``0**0 == 1``."""
        a_arr = np.asarray(a, dtype=np.int64)
        e = int(e)
        if e == 0:
            out = np.ones_like(a_arr)
        else:
            if e < 0 and np.any(a_arr == 0):
                raise ZeroDivisionError("negative power of zero")
            out = np.where(a_arr == 0, 0, self._exp[(self._log[a_arr] * (e % (self.Q - 1))) % (self.Q - 1)])
        return _unbox(out, a)

    def sum(self, a, axis=-1):
        """Field sum along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        d = self.digits(a)
        ax = axis if axis >= 0 else axis - 1
        return self._from_digits(d.sum(axis=ax) % self.p)

    def dot(self, a, b, axis=-1):
        return self.sum(self.mul(a, b), axis=axis)

    # -- subfields and traces ---------------------------------------------

    def _subfield_degree(self, order: int) -> int:
        j = _log_exact(order, self.p)
        if j is None or j == 0 or self.k % j:
            raise UsageError(f"{order} is not the order of a subfield of F_{self.Q}")
        return j

    def is_in_subfield(self, x, order: int):
        """True where ``x**order == x``."""
        self._subfield_degree(order)
        if np.ndim(x):
            return np.asarray(self.pow(x, order)) == np.asarray(x)
        return bool(self.pow(x, order) == x)

    def subfield_elements(self, order: int) -> np.ndarray:
        """Sorted elements of the subfield of the given order."""
        self._subfield_degree(order)
        step = (self.Q - 1) // (order - 1)
        nz = self._exp[np.arange(0, self.Q - 1, step)]
        return np.sort(np.concatenate([[0], nz])).astype(np.int64)

    def trace(self, x, order: int | None = None):
        """Trace from F_Q onto the subfield of the given order (default: q)."""
        order = self.q if order is None else order
        j = self._subfield_degree(order)
        acc = np.asarray(x, dtype=np.int64)
        term = acc
        for _ in range(self.k // j - 1):
            term = self.pow(term, order)
            acc = self.add(acc, term)
        return _unbox(np.asarray(acc), x)

    def orbit_trace(self, x, order: int, b: int):
        """``x + x^order + ... + x^(order^(b-1))``: the partial trace used by orbit encodings."""
        acc = np.asarray(x, dtype=np.int64)
        term = acc
        for _ in range(b - 1):
            term = self.pow(term, order)
            acc = self.add(acc, term)
        return _unbox(np.asarray(acc), x)

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, s={self.s}, n={self.n}; q={self.q}, Q={self.Q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.s, self.n) == (other.p, other.s, other.n)

    def __hash__(self) -> int:
        return hash((self.p, self.s, self.n))

    def __reduce__(self):
        return (FieldCtx, (self.p, self.s, self.n))


def _log_exact(x: int, base: int) -> int | None:
    j = 0
    while x > 1 and x % base == 0:
        x //= base
        j += 1
    return j if x == 1 else None


def _unbox(out, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return int(out)
    return np.asarray(out, dtype=np.int64)


# -- linear algebra over F_Q ----------------------------------------------


def rref(ctx: FieldCtx, matrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form and pivot columns (row operations vectorized)."""
    R = np.array(matrix, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise UsageError("rref expects a 2-D matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = ctx.mul(R[r], ctx.inv(int(R[r, c])))
        factors = R[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            R[hit] = ctx.sub(R[hit], ctx.mul(factors[hit, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(ctx: FieldCtx, matrix) -> int:
    m = np.asarray(matrix, dtype=np.int64)
    if m.size == 0:
        return 0
    return len(rref(ctx, m)[1])


def solve(ctx: FieldCtx, A, b) -> np.ndarray | None:
    """One solution of ``A x = b`` (free variables zero), or None if inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    R, piv = rref(ctx, aug)
    if piv and piv[-1] == A.shape[1]:
        return None
    x = np.zeros(A.shape[1], dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R[row, -1]
    return x


@dataclass(frozen=True, eq=False)
class FieldElement:
    """An element of F_Q bound to its context; supports the usual operators."""

    ctx: FieldCtx
    value: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value))
        if not 0 <= self.value < self.ctx.Q:
            raise UsageError(f"{self.value} out of range for F_{self.ctx.Q}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise UsageError("operands belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)) and 0 <= int(other) < self.ctx.p:
            return int(other)
        raise UsageError(f"cannot combine {other!r} with an element of F_{self.ctx.Q}")

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.value, self._other(other)))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def trace(self, order: int | None = None) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.trace(self.value, order))

    def in_subfield(self, order: int) -> bool:
        return bool(self.ctx.is_in_subfield(self.value, order))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"F{self.ctx.Q}({self.ctx.serialize(self.value)})"


@functools.lru_cache(maxsize=None)
def get_field(p: int, s: int = 1, n: int = 1) -> FieldCtx:
    """Shared, cached context for the tower with the given degrees."""
    return FieldCtx(p, s, n)


def field_for(Q: int, q: int | None = None) -> FieldCtx:
    """Cached context from orders (``q`` defaults to ``Q``)."""
    p = next((r for r in SUPPORTED_PRIMES if Q % r == 0), None)
    if p is None:
        raise UsageError(f"Q={Q} is not a power of a supported prime")
    k = _log_exact(Q, p)
    s = _log_exact(Q if q is None else q, p)
    if k is None or s is None or s == 0 or k % s:
        raise UsageError(f"invalid tower: q={q} must be a subfield order of Q={Q}")
    return get_field(p, s, k // s)
