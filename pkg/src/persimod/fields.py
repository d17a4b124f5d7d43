"""Scalar fields for morphism matrices: GF(p) for a prime p, or exact rationals.

The default field everywhere is GF(2): feasibility searches become finite and
the examples in the test-suite stay exhaustive.  Exact rationals are supported
as an alternative for small instances.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

__all__ = ["PrimeField", "RationalField", "GF2", "QQ", "field_by_name", "solve_linear"]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class PrimeField:
    """Arithmetic in GF(p), elements canonically stored as ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def canon(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverting 0")
        return pow(a, -1, self.p)

    def elements(self) -> Iterable[int]:
        return range(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class RationalField:
    """Exact rational scalars.  No finite enumeration -> no exhaustive search."""

    __slots__ = ()

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def canon(self, x) -> Fraction:
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverting 0")
        return 1 / Fraction(a)

    def elements(self):
        raise NotImplementedError("rationals are not enumerable")

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


GF2 = PrimeField(2)
QQ = RationalField()


def field_by_name(name) -> object:
    """``2`` / ``"2"`` -> GF(2), ``"q"``/``"Q"`` -> rationals."""
    if isinstance(name, str) and name.strip().lower() in ("q", "qq", "rational"):
        return QQ
    return PrimeField(int(name))


def solve_linear(
    rows: Sequence[Sequence], rhs: Sequence, field
) -> Optional[List]:
    """One solution of A x = b over ``field``, or None if inconsistent.

    Dense Gaussian elimination; sized for the small systems that appear in
    certificate synthesis (tens of unknowns).
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[field.canon(v) for v in row] + [field.canon(rhs[i])] for i, row in enumerate(rows)]
    piv_col: List[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if aug[i][c] != field.zero), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = field.inv(aug[r][c])
        aug[r] = [field.mul(inv, v) for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != field.zero:
                f = aug[i][c]
                aug[i] = [field.sub(a, field.mul(f, b)) for a, b in zip(aug[i], aug[r])]
        piv_col.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != field.zero:
            return None
    x = [field.zero] * n
    for i, c in enumerate(piv_col):
        x[c] = aug[i][n]
    return x
