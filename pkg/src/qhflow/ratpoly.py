"""Exact sparse bivariate polynomials over the rationals.

Coefficients are ``gmpy2.mpq`` values; anything accepted by ``mpq``
(ints, ``Fraction``, ``"p/q"`` strings) can be passed in.  Polynomials
and fields are immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from gmpy2 import mpq

Rational = mpq

EXPONENT_CAP = 512

ZERO = mpq(0)
ONE = mpq(1)


class InputTooLarge(ValueError):
    """An exponent exceeded the configured cap."""


def rational(value) -> mpq:
    """Coerce ``value`` to an exact rational; floats are refused."""
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not accepted; pass a string or Fraction")
    if isinstance(value, str):
        return mpq(value.strip())
    return mpq(value)


def _term_key(e):
    return (e[0] + e[1], e[0])


class SparsePolynomial:
    """Sparse polynomial in ``x, y`` stored as ``{(i, j): coefficient}``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None, *, _trusted: bool = False):
        if _trusted:
            self._terms = terms
        else:
            clean = {}
            for (i, j), c in (terms or {}).items():
                i, j = int(i), int(j)
                if i < 0 or j < 0:
                    raise ValueError(f"negative exponent ({i}, {j})")
                if i > EXPONENT_CAP or j > EXPONENT_CAP:
                    raise InputTooLarge(f"exponent ({i}, {j}) exceeds cap {EXPONENT_CAP}")
                c = rational(c)
                if c:
                    clean[(i, j)] = clean.get((i, j), ZERO) + c
                    if not clean[(i, j)]:
                        del clean[(i, j)]
            self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c) -> "SparsePolynomial":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "SparsePolynomial":
        return cls({(i, j): c})

    @classmethod
    def from_records(cls, records: Iterable) -> "SparsePolynomial":
        """Build from ``{"x": i, "y": j, "c": "p/q"}`` records; repeats are summed."""
        acc: dict = {}
        for rec in records:
            key = (int(rec["x"]), int(rec["y"]))
            acc[key] = acc.get(key, ZERO) + rational(rec["c"])
        return cls(acc)

    # -- basic protocol -----------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self):
        return iter(sorted(self._terms, key=_term_key))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coeff(self, i: int, j: int) -> mpq:
        return self._terms.get((i, j), ZERO)

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            try:
                other = _lift(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"SparsePolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for (i, j) in sorted(self._terms, key=_term_key):
            c = self._terms[(i, j)]
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in (("x", i), ("y", j)) if e
            )
            if not mono:
                piece = str(c)
            elif c == 1:
                piece = mono
            elif c == -1:
                piece = "-" + mono
            else:
                piece = f"{c}*{mono}"
            out.append(piece)
        return " + ".join(out).replace("+ -", "- ")

    def to_records(self) -> list[dict]:
        return [{"x": i, "y": j, "c": str(self._terms[(i, j)])}
                for (i, j) in sorted(self._terms, key=_term_key)]

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return SparsePolynomial({k: -c for k, c in self._terms.items()}, _trusted=True)

    def __add__(self, other):
        other = _lift(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SparsePolynomial(out, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if isinstance(other, SparsePolynomial):
            return self.mul(other)
        c = rational(other)
        if not c:
            return SparsePolynomial({}, _trusted=True)
        return SparsePolynomial({k: v * c for k, v in self._terms.items()}, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = rational(other)
        if not c:
            raise ZeroDivisionError("polynomial divided by zero")
        return self * (ONE / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = SparsePolynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul(self, other: "SparsePolynomial", trunc: "Truncation | None" = None):
        """Product, optionally dropping terms above a weighted degree."""
        out: dict = {}
        a, b = self._terms, other._terms
        if trunc is None:
            for (i1, j1), c1 in a.items():
                for (i2, j2), c2 in b.items():
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, ZERO) + c1 * c2
        else:
            w1, w2, cap = trunc
            bl = sorted(((i * w1 + j * w2, i, j, c) for (i, j), c in b.items()))
            for (i1, j1), c1 in a.items():
                room = cap - i1 * w1 - j1 * w2
                for d2, i2, j2, c2 in bl:
                    if d2 > room:
                        break
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, ZERO) + c1 * c2
        for k in [k for k, v in out.items() if not v]:
            del out[k]
        for (i, j) in out:
            if i > EXPONENT_CAP or j > EXPONENT_CAP:
                raise InputTooLarge(f"exponent ({i}, {j}) exceeds cap {EXPONENT_CAP}")
        return SparsePolynomial(out, _trusted=True)

    # -- calculus -------------------------------------------------------
    def dx(self):
        return SparsePolynomial({(i - 1, j): c * i for (i, j), c in self._terms.items() if i},
                                _trusted=True)

    def dy(self):
        return SparsePolynomial({(i, j - 1): c * j for (i, j), c in self._terms.items() if j},
                                _trusted=True)

    # -- structure ------------------------------------------------------
    def degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def weighted_degrees(self, w1: int, w2: int) -> set[int]:
        return {i * w1 + j * w2 for i, j in self._terms}

    def truncate(self, trunc: "Truncation") -> "SparsePolynomial":
        w1, w2, cap = trunc
        return SparsePolynomial(
            {k: c for k, c in self._terms.items() if k[0] * w1 + k[1] * w2 <= cap}, _trusted=True)

    def component(self, w1: int, w2: int, k: int) -> "SparsePolynomial":
        """Terms of weighted degree exactly ``k``."""
        return SparsePolynomial(
            {e: c for e, c in self._terms.items() if e[0] * w1 + e[1] * w2 == k}, _trusted=True)

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def is_univariate(self) -> bool:
        return all(j == 0 for _, j in self._terms)

    def __call__(self, x, y):
        """Evaluate at numbers (exact if given rationals)."""
        total = 0
        for (i, j), c in self._terms.items():
            total += c * x ** i * y ** j
        return total

    def evalf(self, x: float, y: float) -> float:
        return float(sum(float(c) * x ** i * y ** j for (i, j), c in self._terms.items()))

    def subs(self, X: "SparsePolynomial", Y: "SparsePolynomial",
             trunc: "Truncation | None" = None) -> "SparsePolynomial":
        """Composition ``self(X, Y)``, truncated only when ``trunc`` is given."""
        if not self._terms:
            return self
        max_i = max(i for i, _ in self._terms)
        xp = [SparsePolynomial.const(1)]
        for _ in range(max_i):
            xp.append(xp[-1].mul(X, trunc))
        by_j: dict[int, dict] = {}
        for (i, j), c in self._terms.items():
            by_j.setdefault(j, {})[i] = c
        # Horner in Y over x-power combinations
        result = SparsePolynomial({}, _trusted=True)
        for j in range(max(by_j), -1, -1):
            if result:
                result = result.mul(Y, trunc)
            row = by_j.get(j)
            if row:
                acc: dict = {}
                for i, c in row.items():
                    for k, v in xp[i]._terms.items():
                        acc[k] = acc.get(k, ZERO) + c * v
                result = result + SparsePolynomial({k: v for k, v in acc.items() if v},
                                                   _trusted=True)
        return result.truncate(trunc) if trunc is not None else result


Truncation = tuple  # (w1, w2, max weighted degree)


def _lift(value) -> SparsePolynomial:
    if isinstance(value, SparsePolynomial):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not polynomials here")
    return SparsePolynomial.const(value)


X = SparsePolynomial.monomial(1, 0)
Y = SparsePolynomial.monomial(0, 1)


@dataclass(frozen=True)
class PlanarField:
    """Vector field ``(p, q)``."""

    p: SparsePolynomial
    q: SparsePolynomial

    def __add__(self, other: "PlanarField") -> "PlanarField":
        return PlanarField(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "PlanarField") -> "PlanarField":
        return PlanarField(self.p - other.p, self.q - other.q)

    def __neg__(self):
        return PlanarField(-self.p, -self.q)

    def scale(self, f) -> "PlanarField":
        """Multiply both components by a scalar or polynomial."""
        return PlanarField(self.p * f, self.q * f)

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    def __str__(self):
        return f"({self.p}, {self.q})"


def euler_field(t1: int = 1, t2: int = 1) -> PlanarField:
    """The dissipative field ``(t1 x, t2 y)``."""
    return PlanarField(X * t1, Y * t2)


def hamiltonian_field(h: SparsePolynomial) -> PlanarField:
    return PlanarField(-h.dy(), h.dx())


def wedge(f: PlanarField, g: PlanarField) -> SparsePolynomial:
    return f.p * g.q - f.q * g.p


def divergence(f: PlanarField) -> SparsePolynomial:
    return f.p.dx() + f.q.dy()


def lie_derivative(f: PlanarField, v: SparsePolynomial) -> SparsePolynomial:
    return f.p * v.dx() + f.q * v.dy()


def jacobian_apply(f: PlanarField, v: PlanarField, trunc=None) -> PlanarField:
    """``Df · v``."""
    return PlanarField(f.p.dx().mul(v.p, trunc) + f.p.dy().mul(v.q, trunc),
                       f.q.dx().mul(v.p, trunc) + f.q.dy().mul(v.q, trunc))


def lie_bracket(u: PlanarField, v: PlanarField) -> PlanarField:
    """``[u, v] = Dv·u − Du·v``."""
    return jacobian_apply(v, u) - jacobian_apply(u, v)


# -- univariate helpers (polynomials in x only) ------------------------------

def _as_coeffs(u: SparsePolynomial) -> list:
    if not u.is_univariate():
        raise ValueError("expected a univariate polynomial in x")
    n = max((i for i, _ in u._terms), default=-1)
    cs = [ZERO] * (n + 1)
    for (i, _), c in u.items():
        cs[i] = c
    return cs


def _from_coeffs(cs) -> SparsePolynomial:
    return SparsePolynomial({(i, 0): c for i, c in enumerate(cs) if c}, _trusted=True)


def _trim(cs):
    while cs and not cs[-1]:
        cs.pop()
    return cs


def _divmod(a: list, b: list):
    a = list(a)
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
    return q, _trim(a)


def _gcd_coeffs(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def univariate_gcd(u: SparsePolynomial, v: SparsePolynomial) -> SparsePolynomial:
    """Monic gcd of two univariate polynomials (in x)."""
    if not u and not v:
        raise ValueError("gcd(0, 0) is undefined")
    return _from_coeffs(_gcd_coeffs(_as_coeffs(u), _as_coeffs(v)))


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign_at(cs, point):
    if point == "-inf":
        n = len(cs) - 1
        return cs[-1] if n % 2 == 0 else -cs[-1]
    if point == "+inf":
        return cs[-1]
    acc = ZERO
    for c in reversed(cs):
        acc = acc * point + c
    return acc


def sturm_sequence(u: SparsePolynomial) -> list[list]:
    cs = _trim(_as_coeffs(u))
    if not cs:
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [cs, _trim([c * i for i, c in enumerate(cs)][1:])]
    while seq[-1]:
        _, r = _divmod(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return seq[:-1]


def sturm_real_root_count(u: SparsePolynomial, lo=None, hi=None) -> int:
    """Distinct real roots of ``u`` in ``(lo, hi]``; ``None`` means ∓∞."""
    cs = _trim(_as_coeffs(u))
    if not cs:
        raise ValueError("Sturm sequence of the zero polynomial")
    # squarefree part, so endpoints that are multiple roots are handled
    g = _gcd_coeffs(cs, _trim([c * i for i, c in enumerate(cs)][1:]))
    seq = sturm_sequence(_from_coeffs(_divmod(cs, g)[0]))
    lo_pt = "-inf" if lo is None else rational(lo)
    hi_pt = "+inf" if hi is None else rational(hi)
    return (_sign_changes([_sign_at(p, lo_pt) for p in seq])
            - _sign_changes([_sign_at(p, hi_pt) for p in seq]))
