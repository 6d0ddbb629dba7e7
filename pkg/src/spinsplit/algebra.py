"""Exact operator algebra over the coefficient ring.

Operators are finite sums of monomials ``coefficient * word`` where the
coefficient lives in :class:`spinsplit.scalars.Ring` (it carries H, the
momentum components and their rational functions) and the word is a
PBW-ordered product of the six non-scalar generators

    J1 <= J2 <= J3 <= K1 <= K2 <= K3.

Reordering uses the commutation relations

    [J_a, J_b] = i eps_abc J_c
    [J_a, K_b] = i eps_abc K_c
    [K_a, K_b] = -i eps_abc J_c

and coefficients are moved through generators with the derivation rules
implemented on :class:`~spinsplit.scalars.Scalar`.  Every public operation
returns a fully normal-ordered expression, so equality is structural:
two expressions are equal iff they have the same words with equal
coefficients.
"""

from __future__ import annotations

import sympy as sp

from .scalars import CoefficientError, Ring, Scalar, eps

__all__ = [
    "OperatorExpr",
    "VectorExpr",
    "op_scalar",
    "op_H",
    "op_P",
    "op_Pmag",
    "op_m",
    "anticommutator",
    "gen_J",
    "gen_K",
    "vec_J",
    "vec_K",
    "vec_P",
    "vec_Phat",
    "commutator",
    "evaluate_at",
]

# Generator indices: 0..2 = J1..J3, 3..5 = K1..K3.
_J = (0, 1, 2)
_K = (3, 4, 5)

GENERATOR_NAMES = ("J[1]", "J[2]", "J[3]", "K[1]", "K[2]", "K[3]")


def _gen_commutator(a: int, b: int):
    """[g_a, g_b] as a list of (generator, sympy constant)."""
    out = []
    if a < 3 and b < 3:  # [J,J] = i eps J
        for c in range(3):
            e = eps(a, b, c)
            if e:
                out.append((c, sp.I * e))
    elif a < 3 <= b:  # [J,K] = i eps K
        for c in range(3):
            e = eps(a, b - 3, c)
            if e:
                out.append((c + 3, sp.I * e))
    elif b < 3 <= a:  # [K,J] = -[J,K]
        for c in range(3):
            e = eps(b, a - 3, c)
            if e:
                out.append((c + 3, -sp.I * e))
    else:  # [K,K] = -i eps J
        for c in range(3):
            e = eps(a - 3, b - 3, c)
            if e:
                out.append((c, -sp.I * e))
    return out


_insert_memo: dict = {}


def _insert_gen(word: tuple, g: int) -> dict:
    """Normal-order ``word * g`` for an already-ordered word.

    Returns {word: sympy constant}.  Constants are ring-independent
    (products of +-i), so results are memoized globally.
    """
    key = (word, g)
    cached = _insert_memo.get(key)
    if cached is not None:
        return cached
    if not word or word[-1] <= g:
        out = {word + (g,): sp.Integer(1)}
    else:
        head, last = word[:-1], word[-1]
        out: dict = {}
        # last*g = g*last + [last, g]
        for w2, c2 in _insert_gen(head, g).items():
            for w3, c3 in _insert_gen(w2, last).items():
                out[w3] = out.get(w3, sp.Integer(0)) + c2 * c3
        for h, ch in _gen_commutator(last, g):
            for w3, c3 in _insert_gen(head, h).items():
                out[w3] = out.get(w3, sp.Integer(0)) + ch * c3
        out = {w: sp.expand(c) for w, c in out.items() if sp.expand(c) != 0}
    _insert_memo[key] = out
    return out


def _word_mul(w1: tuple, w2: tuple) -> dict:
    """Normal-order the concatenation of two ordered words."""
    acc = {w1: sp.Integer(1)}
    for g in w2:
        nxt: dict = {}
        for w, c in acc.items():
            for w3, c3 in _insert_gen(w, g).items():
                nxt[w3] = nxt.get(w3, sp.Integer(0)) + c * c3
        acc = nxt
    return acc


def _deriv(g: int, c: Scalar) -> Scalar:
    """[g, c] for a generator and a scalar coefficient."""
    if g < 3:
        return c.rotation_derivative(g)
    return c.boost_derivative(g - 3)


def _word_times_scalar(word: tuple, c: Scalar):
    """Move a scalar left through an ordered word: word*c as [(Scalar, word)].

    Subwords keep their relative order, so no generator reordering is
    needed here.
    """
    if not word:
        return [(c, ())]
    g, rest = word[0], word[1:]
    out = []
    for c2, w2 in _word_times_scalar(rest, c):
        out.append((c2, (g,) + w2))
        dc = _deriv(g, c2)
        if not dc.is_zero():
            out.append((dc, w2))
    return out


class OperatorExpr:
    """A normal-ordered sum of (scalar coefficient, generator word) terms."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict | None = None):
        self.ring = ring
        clean = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    clean[w] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_scalar(cls, c: Scalar) -> "OperatorExpr":
        return cls(c.ring, {(): c})

    @classmethod
    def from_generator(cls, ring: Ring, g: int) -> "OperatorExpr":
        return cls(ring, {(g,): ring.one()})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar_valued(self) -> bool:
        return all(w == () for w in self.terms)

    def scalar_part(self) -> Scalar:
        return self.terms.get((), self.ring.zero())

    def coeff(self, word: tuple) -> Scalar:
        return self.terms.get(word, self.ring.zero())

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("OperatorExpr is unhashable; compare with ==")

    def __repr__(self):
        if self.is_zero():
            return "OperatorExpr(0)"
        bits = []
        for w in sorted(self.terms):
            gens = "*".join(GENERATOR_NAMES[g] for g in w) or "1"
            bits.append(f"{self.terms[w]!r} * {gens}")
        return "OperatorExpr(" + "  +  ".join(bits) + ")"

    # -- ring arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, OperatorExpr):
            return other
        if isinstance(other, Scalar):
            return OperatorExpr.from_scalar(other)
        if isinstance(other, (int, sp.Expr)):
            return OperatorExpr.from_scalar(self.ring.from_expr(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms[w] + c if w in terms else c
        return OperatorExpr(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr(self.ring, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                for cmid, wmid in _word_times_scalar(w1, c2):
                    c = c1 * cmid
                    for w3, const in _word_mul(wmid, w2).items():
                        add = c * const
                        out[w3] = out[w3] + add if w3 in out else add
        return OperatorExpr(self.ring, out)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self

    def __truediv__(self, other):
        """Division by a scalar-valued expression (right multiplication by
        its inverse; the inverse is central only up to derivation terms, so
        this is defined as multiplication by the inverse coefficient on the
        right, matching 'e / c' for commuting scalars)."""
        if isinstance(other, (int, sp.Expr)):
            other = self.ring.from_expr(other)
        if isinstance(other, Scalar):
            inv = other.inverse()
            return self * OperatorExpr.from_scalar(inv)
        if isinstance(other, OperatorExpr):
            if not other.is_scalar_valued():
                raise CoefficientError("division by operator-valued expression")
            return self / other.scalar_part()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            if not self.is_scalar_valued():
                raise CoefficientError(
                    "negative power of operator-valued expression"
                )
            return OperatorExpr.from_scalar(self.scalar_part() ** n)
        out = OperatorExpr.from_scalar(self.ring.one())
        for _ in range(n):
            out = out * self
        return out

    # -- algebra operations -----------------------------------------------

    def normal_form(self) -> "OperatorExpr":
        """Expressions are kept normal-ordered at construction; this is a
        re-canonicalization (idempotent by construction)."""
        return OperatorExpr(self.ring, dict(self.terms))

    def adjoint(self) -> "OperatorExpr":
        """Hermitian adjoint: reverses words, conjugates i; H, P, J, K are
        self-adjoint."""
        out = OperatorExpr(self.ring)
        for w, c in self.terms.items():
            rev: dict = {(): self.ring.one()}
            for g in reversed(w):
                nxt: dict = {}
                for wcur, ccur in rev.items():
                    for w2, const in _insert_gen(wcur, g).items():
                        add = ccur * const
                        nxt[w2] = nxt[w2] + add if w2 in nxt else add
                rev = nxt
            out = out + OperatorExpr(self.ring, rev) * OperatorExpr.from_scalar(
                c.conjugate()
            )
        return out

    def evaluate_at(self, kappa) -> "OperatorExpr":
        """Substitute the momentum point (0, 0, kappa) into every
        coefficient; generator words are untouched."""
        terms = {w: c.at_point(kappa) for w, c in self.terms.items()}
        ring = next(iter(terms.values())).ring if terms else Ring(
            massless=self.ring.massless, point=sp.sympify(kappa)
        )
        return OperatorExpr(ring, terms)


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return a * b - b * a


def anticommutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return a * b + b * a


class VectorExpr:
    """Three operator components indexed by a Cartesian axis."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if len(comps) != 3:
            raise ValueError("a vector has exactly three components")
        self.components = comps

    def __getitem__(self, a: int) -> OperatorExpr:
        return self.components[a]

    def __iter__(self):
        return iter(self.components)

    @property
    def ring(self):
        return self.components[0].ring

    def __add__(self, other):
        return VectorExpr(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return VectorExpr(a - b for a, b in zip(self, other))

    def __neg__(self):
        return VectorExpr(-a for a in self)

    def __mul__(self, other):
        return VectorExpr(a * other for a in self)

    def __rmul__(self, other):
        return VectorExpr(other * a for a in self)

    def __truediv__(self, other):
        return VectorExpr(a / other for a in self)

    def __eq__(self, other):
        if not isinstance(other, VectorExpr):
            return NotImplemented
        return all(a == b for a, b in zip(self, other))

    def __hash__(self):
        raise TypeError("VectorExpr is unhashable; compare with ==")

    def dot(self, other: "VectorExpr") -> OperatorExpr:
        """Order-preserving sum a_i * b_i."""
        out = self[0] * other[0]
        for a in (1, 2):
            out = out + self[a] * other[a]
        return out

    def cross(self, other: "VectorExpr") -> "VectorExpr":
        """Order-preserving eps_ijk a_j b_k."""
        comps = []
        for i in range(3):
            acc = None
            for j in range(3):
                for k in range(3):
                    e = eps(i, j, k)
                    if e:
                        term = self[j] * other[k] * e
                        acc = term if acc is None else acc + term
            comps.append(acc)
        return VectorExpr(comps)


# -- generator builders ----------------------------------------------------


def op_scalar(ring: Ring, expr) -> OperatorExpr:
    return OperatorExpr.from_scalar(ring.from_expr(expr))


def op_H(ring: Ring) -> OperatorExpr:
    return OperatorExpr.from_scalar(ring.H())


def op_m(ring: Ring) -> OperatorExpr:
    return OperatorExpr.from_scalar(ring.m())


def op_P(ring: Ring, axis: int) -> OperatorExpr:
    return OperatorExpr.from_scalar(ring.P(axis))


def op_Pmag(ring: Ring) -> OperatorExpr:
    return OperatorExpr.from_scalar(ring.R())


def gen_J(ring: Ring, axis: int) -> OperatorExpr:
    return OperatorExpr.from_generator(ring, axis)


def gen_K(ring: Ring, axis: int) -> OperatorExpr:
    return OperatorExpr.from_generator(ring, axis + 3)


def vec_J(ring: Ring) -> VectorExpr:
    return VectorExpr(gen_J(ring, a) for a in range(3))


def vec_K(ring: Ring) -> VectorExpr:
    return VectorExpr(gen_K(ring, a) for a in range(3))


def vec_P(ring: Ring) -> VectorExpr:
    return VectorExpr(op_P(ring, a) for a in range(3))


def vec_Phat(ring: Ring) -> VectorExpr:
    return VectorExpr(
        OperatorExpr.from_scalar(ring.Phat(a)) for a in range(3)
    )


def evaluate_at(e: OperatorExpr, kappa) -> OperatorExpr:
    return e.evaluate_at(kappa)
