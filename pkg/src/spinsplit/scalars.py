"""Exact scalar coefficient ring for the relativistic operator algebra.

Coefficients are rational functions of the momentum components P1, P2, P3
and the mass m, extended by the two dependent square roots

    H = sqrt(P1^2 + P2^2 + P3^2 + m^2)   (energy)
    R = sqrt(P1^2 + P2^2 + P3^2)         (momentum magnitude |P|)

so every element has the unique reduced form

    a + b*H + c*R + d*H*R

with a, b, c, d rational functions of (P1, P2, P3, m) over Q(i).  Reduction
uses H^2 = R^2 + m^2 and R^2 = P1^2 + P2^2 + P3^2, which keeps equality
decidable: an element is zero iff all four components cancel to zero.

Two ring modes restrict the basis:

  * massless mode sets m = 0 and identifies H with R (basis {1, R});
  * a frozen momentum point (0, 0, kappa) substitutes the momentum
    components and folds R to kappa (basis {1, H}, or {1} when massless).
"""

from __future__ import annotations

import itertools

import sympy as sp

__all__ = ["Ring", "Scalar", "CoefficientError"]

P1, P2, P3 = sp.symbols("P1 P2 P3", real=True)
M = sp.Symbol("m", positive=True)
P_SYMS = (P1, P2, P3)

# Levi-Civita on 0-based axes.
_EPS = {}
for _p in itertools.permutations(range(3)):
    _EPS[_p] = int(sp.LeviCivita(*_p))


def eps(a, b, c):
    """Levi-Civita symbol with 0-based axes; 0 on repeated indices."""
    return _EPS.get((a, b, c), 0)


_cancel_memo: dict = {}


def _cached_cancel(expr):
    out = _cancel_memo.get(expr)
    if out is None:
        out = sp.cancel(expr)
        _cancel_memo[expr] = out
    return out


class CoefficientError(ArithmeticError):
    """Raised on division by an identically-zero coefficient or on
    evaluation at a pole of a coefficient."""


class Ring:
    """A coefficient ring mode: massive/massless, optionally frozen at a
    momentum point (0, 0, kappa)."""

    def __init__(self, massless: bool = False, point=None):
        self.massless = massless
        self.mass = sp.Integer(0) if massless else M
        self.point = sp.sympify(point) if point is not None else None
        if self.point is not None:
            self.psq = self.point**2
        else:
            self.psq = P1**2 + P2**2 + P3**2
        self.hsq = self.psq + self.mass**2

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.massless == other.massless
            and self.point == other.point
        )

    def __hash__(self):
        return hash((self.massless, self.point))

    def __repr__(self):
        bits = ["massless" if self.massless else "massive"]
        if self.point is not None:
            bits.append(f"point=(0,0,{self.point})")
        return f"Ring({', '.join(bits)})"

    # -- element builders ------------------------------------------------

    def from_expr(self, expr) -> "Scalar":
        """Scalar from a sympy expression in P1, P2, P3, m (no H or R)."""
        expr = sp.sympify(expr)
        return Scalar(self, {(0, 0): expr})

    def zero(self) -> "Scalar":
        return self.from_expr(0)

    def one(self) -> "Scalar":
        return self.from_expr(1)

    def i(self) -> "Scalar":
        return self.from_expr(sp.I)

    def m(self) -> "Scalar":
        if self.massless:
            return self.zero()
        return self.from_expr(M)

    def H(self) -> "Scalar":
        return Scalar(self, {(1, 0): sp.Integer(1)})

    def R(self) -> "Scalar":
        return Scalar(self, {(0, 1): sp.Integer(1)})

    def P(self, axis: int) -> "Scalar":
        if self.point is not None:
            return self.from_expr(self.point if axis == 2 else 0)
        return self.from_expr(P_SYMS[axis])

    def Phat(self, axis: int) -> "Scalar":
        return self.P(axis) * self.R() ** -1

    def p_expr(self, axis: int):
        if self.point is not None:
            return self.point if axis == 2 else sp.Integer(0)
        return P_SYMS[axis]

    # -- reduction -------------------------------------------------------

    def fold(self, parts: dict) -> dict:
        """Reduce raw (eH, eR) exponent pairs to the mode's basis."""
        out = {}
        for (h, r), c in parts.items():
            if c == 0:
                continue
            # H^2 -> R^2 + m^2, R^2 -> psq
            if h >= 2:
                c = c * self.hsq ** (h // 2)
                h %= 2
            if self.massless and h == 1:
                # H == R in the massless quotient
                h, r = 0, r + 1
            if r >= 2:
                c = c * self.psq ** (r // 2)
                r %= 2
            if self.point is not None and r == 1:
                c = c * self.point
                r = 0
            key = (h, r)
            out[key] = out.get(key, sp.Integer(0)) + c
        return out


class Scalar:
    """An element a + b*H + c*R + d*H*R of a coefficient :class:`Ring`.

    Immutable; all arithmetic returns new instances with components kept
    in sympy ``cancel`` canonical form.
    """

    __slots__ = ("ring", "parts")

    def __init__(self, ring: Ring, parts: dict, _canonical: bool = False):
        self.ring = ring
        folded = ring.fold(parts)
        if _canonical:
            self.parts = {k: v for k, v in folded.items() if v != 0}
        else:
            canon = {}
            for k, v in folded.items():
                if not v.is_Atom:
                    v = _cached_cancel(v)
                if v != 0:
                    canon[k] = v
            self.parts = canon

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.parts

    def is_one(self) -> bool:
        return self.parts == {(0, 0): sp.Integer(1)}

    def component(self, h: int, r: int):
        return self.parts.get((h, r), sp.Integer(0))

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("Scalar is unhashable; compare with ==")

    def __repr__(self):
        if self.is_zero():
            return "Scalar(0)"
        bits = []
        for (h, r), c in sorted(self.parts.items(), key=lambda kv: kv[0]):
            tag = "".join(["H" * h, "R" * r])
            bits.append(f"({c})" + ("*" + tag if tag else ""))
        return "Scalar(" + " + ".join(bits) + ")"

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Scalar"):
        if self.ring != other.ring:
            raise ValueError("scalars from different ring modes")

    def __add__(self, other):
        if isinstance(other, (int, sp.Expr)):
            other = self.ring.from_expr(other)
        self._check(other)
        parts = dict(self.parts)
        for k, v in other.parts.items():
            parts[k] = parts.get(k, sp.Integer(0)) + v
        return Scalar(self.ring, parts)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ring, {k: -v for k, v in self.parts.items()}, _canonical=True)

    def __sub__(self, other):
        if isinstance(other, (int, sp.Expr)):
            other = self.ring.from_expr(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, sp.Expr)):
            other = self.ring.from_expr(other)
        self._check(other)
        parts = {}
        for (h1, r1), c1 in self.parts.items():
            for (h2, r2), c2 in other.parts.items():
                k = (h1 + h2, r1 + r2)
                parts[k] = parts.get(k, sp.Integer(0)) + c1 * c2
        return Scalar(self.ring, parts)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        """Multiplicative inverse; the extension is a field, so this exists
        for every nonzero element."""
        if self.is_zero():
            raise CoefficientError("division by identically-zero coefficient")
        ring = self.ring
        # Conjugate in H: kills the H-odd part of self * conj_h.
        conj_h = Scalar(
            ring,
            {k: (-v if k[0] == 1 else v) for k, v in self.parts.items()},
            _canonical=True,
        )
        q = self * conj_h  # a + c*R only
        assert all(k[0] == 0 for k in q.parts), "H-conjugation failed"
        conj_r = Scalar(
            ring,
            {k: (-v if k[1] == 1 else v) for k, v in q.parts.items()},
            _canonical=True,
        )
        d = q * conj_r  # rational
        assert d.parts.keys() <= {(0, 0)}
        den = d.component(0, 0)
        if den == 0:
            raise CoefficientError("division by identically-zero coefficient")
        inv_den = sp.cancel(1 / den)
        return conj_h * conj_r * inv_den

    def __truediv__(self, other):
        if isinstance(other, (int, sp.Expr)):
            other = self.ring.from_expr(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- involutions and derivations ----------------------------------------

    def conjugate(self) -> "Scalar":
        """Complex conjugation: i -> -i (P, m, H, R are real)."""
        return Scalar(
            self.ring,
            {k: v.subs(sp.I, -sp.I) for k, v in self.parts.items()},
            _canonical=True,
        )

    def boost_derivative(self, axis: int) -> "Scalar":
        """The commutator [K_axis, c] as a derivation on the ring.

        Generated by [K_a, P_b] = i*H*delta_ab, [K_a, H] = i*P_a and the
        induced [K_a, R] = i*H*P_a/R.
        """
        ring = self.ring
        if ring.point is not None:
            raise CoefficientError("derivations are undefined at a frozen point")
        pa = ring.p_expr(axis)
        out = {}

        def acc(key, val):
            out[key] = out.get(key, sp.Integer(0)) + val

        for (h, r), c in self.parts.items():
            # i*H * dc/dP_a, same H/R exponents plus one H
            acc((h + 1, r), sp.I * sp.diff(c, P_SYMS[axis]))
            if h:
                # c * i*P_a * H^{h-1} R^r
                acc((h - 1, r), sp.I * pa * c)
            if r:
                # c H^h * i*H*P_a*R/psq * R^{r-1}
                acc((h + 1, r), sp.I * pa * c / ring.psq)
        return Scalar(ring, out)

    def rotation_derivative(self, axis: int) -> "Scalar":
        """The commutator [J_axis, c]: i*eps_{abc} P_c dc/dP_b (H, R are
        rotation invariant)."""
        ring = self.ring
        if ring.point is not None:
            raise CoefficientError("derivations are undefined at a frozen point")
        out = {}
        for (h, r), c in self.parts.items():
            d = sp.Integer(0)
            for b in range(3):
                for cc in range(3):
                    e = eps(axis, b, cc)
                    if e:
                        d += e * ring.p_expr(cc) * sp.diff(c, P_SYMS[b])
            if d != 0:
                out[(h, r)] = out.get((h, r), sp.Integer(0)) + sp.I * d
        return Scalar(ring, out)

    # -- evaluation ----------------------------------------------------------

    def at_point(self, kappa) -> "Scalar":
        """Substitute the momentum point (0, 0, kappa), kappa > 0.

        Returns a scalar in the corresponding frozen-point ring.  Raises
        :class:`CoefficientError` if any component has a pole there.
        """
        target = Ring(massless=self.ring.massless, point=kappa)
        subs = {P1: 0, P2: 0, P3: target.point}
        parts = {}
        for k, v in self.parts.items():
            num, den = sp.fraction(sp.cancel(v))
            den_val = sp.cancel(den.subs(subs))
            if den_val == 0:
                raise CoefficientError(
                    f"pole at (0,0,{kappa}): denominator {den} vanishes"
                )
            parts[k] = num.subs(subs) / den_val
        return Scalar(target, parts)
