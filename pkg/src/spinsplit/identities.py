"""Named catalog of exact operator identities, and the symbolic builders
for the connections and angular-momentum splittings they involve.

Every catalog entry is a list of (lhs, rhs) pairs of operator expressions
whose difference must normal-form to exactly zero.  ``identity_suite``
runs the catalog and reports per-entry results; a deliberate sign flip
can be injected for mutation control.
"""

from __future__ import annotations

from functools import lru_cache

import sympy as sp

from .algebra import (
    OperatorExpr,
    VectorExpr,
    commutator,
    gen_J,
    gen_K,
    op_H,
    op_P,
    op_Pmag,
    op_m,
    op_scalar,
    vec_J,
    vec_K,
    vec_P,
    vec_Phat,
)
from .scalars import Ring, eps

__all__ = [
    "boost_connection",
    "rotation_connection",
    "affine_connection",
    "flat_connection",
    "orbital_part",
    "spin_part",
    "helicity_op",
    "parallel_angular_momentum",
    "perpendicular_angular_momentum",
    "newton_wigner",
    "spin_closed_form",
    "CATALOG",
    "MASSLESS_CATALOG",
    "identity_suite",
    "TEXT_CATALOG",
]


def _i(ring: Ring) -> OperatorExpr:
    return op_scalar(ring, sp.I)


# -- connection and splitting builders --------------------------------------


@lru_cache(maxsize=None)
def boost_connection(ring: Ring) -> VectorExpr:
    """Cartesian components of the boost-induced connection:
    D_a = -i K_a / H - P_a / (2 H^2), with the inverse-energy coefficient
    multiplying on the left."""
    H_inv = op_H(ring) ** -1
    return VectorExpr(
        -_i(ring) * H_inv * gen_K(ring, a) - op_P(ring, a) * H_inv**2 / 2
        for a in range(3)
    )


@lru_cache(maxsize=None)
def rotation_connection(ring: Ring, form: int = 1) -> VectorExpr:
    """Cartesian components of the rotation-induced connection.

    ``form=1`` is the compact expression
        D_a = -i [ (Phat x J)_a / |P| + Phat_a (Phat.K) / H - i P_a / (2H^2) ]
    and ``form=2`` is the manifestly symmetrized equivalent
        D_a = -i [ (Phat x J)_a / |P| - i Phat_a / |P| ]
              - (i/2) [ Phat_a (Phat.K) / H + (K.Phat) Phat_a / H ].
    """
    i = _i(ring)
    H_inv = op_H(ring) ** -1
    R_inv = op_Pmag(ring) ** -1
    Phat = vec_Phat(ring)
    J = vec_J(ring)
    K = vec_K(ring)
    ph_cross_j = Phat.cross(J)
    if form == 1:
        ph_dot_k = Phat.dot(K)
        return VectorExpr(
            -i
            * (
                R_inv * ph_cross_j[a]
                + H_inv * Phat[a] * ph_dot_k
                - i * op_P(ring, a) * H_inv**2 / 2
            )
            for a in range(3)
        )
    if form == 2:
        ph_dot_k = Phat.dot(K)
        k_dot_ph = K.dot(Phat)
        return VectorExpr(
            -i * (R_inv * ph_cross_j[a] - i * R_inv * Phat[a])
            - i * (H_inv * Phat[a] * ph_dot_k + k_dot_ph * Phat[a] * H_inv) / 2
            for a in range(3)
        )
    raise ValueError("form must be 1 or 2")


def affine_connection(ring: Ring, f: OperatorExpr) -> VectorExpr:
    """f D^K + (1 - f) D^R for a scalar-valued weight f."""
    one = op_scalar(ring, 1)
    dk = boost_connection(ring)
    dr = rotation_connection(ring)
    return VectorExpr(f * dk[a] + (one - f) * dr[a] for a in range(3))


@lru_cache(maxsize=None)
def flat_connection(ring: Ring) -> VectorExpr:
    """The affine connection at weight f = H/m (massive only)."""
    if ring.massless:
        raise ValueError("the flat affine weight H/m requires m > 0")
    f = op_H(ring) / ring.m()
    return affine_connection(ring, f)


def orbital_part(ring: Ring, conn: VectorExpr) -> VectorExpr:
    """L_a = -i (k x D)_a = -i eps_abc P_b D_c (momentum components act as
    scalar coefficients on the left)."""
    comps = []
    for a in range(3):
        acc = op_scalar(ring, 0)
        for b in range(3):
            for c in range(3):
                e = eps(a, b, c)
                if e:
                    acc = acc + e * op_P(ring, b) * conn[c]
        comps.append(-_i(ring) * acc)
    return VectorExpr(comps)


def spin_part(ring: Ring, conn: VectorExpr) -> VectorExpr:
    """S = J - L for the splitting induced by a connection."""
    return vec_J(ring) - orbital_part(ring, conn)


@lru_cache(maxsize=None)
def helicity_op(ring: Ring) -> OperatorExpr:
    """chi = Phat . J."""
    return vec_Phat(ring).dot(vec_J(ring))


@lru_cache(maxsize=None)
def parallel_angular_momentum(ring: Ring) -> VectorExpr:
    """J_par = (J.Phat) Phat = chi Phat (the two contractions agree)."""
    chi = helicity_op(ring)
    return VectorExpr(
        chi * OperatorExpr.from_scalar(ring.Phat(a)) for a in range(3)
    )


@lru_cache(maxsize=None)
def perpendicular_angular_momentum(ring: Ring) -> VectorExpr:
    """J_perp = -(1/H) P x K (the massless orbital candidate)."""
    H_inv = op_H(ring) ** -1
    pxk = vec_P(ring).cross(vec_K(ring))
    return VectorExpr(-H_inv * pxk[a] for a in range(3))


@lru_cache(maxsize=None)
def newton_wigner(ring: Ring) -> VectorExpr:
    """Closed-form position operator
        Q_a = (1/H)(K_a - i P_a / (2H))
              - (1/(m H (H+m))) [P x (H J + P x K)]_a.
    The i in the first parenthesis is required for Q = i D^+ (and for
    Hermiticity); see the decisions ledger for the discrepancy with the
    commonly printed form."""
    if ring.massless:
        raise ValueError("the closed-form position operator requires m > 0")
    i = _i(ring)
    H = op_H(ring)
    H_inv = H**-1
    m = op_m(ring)
    J = vec_J(ring)
    K = vec_K(ring)
    P = vec_P(ring)
    hj_pxk = VectorExpr(H * J[a] + P.cross(K)[a] for a in range(3))
    p_cross = P.cross(hj_pxk)
    coeff = (m * H * (H + m)) ** -1
    return VectorExpr(
        H_inv * (gen_K(ring, a) - i * op_P(ring, a) * H_inv / 2)
        - coeff * p_cross[a]
        for a in range(3)
    )


@lru_cache(maxsize=None)
def spin_closed_form(ring: Ring) -> VectorExpr:
    """Closed-form internal operator
    S = (1/m)(H J + P x K) - (1/(m(H+m))) (P.J) P."""
    if ring.massless:
        raise ValueError("the closed-form spin operator requires m > 0")
    H = op_H(ring)
    m = op_m(ring)
    J = vec_J(ring)
    P = vec_P(ring)
    pxk = P.cross(vec_K(ring))
    pj = P.dot(J)
    c1 = m**-1
    c2 = (m * (H + m)) ** -1
    return VectorExpr(
        c1 * (H * J[a] + pxk[a]) - c2 * pj * op_P(ring, a) for a in range(3)
    )


# -- catalog ------------------------------------------------------------------


def _pairs_jj(r):
    return [
        (commutator(gen_J(r, a), gen_J(r, b)),
         sum((eps(a, b, c) * _i(r) * gen_J(r, c) for c in range(3)),
             op_scalar(r, 0)))
        for a in range(3) for b in range(3)
    ]


def _pairs_jk(r):
    return [
        (commutator(gen_J(r, a), gen_K(r, b)),
         sum((eps(a, b, c) * _i(r) * gen_K(r, c) for c in range(3)),
             op_scalar(r, 0)))
        for a in range(3) for b in range(3)
    ]


def _pairs_kk(r):
    return [
        (commutator(gen_K(r, a), gen_K(r, b)),
         sum((-eps(a, b, c) * _i(r) * gen_J(r, c) for c in range(3)),
             op_scalar(r, 0)))
        for a in range(3) for b in range(3)
    ]


def _pairs_jp(r):
    return [
        (commutator(gen_J(r, a), op_P(r, b)),
         sum((eps(a, b, c) * _i(r) * op_P(r, c) for c in range(3)),
             op_scalar(r, 0)))
        for a in range(3) for b in range(3)
    ]


def _pairs_kp(r):
    return [
        (commutator(gen_K(r, a), op_P(r, b)),
         _i(r) * op_H(r) if a == b else op_scalar(r, 0))
        for a in range(3) for b in range(3)
    ]


def _pairs_kh(r):
    return [(commutator(gen_K(r, a), op_H(r)), _i(r) * op_P(r, a))
            for a in range(3)]


def _pairs_jh(r):
    return [(commutator(gen_J(r, a), op_H(r)), op_scalar(r, 0))
            for a in range(3)]


def _pairs_translations(r):
    out = [(commutator(op_P(r, a), op_P(r, b)), op_scalar(r, 0))
           for a in range(3) for b in range(3)]
    out += [(commutator(op_P(r, a), op_H(r)), op_scalar(r, 0))
            for a in range(3)]
    out.append((commutator(op_H(r), op_H(r)), op_scalar(r, 0)))
    return out


def _pairs_inverse_comm(r):
    out = []
    for base in (op_H(r), op_Pmag(r), op_H(r) + op_m(r)):
        inv = base ** -1
        lhs = commutator(gen_K(r, 0), inv)
        rhs = -inv * commutator(gen_K(r, 0), base) * inv
        out.append((lhs, rhs))
    return out


def _pairs_power_energy(r):
    out = []
    for a in (0, 1):
        for n in range(-3, 4):
            lhs = commutator(gen_K(r, a), op_H(r) ** n)
            rhs = _i(r) * n * op_P(r, a) * op_H(r) ** (n - 1)
            out.append((lhs, rhs))
    return out


def _pairs_power_momentum(r):
    out = []
    for a in (0, 1):
        for n in range(-3, 4):
            lhs = commutator(gen_K(r, a), op_Pmag(r) ** n)
            rhs = _i(r) * n * op_H(r) * op_P(r, a) * op_Pmag(r) ** (n - 2)
            out.append((lhs, rhs))
    return out


def _pairs_pk_pa(r):
    pk = vec_P(r).dot(vec_K(r))
    return [(commutator(pk, op_P(r, a)), _i(r) * op_H(r) * op_P(r, a))
            for a in range(3)]


def _pairs_phat_k(r):
    out = []
    H = op_H(r)
    R_inv = op_Pmag(r) ** -1
    for a in range(3):
        pa = OperatorExpr.from_scalar(r.Phat(a))
        for b in range(3):
            lhs = commutator(pa, gen_K(r, b))
            rhs = _i(r) * H * op_P(r, a) * op_P(r, b) * R_inv**3
            if a == b:
                rhs = rhs - _i(r) * H * R_inv
            out.append((lhs, rhs))
    return out


def _pairs_weighted_boost_momentum(r):
    out = []
    H = op_H(r)
    for m_exp in (-1, 0, 1):
        for n_exp in (-1, 0, 1):
            # a representative diagonal and two off-diagonal axis pairs;
            # the full axis dependence is covered by the unweighted entry
            for a, b in ((0, 0), (0, 1), (1, 0)):
                    lhs = commutator(H**m_exp * gen_K(r, a),
                                     H**n_exp * op_P(r, b))
                    rhs = (_i(r) * n_exp * op_P(r, a) * op_P(r, b)
                           * H ** (m_exp + n_exp - 1))
                    if a == b:
                        rhs = rhs + _i(r) * H ** (m_exp + n_exp + 1)
                    out.append((lhs, rhs))
    return out


def _pairs_contraction_asymmetry_unit(r):
    Phat, K = vec_Phat(r), vec_K(r)
    lhs = Phat.dot(K) - K.dot(Phat)
    rhs = -2 * _i(r) * op_H(r) * op_Pmag(r) ** -1
    return [(lhs, rhs)]


def _pairs_contraction_asymmetry(r):
    P, K = vec_P(r), vec_K(r)
    return [(P.dot(K) - K.dot(P), -3 * _i(r) * op_H(r))]


def _pairs_bac_abc(r):
    out = []
    Phat, P = vec_Phat(r), vec_P(r)
    for A, B, C in [
        (Phat, Phat, vec_J(r)),
        (Phat, P, vec_K(r)),
        (P, Phat, vec_J(r)),
    ]:
        lhs = A.cross(B.cross(C))
        adc = A.dot(C)
        adb = A.dot(B)
        rhs = VectorExpr(B[i] * adc - adb * C[i] for i in range(3))
        out.extend((lhs[i], rhs[i]) for i in range(3))
    return out


def _pairs_j_decomposition(r):
    Phat, J = vec_Phat(r), vec_J(r)
    par = VectorExpr(Phat[a] * Phat.dot(J) for a in range(3))
    perp = -Phat.cross(Phat.cross(J))
    return [(gen_J(r, a), par[a] + perp[a]) for a in range(3)]


def _pairs_k_decomposition(r):
    Phat, K = vec_Phat(r), vec_K(r)
    par = VectorExpr(Phat[a] * Phat.dot(K) for a in range(3))
    perp = -Phat.cross(Phat.cross(K))
    return [(gen_K(r, a), par[a] + perp[a]) for a in range(3)]


def _pairs_rotation_forms(r):
    d1 = rotation_connection(r, form=1)
    d2 = rotation_connection(r, form=2)
    return [(d1[a], d2[a]) for a in range(3)]


def _pairs_rotation_bridge(r):
    H_inv = op_H(r) ** -1
    R_inv = op_Pmag(r) ** -1
    Phat, K = vec_Phat(r), vec_K(r)
    ph_dot_k = Phat.dot(K)
    k_dot_ph = K.dot(Phat)
    out = []
    for a in range(3):
        lhs = H_inv * Phat[a] * ph_dot_k
        rhs = (k_dot_ph * Phat[a] * H_inv
               + _i(r) * op_P(r, a) * H_inv**2
               - 2 * _i(r) * Phat[a] * R_inv)
        out.append((lhs, rhs))
    return out


def _pairs_boost_curvature_commutator(r):
    H_inv = op_H(r) ** -1
    lhs = commutator(H_inv * gen_K(r, 0), H_inv * gen_K(r, 1))
    rhs = (-_i(r) * H_inv**2 * gen_J(r, 2)
           + _i(r) * H_inv**3 * (-op_P(r, 0) * gen_K(r, 1)
                                 + op_P(r, 1) * gen_K(r, 0)))
    return [(lhs, rhs)]


def _pairs_boost_self_adjoint(r):
    dk = boost_connection(r)
    out = []
    for a in range(3):
        q = _i(r) * dk[a]
        out.append((q.adjoint(), q))
    return out


def _pairs_rotation_self_adjoint(r):
    dr = rotation_connection(r)
    out = []
    for a in range(3):
        q = _i(r) * dr[a]
        out.append((q.adjoint(), q))
    return out


def _pairs_quotient_soundness(r):
    H, R, m = op_H(r), op_Pmag(r), op_m(r)
    psq = vec_P(r).dot(vec_P(r))
    out = [
        (H * H, psq + m * m),
        (H ** -1, H / (psq + m * m)),
        (R * R, psq),
    ]
    if not r.massless:
        out.append(((H + m) ** -1, (H - m) / psq))
    return out


def _pairs_adjoint_momentum_cross(r):
    pxj = vec_P(r).cross(vec_J(r))
    return [
        (pxj[a].adjoint(), pxj[a] - 2 * _i(r) * op_P(r, a))
        for a in range(3)
    ]


def _pairs_flat_nw(r):
    dplus = flat_connection(r)
    q = newton_wigner(r)
    return [(_i(r) * dplus[a], q[a]) for a in range(3)]


def _pairs_flat_spin(r):
    s = spin_part(r, flat_connection(r))
    s_closed = spin_closed_form(r)
    return [(s[a], s_closed[a]) for a in range(3)]


def _pairs_boost_orbital(r):
    l = orbital_part(r, boost_connection(r))
    jperp = perpendicular_angular_momentum(r)
    return [(l[a], jperp[a]) for a in range(3)]


def _pairs_rotation_orbital(r):
    l = orbital_part(r, rotation_connection(r))
    Phat, J = vec_Phat(r), vec_J(r)
    target = -Phat.cross(Phat.cross(J))
    return [(l[a], target[a]) for a in range(3)]


def _pairs_parallel_commutators(r):
    jpar = parallel_angular_momentum(r)
    return [
        (commutator(jpar[a], jpar[b]), op_scalar(r, 0))
        for a in range(3) for b in range(a + 1, 3)
    ]


def _pairs_perpendicular_commutators(r):
    jpar = parallel_angular_momentum(r)
    jperp = perpendicular_angular_momentum(r)
    out = []
    for a in range(3):
        for b in range(a + 1, 3):
            lhs = commutator(jperp[a], jperp[b])
            rhs = sum(
                (eps(a, b, c) * _i(r) * (jperp[c] - jpar[c])
                 for c in range(3)),
                op_scalar(r, 0),
            )
            out.append((lhs, rhs))
    return out


def _pairs_split_vector_ops(r):
    j = vec_J(r)
    out = []
    for part in (parallel_angular_momentum(r),
                 perpendicular_angular_momentum(r)):
        for a in range(3):
            for b in range(3):
                lhs = commutator(part[a], j[b])
                rhs = sum(
                    (eps(a, b, c) * _i(r) * part[c] for c in range(3)),
                    op_scalar(r, 0),
                )
                out.append((lhs, rhs))
    return out


# Entries checked in the massive ring (m a positive symbol).
CATALOG = {
    "rotation-generators": _pairs_jj,
    "rotation-boost-mixed": _pairs_jk,
    "boost-generators": _pairs_kk,
    "rotation-momentum": _pairs_jp,
    "boost-momentum": _pairs_kp,
    "boost-energy": _pairs_kh,
    "rotation-energy": _pairs_jh,
    "translation-sector": _pairs_translations,
    "inverse-commutator": _pairs_inverse_comm,
    "energy-power-commutator": _pairs_power_energy,
    "momentum-power-commutator": _pairs_power_momentum,
    "momentum-boost-contraction": _pairs_pk_pa,
    "unit-momentum-boost": _pairs_phat_k,
    "weighted-boost-momentum": _pairs_weighted_boost_momentum,
    "unit-contraction-asymmetry": _pairs_contraction_asymmetry_unit,
    "contraction-asymmetry": _pairs_contraction_asymmetry,
    "triple-cross-expansion": _pairs_bac_abc,
    "angular-momentum-decomposition": _pairs_j_decomposition,
    "boost-decomposition": _pairs_k_decomposition,
    "rotation-connection-forms": _pairs_rotation_forms,
    "rotation-connection-bridge": _pairs_rotation_bridge,
    "boost-curvature-commutator": _pairs_boost_curvature_commutator,
    "boost-connection-self-adjoint": _pairs_boost_self_adjoint,
    "rotation-connection-self-adjoint": _pairs_rotation_self_adjoint,
    "quotient-soundness": _pairs_quotient_soundness,
    "adjoint-momentum-cross": _pairs_adjoint_momentum_cross,
    "flat-connection-position": _pairs_flat_nw,
    "flat-connection-spin": _pairs_flat_spin,
    "boost-orbital-form": _pairs_boost_orbital,
    "rotation-orbital-form": _pairs_rotation_orbital,
}

# Entries checked in the massless quotient (m = 0, H folded to |P|).
MASSLESS_CATALOG = {
    "massless-parallel-commutators": _pairs_parallel_commutators,
    "massless-perpendicular-commutators": _pairs_perpendicular_commutators,
    "massless-split-vector-ops": _pairs_split_vector_ops,
    "massless-quotient-soundness": _pairs_quotient_soundness,
}


def identity_suite(massless: bool = False, flip_sign_of: str | None = None):
    """Run the identity catalog.

    Returns a list of records {name, count, zero, failures} where
    ``failures`` is the number of (lhs, rhs) pairs whose difference did not
    normal-form to zero.  ``flip_sign_of`` negates the right-hand sides of
    the named entry (mutation control: the suite must then report it
    nonzero).
    """
    ring = Ring(massless=massless)
    catalog = MASSLESS_CATALOG if massless else CATALOG
    records = []
    for name, build in catalog.items():
        pairs = build(ring)
        failures = 0
        for lhs, rhs in pairs:
            if flip_sign_of == name:
                rhs = -rhs
            if not (lhs - rhs).is_zero():
                failures += 1
        records.append(
            {
                "name": name,
                "count": len(pairs),
                "zero": failures == 0,
                "failures": failures,
            }
        )
    return records


# Textual forms (operator-language source) of representative identities;
# each string must parse, lower, and normal-form to exactly zero.  The
# full structural catalog above is exercised through the printer in the
# round-trip tests.
TEXT_CATALOG = [
    "Comm(J[1],J[2]) - i*J[3]",
    "Comm(J[2],J[3]) - i*J[1]",
    "Comm(J[1],K[2]) - i*K[3]",
    "Comm(K[1],K[2]) + i*J[3]",
    "Comm(J[1],P[2]) - i*P[3]",
    "Comm(K[1],P[1]) - i*H",
    "Comm(K[1],P[2])",
    "Comm(K[1],H) - i*P[1]",
    "Comm(J[3],H)",
    "Comm(P[1],P[2])",
    "Comm(J[1],J[1])",
    "Comm(K[1],Pow(H,2)) - 2*i*P[1]*H",
    "Comm(K[1],Pow(H,-1)) + i*P[1]*Pow(H,-2)",
    "Comm(K[2],Pow(H,3)) - 3*i*P[2]*Pow(H,2)",
    "Comm(K[1],Pow(Dot(P,P),1/2)) - i*H*P[1]*Pow(Dot(P,P),-1/2)",
    "Comm(K[3],Dot(P,P)) - 2*i*H*P[3]",
    "Comm(Dot(P,K),P[2]) - i*H*P[2]",
    "Comm(Phat[1],K[2]) - i*H*P[1]*P[2]*Pow(Dot(P,P),-3/2)",
    "Dot(Phat,K) - Dot(K,Phat) + 2*i*H*Pow(Dot(P,P),-1/2)",
    "Dot(P,K) - Dot(K,P) + 3*i*H",
    "Dot(P,Cross(P,J))",
    "Cross(Phat,Cross(Phat,J)) - Phat*Dot(Phat,J) + J",
    "Adjoint(Cross(P,J)) - Cross(P,J) + 2*i*P",
    "Pow(H,2) - Dot(P,P) - Pow(m,2)",
    "Adjoint(K[1]/H - i*P[1]/(2*Pow(H,2))) - K[1]/H + i*P[1]/(2*Pow(H,2))",
    "Comm(H*K[1], P[1]/H) - i*H + i*P[1]*P[1]/H",
]
