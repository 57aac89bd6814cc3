"""Contour-integral identities for Bethe roots, their residue sums and sum rules.

For a root set ``t`` the XXX integrand is

    f(u) = exp(-alpha*u) P(u) / prod_a (u - t_a)(u - t_a - 1)

and the XXZ integrand is

    g(u) = u**(-alpha - S_z - 1) Q(u) / prod_a (u - t_a)(u - q^2 t_a)

Both identities are evaluated primarily as sums of simple-pole residues.
Trapezoidal quadrature on circles is kept as an independent check.

The power ``u**beta`` is taken on a branch cut along the ray at angle
``branch_angle``.  A cut is valid only if it misses every sector swept
when rotating ``t_a`` into ``q^2 t_a``; then ``log(q^2 t_a) = log(t_a) +
2i*gamma`` holds on the branch, which is what makes each residue pair
cancel on Bethe roots.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (ApplicabilityError, BranchPlacementError, InvalidInputError,
                     NonSimplePoleError)
from .model import (Family, RootSet, close, drinfeld_polynomial, eval_drinfeld,
                    q_number)

TWO_PI = 2 * math.pi
_ARC_MARGIN = 1e-9


@dataclass(frozen=True)
class IdentityQuery:
    alpha: complex
    shift_n: int = 0
    branch_angle: float | None = None

    @classmethod
    def shifted(cls, spec, n, branch_angle=None):
        """alpha = mu + 2*pi*i*n (XXX) or mu + pi*n/gamma (XXZ)."""
        if spec.family is Family.XXX:
            alpha = spec.mu + 2j * math.pi * n
        else:
            alpha = spec.mu + math.pi * n / spec.gamma
        return cls(complex(alpha), int(n), branch_angle)


@dataclass(frozen=True)
class IdentityValue:
    value: complex
    scale: float
    normalized: float

    @classmethod
    def from_terms(cls, terms):
        terms = np.asarray(terms, complex)
        if terms.size == 0:
            return cls(0j, 0.0, 0.0)
        value = complex(np.sum(terms))
        scale = float(np.max(np.abs(terms)))
        return cls(value, scale, abs(value) / scale if scale > 0 else 0.0)

    def to_dict(self):
        return {"value": [self.value.real, self.value.imag], "scale": self.scale,
                "normalized": self.normalized}


def _roots(roots):
    if isinstance(roots, RootSet):
        return roots.array()
    return RootSet(tuple(roots)).array()


def poles(spec, roots):
    """The 2k poles ordered ``[t_1..t_k, shifted t_1..shifted t_k]``."""
    t = _roots(roots)
    if spec.family is Family.XXX:
        return np.concatenate([t, t + 1])
    return np.concatenate([t, spec.qpow(2) * t])


def _check_simple(p, tol):
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if close(p[i], p[j], tol):
                raise NonSimplePoleError(
                    f"poles {p[i]:.6g} and {p[j]:.6g} collide: input is inadmissible or diagonal")


def _simple_residues(p, numerators):
    diff = p[:, None] - p[None, :]
    np.fill_diagonal(diff, 1.0)
    return numerators / np.prod(diff, axis=1)


def free_branch_arcs(spec, roots):
    """Angular arcs ``(start, end)`` where a branch cut keeps every pair sweep intact."""
    t = _roots(roots)
    if t.size == 0:
        return [(0.0, TWO_PI)]
    delta = 2 * spec.gamma.real
    if abs(delta) + 2 * _ARC_MARGIN >= TWO_PI:
        return []
    ivs = []
    for x in t:
        s = cmath.phase(x) + min(delta, 0.0) - _ARC_MARGIN
        s %= TWO_PI
        ivs.append((s, s + abs(delta) + 2 * _ARC_MARGIN))
    ivs.sort()
    merged = [list(ivs[0])]
    for s, e in ivs[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    wrap_end = merged[-1][1] - TWO_PI
    gaps = []
    for (_, e0), (s1, _) in zip(merged, merged[1:]):
        gs, ge = e0, s1
        if ge <= wrap_end:
            continue
        gaps.append((max(gs, wrap_end), ge))
    if merged[-1][1] < merged[0][0] + TWO_PI:
        gaps.append((merged[-1][1], merged[0][0] + TWO_PI))
    return gaps


def _angle_in_arcs(theta, arcs):
    for s, e in arcs:
        if (theta - s) % TWO_PI < e - s:
            return True
    return False


def resolve_branch(spec, roots, branch_angle=None):
    """Validate a branch angle, or pick the bisector of the widest free arc."""
    arcs = free_branch_arcs(spec, roots)
    if not arcs:
        raise BranchPlacementError(
            "the sectors between t_a and q^2 t_a cover every direction; no consistent branch")
    if branch_angle is None:
        s, e = max(arcs, key=lambda a: a[1] - a[0])
        return ((s + e) / 2) % TWO_PI
    if not _angle_in_arcs(branch_angle, arcs):
        raise BranchPlacementError(
            f"branch cut at angle {branch_angle:.6g} passes through a pole or pair sector")
    return branch_angle % TWO_PI


def branch_log(u, theta):
    """Logarithm with the cut along the ray at angle theta."""
    u = np.asarray(u, complex)
    arg = theta + np.mod(np.angle(u) - theta, TWO_PI)
    return np.log(np.abs(u)) + 1j * arg


def _integer_exponent(beta, tol=1e-12):
    return abs(beta.imag) <= tol and abs(beta.real - round(beta.real)) <= tol


def _require(spec, family):
    if spec.family is not family:
        raise InvalidInputError(f"this identity needs a {family.value.upper()} model")


def _check_sector(sector, t):
    if len(t) != sector.k:
        raise InvalidInputError(f"expected {sector.k} rapidities, got {len(t)}")


def xxx_residues(spec, sector, query, roots, tol=1e-9):
    """Residues of f at ``[t_a..., t_a + 1...]``."""
    _require(spec, Family.XXX)
    t = _roots(roots)
    _check_sector(sector, t)
    p = poles(spec, t)
    _check_simple(p, tol)
    num = np.exp(-query.alpha * p) * eval_drinfeld(spec, p)
    return _simple_residues(p, num)


def xxz_residues(spec, sector, query, roots, tol=1e-9):
    """Residues of g at ``[t_a..., q^2 t_a...]`` on the query's branch."""
    _require(spec, Family.XXZ)
    t = _roots(roots)
    _check_sector(sector, t)
    if np.any(np.abs(t) <= tol):
        raise NonSimplePoleError("a rapidity sits at the branch point u = 0")
    p = poles(spec, t)
    _check_simple(p, tol)
    beta = -query.alpha - sector.s_z - 1
    if _integer_exponent(beta):
        power = p ** int(round(beta.real))
    else:
        theta = resolve_branch(spec, t, query.branch_angle)
        power = np.exp(beta * branch_log(p, theta))
    return _simple_residues(p, power * eval_drinfeld(spec, p))


def eval_F(spec, sector, query, roots, tol=1e-9):
    """F(alpha; t) as the sum of its 2k simple-pole residues."""
    return IdentityValue.from_terms(xxx_residues(spec, sector, query, roots, tol))


def eval_G(spec, sector, query, roots, tol=1e-9):
    """G(alpha; t) as the sum of its 2k simple-pole residues."""
    return IdentityValue.from_terms(xxz_residues(spec, sector, query, roots, tol))


def eval_F_quadrature(spec, sector, query, roots, nodes=512, tol=1e-9):
    """Trapezoidal rule for (1/2 pi i) times the contour integral of f around all poles."""
    _require(spec, Family.XXX)
    t = _roots(roots)
    _check_sector(sector, t)
    if t.size == 0:
        return 0j
    p = poles(spec, t)
    _check_simple(p, tol)
    c = p.mean()
    rad = 2 * np.max(np.abs(p - c)) + 1
    w = rad * np.exp(TWO_PI * 1j * np.arange(nodes) / nodes)
    u = c + w
    f = np.exp(-query.alpha * u) * eval_drinfeld(spec, u) / np.prod(u[:, None] - p[None, :], axis=1)
    return complex(np.sum(f * w) / nodes)


def _rational_g(spec, m, p, u):
    return u ** (-m - 1) * eval_drinfeld(spec, u) / np.prod(u[:, None] - p[None, :], axis=1)


def eval_G_quadrature_integer(spec, sector, m, roots, nodes=512, tol=1e-9):
    """Annulus quadrature of the single-valued integrand u^(-m-1) Q(u) / prod(...).

    This is G at ``alpha = m - S_z``; the difference of the outer and inner
    circle integrals equals the sum of the residues in the annulus.
    """
    _require(spec, Family.XXZ)
    t = _roots(roots)
    _check_sector(sector, t)
    if t.size == 0:
        return 0j
    if np.any(np.abs(t) <= tol):
        raise NonSimplePoleError("a rapidity sits at u = 0")
    p = poles(spec, t)
    _check_simple(p, tol)
    mags = np.abs(p)
    out = 0j
    for rad, sign in ((2 * mags.max(), 1), (mags.min() / 2, -1)):
        u = rad * np.exp(TWO_PI * 1j * np.arange(nodes) / nodes)
        out += sign * np.sum(_rational_g(spec, m, p, u) * u) / nodes
    return complex(out)


def residue_pair(spec, sector, roots, a, tol=1e-9):
    """The two residues attached to root ``a`` (0-based) at ``alpha = mu``."""
    t = _roots(roots)
    if not 0 <= a < len(t):
        raise InvalidInputError(f"root index {a} out of range for k = {len(t)}")
    query = IdentityQuery.shifted(spec, 0)
    if spec.family is Family.XXX:
        res = xxx_residues(spec, sector, query, t, tol)
    else:
        res = xxz_residues(spec, sector, query, t, tol)
    k = len(t)
    return complex(res[a]), complex(res[k + a])


def series_divide(num, den, n):
    """First n Taylor coefficients of num/den (ascending arrays, den[0] != 0)."""
    num = np.asarray(num, complex)
    den = np.asarray(den, complex)
    out = np.zeros(n, complex)
    for j in range(n):
        acc = num[j] if j < len(num) else 0j
        for i in range(1, min(j, len(den) - 1) + 1):
            acc -= den[i] * out[j - i]
        out[j] = acc / den[0]
    return out


def _descending_coefficient(num, den, power):
    """Coefficient of ``u**power`` in the expansion of num/den at infinity."""
    d, e = len(num) - 1, len(den) - 1
    j = d - e - power
    if j < 0:
        return 0j
    nrev, drev = num[::-1], den[::-1]
    return series_divide(nrev / drev[0], drev / drev[0], j + 1)[j]


def tz_residues(spec, sector, m, roots):
    """``(Res_0, Res_inf)`` of u^(-m-1) Q(u) / prod_a (u - t_a)(u - q^2 t_a)."""
    _require(spec, Family.XXZ)
    t = _roots(roots)
    _check_sector(sector, t)
    if np.any(t == 0):
        raise InvalidInputError("rapidities must be nonzero")
    qc = drinfeld_polynomial(spec).coef
    dc = Polynomial.fromroots(poles(spec, t)).coef if t.size else np.ones(1, complex)
    res0 = series_divide(qc, dc, m + 1)[m] if m >= 0 else 0j
    res_inf = -_descending_coefficient(qc, dc, m)
    return complex(res0), complex(res_inf)


def twist_matches_m(spec, sector, m, tol=None):
    tol = spec.tol if tol is None else tol
    target = spec.qpow(2 * m - sector.two_sz)
    return close(spec.twist, target, tol), target


def sum_rule_tz(spec, sector, m, roots, tol=None):
    """Defect ``Res_0 + Res_inf`` of the algebraic relation at integer m.

    Applies only when ``q^(2 mu) = q^(2(m - S_z))``.
    """
    _require(spec, Family.XXZ)
    ok, target = twist_matches_m(spec, sector, m, tol)
    if not ok:
        raise ApplicabilityError(
            f"sum rule m={m} needs q^(2mu) = q^(2(m - S_z)) = {target:.6g}, "
            f"but q^(2mu) = {spec.twist:.6g}")
    r0, ri = tz_residues(spec, sector, m, roots)
    return r0 + ri


def sz0_sum_rule(spec, sector, m, roots, tol=None):
    """Closed-form S_z = 0 relations for m in {0, -1, 1}, as LHS - RHS.

    m = 0:  prod t_a^2 - prod z_i^(2 l_i)
    m = -1: [2]_q sum t_a - sum [2 l_i]_q z_i
    m = 1:  [2]_q sum 1/t_a - sum [2 l_i]_q / z_i
    """
    _require(spec, Family.XXZ)
    if sector.two_sz != 0:
        raise ApplicabilityError(f"closed forms need S_z = 0, got S_z = {sector.s_z}")
    if m not in (-1, 0, 1):
        raise InvalidInputError(f"closed forms exist for m in (-1, 0, 1), got {m}")
    ok, target = twist_matches_m(spec, sector, m, tol)
    if not ok:
        raise ApplicabilityError(
            f"m={m} needs q^(2mu) = {target:.6g}, got {spec.twist:.6g}")
    t = _roots(roots)
    _check_sector(sector, t)
    q = spec.q
    z = np.array(spec.z)
    te = spec.two_ell
    if m == 0:
        return complex(np.prod(t ** 2) - np.prod([zi ** n for zi, n in zip(z, te)]))
    qn = np.array([q_number(n, q) for n in te])
    if m == -1:
        return complex(q_number(2, q) * np.sum(t) - np.sum(qn * z))
    return complex(q_number(2, q) * np.sum(1 / t) - np.sum(qn / z))


def xxx_periodic_relation(spec, sector, roots, tol=None):
    """Periodic-chain algebraic relation.

    With ``k = sum(l)`` this is ``sum t_a - sum l_i z_i``; otherwise the
    residue at infinity of P(u) / prod_a (u - t_a)(u - t_a - 1).
    """
    _require(spec, Family.XXX)
    if not spec.is_periodic(tol):
        raise ApplicabilityError(f"relation needs e^mu = 1, got e^mu = {spec.twist:.6g}")
    t = _roots(roots)
    _check_sector(sector, t)
    if sum(spec.two_ell) == 2 * sector.k:
        return complex(np.sum(t) - sum(li * zi for li, zi in zip(spec.ell, spec.z)))
    pc = drinfeld_polynomial(spec).coef
    dc = Polynomial.fromroots(poles(spec, t)).coef if t.size else np.ones(1, complex)
    return complex(-_descending_coefficient(pc, dc, -1))
