"""Model data and the polynomial Bethe systems of the XXX and XXZ chains.

Every Bethe equation, in its cleared (denominator-free) form, is a
difference of two products of affine forms in the rapidities::

    E_a(t) = L_a(t) - R_a(t),   L_a = pL * prod_f (C[a,f] + W[a,f,:] @ t)

and likewise for ``R_a``.  :func:`system_tables` builds the constants
``C`` and coefficient tensors ``W`` for both sides once; residuals and
Jacobians are then plain array arithmetic.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InvalidInputError, PoleError

DEFAULT_TOL = 1e-9


def close(a, b, tol=DEFAULT_TOL):
    """Scaled closeness ``|a - b| <= tol * max(1, |a|, |b|)``."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class Family(str, enum.Enum):
    XXX = "xxx"
    XXZ = "xxz"


@dataclass(frozen=True)
class ModelSpec:
    """Inhomogeneous spin chain with quasiperiodic boundary conditions.

    Spins are stored doubled (``two_ell[i] = 2 * ell_i``) so half-integers
    stay exact.  The twist is stored as the exponent ``mu``; the boundary
    factor is ``exp(mu)`` for XXX and ``q**(2*mu) = exp(2j*gamma*mu)`` for
    XXZ, with ``q = exp(1j*gamma)``.
    """

    family: Family
    two_ell: tuple
    z: tuple
    mu: complex = 0j
    gamma: complex | None = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        two_ell = tuple(int(v) for v in self.two_ell)
        z = tuple(complex(v) for v in self.z)
        object.__setattr__(self, "two_ell", two_ell)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "mu", complex(self.mu))
        if not two_ell:
            raise InvalidInputError("at least one site is required")
        if any(v < 1 for v in two_ell):
            raise InvalidInputError(f"every 2*ell must be a positive integer, got {two_ell}")
        if len(z) != len(two_ell):
            raise InvalidInputError(
                f"{len(two_ell)} spins but {len(z)} inhomogeneities")
        if self.family is Family.XXZ:
            if self.gamma is None:
                raise InvalidInputError("XXZ model needs an anisotropy gamma")
            object.__setattr__(self, "gamma", complex(self.gamma))
            q2 = cmath.exp(2j * self.gamma)
            if close(q2, 1.0, self.tol):
                raise InvalidInputError(f"q^2 = {q2} is too close to 1")
            for i, zi in enumerate(z):
                if abs(zi) <= self.tol:
                    raise InvalidInputError(f"z[{i}] = {zi} must be nonzero for XXZ")
        elif self.gamma is not None:
            object.__setattr__(self, "gamma", complex(self.gamma))

    @classmethod
    def xxx(cls, two_ell, z, mu=0j, **kw):
        return cls(Family.XXX, two_ell, z, mu=mu, **kw)

    @classmethod
    def xxz(cls, two_ell, z, gamma, mu=0j, **kw):
        return cls(Family.XXZ, two_ell, z, mu=mu, gamma=gamma, **kw)

    @property
    def n_sites(self):
        return len(self.two_ell)

    @property
    def ell(self):
        return tuple(v / 2 for v in self.two_ell)

    @property
    def q(self):
        return cmath.exp(1j * self.gamma)

    def qpow(self, p):
        """``q**p`` on the branch fixed by gamma, i.e. ``exp(1j*gamma*p)``."""
        return cmath.exp(1j * self.gamma * p)

    @property
    def twist(self):
        if self.family is Family.XXX:
            return cmath.exp(self.mu)
        return cmath.exp(2j * self.gamma * self.mu)

    def is_periodic(self, tol=None):
        return close(self.twist, 1.0, self.tol if tol is None else tol)

    def is_homogeneous(self, tol=None):
        tol = self.tol if tol is None else tol
        return (len(set(self.two_ell)) == 1
                and all(close(zi, self.z[0], tol) for zi in self.z))

    def plus_points(self):
        """The points z_i + ell_i (XXX) or q^{2 ell_i} z_i (XXZ)."""
        if self.family is Family.XXX:
            return [zi + li for zi, li in zip(self.z, self.ell)]
        return [self.qpow(te) * zi for zi, te in zip(self.z, self.two_ell)]

    def minus_points(self):
        if self.family is Family.XXX:
            return [zi - li for zi, li in zip(self.z, self.ell)]
        return [self.qpow(-te) * zi for zi, te in zip(self.z, self.two_ell)]

    def to_dict(self):
        d = {"family": self.family.value, "two_ell": list(self.two_ell),
             "z": [[v.real, v.imag] for v in self.z],
             "mu": [self.mu.real, self.mu.imag]}
        if self.gamma is not None:
            d["gamma"] = [self.gamma.real, self.gamma.imag]
        return d


@dataclass(frozen=True)
class Sector:
    """Particle number ``k`` and doubled magnetization ``two_sz``."""

    k: int
    two_sz: int

    def __post_init__(self):
        if self.k < 0:
            raise InvalidInputError(f"particle number must be nonnegative, got {self.k}")

    @classmethod
    def of(cls, spec, k):
        return cls(int(k), sum(spec.two_ell) - 2 * int(k))

    @property
    def s_z(self):
        return self.two_sz / 2

    def check(self, spec):
        if self.two_sz != sum(spec.two_ell) - 2 * self.k:
            raise InvalidInputError(
                f"2*S_z = {self.two_sz} inconsistent with k = {self.k} "
                f"and sum(2*ell) = {sum(spec.two_ell)}")


def canonicalize(roots, dedup_tol=1e-7):
    """Sort rapidities by real part, then imaginary part.

    Real parts closer than ``dedup_tol`` (scaled) are chained into ties,
    which are ordered by imaginary part.  The result is idempotent.
    """
    vals = sorted((complex(r) for r in roots), key=lambda c: (c.real, c.imag))
    out, group = [], []
    for v in vals:
        if group and abs(v.real - group[-1].real) > dedup_tol * max(1.0, abs(v.real), abs(group[-1].real)):
            out.extend(sorted(group, key=lambda c: (c.imag, c.real)))
            group = []
        group.append(v)
    out.extend(sorted(group, key=lambda c: (c.imag, c.real)))
    return RootSet(tuple(out), _sorted=True)


@dataclass(frozen=True, eq=False)
class RootSet:
    """An unordered multiset of rapidities kept in canonical order."""

    roots: tuple
    _sorted: bool = field(default=False, repr=False)

    def __post_init__(self):
        if not self._sorted:
            object.__setattr__(self, "roots", canonicalize(self.roots).roots)
            object.__setattr__(self, "_sorted", True)

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    def matches(self, other, tol=DEFAULT_TOL):
        if len(self) != len(other):
            return False
        return all(close(a, b, tol) for a, b in zip(self.roots, RootSet(tuple(other)).roots))

    def __eq__(self, other):
        if not isinstance(other, RootSet):
            return NotImplemented
        return self.matches(other)

    __hash__ = None

    def array(self):
        return np.array(self.roots, dtype=complex)


def _as_array(roots):
    if isinstance(roots, RootSet):
        return roots.array()
    return np.asarray(list(roots), dtype=complex)


@dataclass(frozen=True)
class SystemTables:
    """Affine-factor tables of the cleared Bethe system in k variables."""

    pref_l: complex
    pref_r: complex
    c_l: np.ndarray   # (k, F)
    w_l: np.ndarray   # (k, F, k)
    c_r: np.ndarray
    w_r: np.ndarray


def system_tables(spec, k):
    n = spec.n_sites
    nf = n + max(k - 1, 0)
    c_l = np.zeros((k, nf), complex)
    c_r = np.zeros((k, nf), complex)
    w_l = np.zeros((k, nf, k), complex)
    w_r = np.zeros((k, nf, k), complex)
    if spec.family is Family.XXX:
        site_l = [-zi + li for zi, li in zip(spec.z, spec.ell)]
        site_r = [-zi - li for zi, li in zip(spec.z, spec.ell)]
        lw = [1.0] * n
        rw = [1.0] * n
        # (t_a - t_b - 1) on the left, (t_a - t_b + 1) on the right
        pair_l, pair_r = (-1.0, 1.0, -1.0), (1.0, 1.0, -1.0)
        pref_r = spec.twist
    else:
        q2 = spec.qpow(2)
        site_l = [-zi for zi in spec.z]
        lw = [spec.qpow(te) for te in spec.two_ell]
        site_r = [-spec.qpow(te) * zi for zi, te in zip(spec.z, spec.two_ell)]
        rw = [1.0] * n
        # (t_a - q^2 t_b) on the left, (q^2 t_a - t_b) on the right
        pair_l, pair_r = (0.0, 1.0, -q2), (0.0, q2, -1.0)
        pref_r = spec.twist
    for a in range(k):
        c_l[a, :n] = site_l
        c_r[a, :n] = site_r
        w_l[a, :n, a] = lw
        w_r[a, :n, a] = rw
        f = n
        for b in range(k):
            if b == a:
                continue
            c_l[a, f], w_l[a, f, a], w_l[a, f, b] = pair_l
            c_r[a, f], w_r[a, f, a], w_r[a, f, b] = pair_r
            f += 1
    return SystemTables(1.0 + 0j, complex(pref_r), c_l, w_l, c_r, w_r)


def _side(pref, c, w, t):
    vals = c + w @ t
    return pref * np.prod(vals, axis=1), vals


def _leave_one_out(vals):
    """Products of all factors but one, along the last axis, without division."""
    nf = vals.shape[-1]
    pre = np.ones_like(vals)
    suf = np.ones_like(vals)
    for f in range(1, nf):
        pre[..., f] = pre[..., f - 1] * vals[..., f - 1]
        suf[..., nf - 1 - f] = suf[..., nf - f] * vals[..., nf - f]
    return pre * suf


def _check_sizes(sector, t):
    if t.shape != (sector.k,):
        raise InvalidInputError(f"expected {sector.k} rapidities, got {t.shape[0]}")


def bethe_residual(spec, sector, roots, tables=None):
    """LHS minus RHS of each cleared Bethe equation, one entry per rapidity."""
    t = _as_array(roots)
    _check_sizes(sector, t)
    if sector.k == 0:
        return np.zeros(0, complex)
    tb = tables or system_tables(spec, sector.k)
    lhs, _ = _side(tb.pref_l, tb.c_l, tb.w_l, t)
    rhs, _ = _side(tb.pref_r, tb.c_r, tb.w_r, t)
    return lhs - rhs


def residual_scale(spec, sector, roots, tables=None):
    """Per-equation magnitude bound: the larger side's product of absolute factor sizes."""
    t = _as_array(roots)
    _check_sizes(sector, t)
    if sector.k == 0:
        return np.ones(0)
    tb = tables or system_tables(spec, sector.k)
    at = np.abs(t)
    sl = abs(tb.pref_l) * np.prod(np.abs(tb.c_l) + np.abs(tb.w_l) @ at, axis=1)
    sr = abs(tb.pref_r) * np.prod(np.abs(tb.c_r) + np.abs(tb.w_r) @ at, axis=1)
    return np.maximum(np.maximum(sl, sr), np.finfo(float).tiny)


def normalized_residual(spec, sector, roots, tables=None):
    """Max over equations of ``|E_a| / scale_a``; 0 for the empty system."""
    t = _as_array(roots)
    if sector.k == 0:
        _check_sizes(sector, t)
        return 0.0
    tb = tables or system_tables(spec, sector.k)
    r = np.abs(bethe_residual(spec, sector, t, tb)) / residual_scale(spec, sector, t, tb)
    return float(np.max(r))


def bethe_jacobian(spec, sector, roots, tables=None):
    """Analytic Jacobian ``dE_a/dt_b`` by the product rule on the factored form."""
    t = _as_array(roots)
    _check_sizes(sector, t)
    tb = tables or system_tables(spec, sector.k)
    jac = np.zeros((sector.k, sector.k), complex)
    for pref, c, w, sign in ((tb.pref_l, tb.c_l, tb.w_l, 1), (tb.pref_r, tb.c_r, tb.w_r, -1)):
        vals = c + w @ t
        jac += sign * pref * np.einsum("af,afb->ab", _leave_one_out(vals), w)
    return jac


def rational_form_residual(spec, sector, roots, tol=None):
    """Residual of the customary rational form of the Bethe equations.

    XXX::

        prod_i (t_a - z_i + l_i)/(t_a - z_i - l_i) - e^mu prod_b (t_a - t_b + 1)/(t_a - t_b - 1)

    and the analogous ratio form for XXZ.  Raises :class:`PoleError` when a
    denominator vanishes.
    """
    tol = spec.tol if tol is None else tol
    t = _as_array(roots)
    _check_sizes(sector, t)
    k = sector.k
    if spec.family is Family.XXX:
        num_site = [lambda u, zi=zi, li=li: u - zi + li for zi, li in zip(spec.z, spec.ell)]
        den_site = [lambda u, zi=zi, li=li: u - zi - li for zi, li in zip(spec.z, spec.ell)]
        num_pair = lambda a, b: a - b + 1
        den_pair = lambda a, b: a - b - 1
    else:
        q2 = spec.qpow(2)
        num_site = [lambda u, zi=zi, p=spec.qpow(te): p * u - zi
                    for zi, te in zip(spec.z, spec.two_ell)]
        den_site = [lambda u, zi=zi, p=spec.qpow(te): u - p * zi
                    for zi, te in zip(spec.z, spec.two_ell)]
        num_pair = lambda a, b: q2 * a - b
        den_pair = lambda a, b: a - q2 * b
    out = np.zeros(k, complex)
    for a in range(k):
        lhs = 1.0 + 0j
        for i, (nf, df) in enumerate(zip(num_site, den_site)):
            d = df(t[a])
            if abs(d) <= tol * max(1.0, abs(t[a])):
                raise PoleError(f"site denominator vanishes for root {a}, site {i}", "site", (a, i))
            lhs *= nf(t[a]) / d
        rhs = spec.twist
        for b in range(k):
            if b == a:
                continue
            d = den_pair(t[a], t[b])
            if abs(d) <= tol * max(1.0, abs(t[a]), abs(t[b])):
                raise PoleError(f"pair denominator vanishes for roots {a}, {b}", "root", (a, b))
            rhs *= num_pair(t[a], t[b]) / d
        out[a] = lhs - rhs
    return out


def drinfeld_roots(spec):
    """Root multiset of P(u) (XXX) or Q(u) (XXZ)."""
    out = []
    for zi, te in zip(spec.z, spec.two_ell):
        for r in range(te):
            if spec.family is Family.XXX:
                out.append(zi + te / 2 - r)
            else:
                out.append(spec.qpow(te - 2 * r) * zi)
    return out


def drinfeld_polynomial(spec):
    """Monic polynomial with the Drinfeld root multiset, ascending coefficients."""
    return Polynomial.fromroots(drinfeld_roots(spec))


def eval_drinfeld(spec, u):
    """Product form of the Drinfeld polynomial; more accurate than the expanded one."""
    u = np.asarray(u, complex)
    out = np.ones_like(u)
    for r in drinfeld_roots(spec):
        out = out * (u - r)
    return out


def q_number(r, q, tol=DEFAULT_TOL):
    """q-number ``(q**r - q**-r) / (q - 1/q)``."""
    q = complex(q)
    den = q - 1 / q
    if abs(den) <= tol * max(1.0, abs(q)):
        raise InvalidInputError(f"q-number undefined at q = {q} (q^2 = 1)")
    return (q ** r - q ** (-r)) / den
