"""Finding all solutions of the Bethe system at small particle number.

``k = 1`` reduces to a univariate polynomial, solved by Aberth iteration.
``k = 2`` is eliminated exactly with a Sylvester resultant.  Larger ``k``
falls back to seeded multistart Newton on the cleared equations.  All
candidates are Newton-polished and deduplicated up to permutation.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DegenerateSystemError, InvalidInputError
from .model import (Family, RootSet, bethe_jacobian, bethe_residual, canonicalize,
                    drinfeld_roots, normalized_residual, system_tables)

log = logging.getLogger(__name__)

_SINGULAR_RCOND = 1e-6

__all__ = ["SolverConfig", "SolveOutcome", "aberth", "canonicalize", "solve",
           "solve_k1", "solve_k2", "multistart", "newton", "resultant_coefficients",
           "set_distance", "solution_radius"]


@dataclass(frozen=True)
class SolverConfig:
    newton_max_iter: int = 100
    newton_tol: float = 1e-11
    dedup_tol: float = 1e-7
    max_starts: int | None = None
    rng_seed: int = 42
    expected_count: int | None = None

    def __post_init__(self):
        if not 0 < self.newton_tol < self.dedup_tol:
            raise InvalidInputError(
                f"need 0 < newton_tol < dedup_tol, got {self.newton_tol} and {self.dedup_tol}")
        if self.newton_max_iter < 1:
            raise InvalidInputError("newton_max_iter must be positive")
        if self.max_starts is not None and self.max_starts < 0:
            raise InvalidInputError("max_starts must be nonnegative")
        if self.expected_count is not None and self.expected_count < 0:
            raise InvalidInputError("expected_count must be nonnegative")

    @property
    def starts(self):
        if self.max_starts is not None:
            return self.max_starts
        return 200 * (self.expected_count or 10)


@dataclass
class SolveOutcome:
    solutions: list
    starts_used: int = 0
    under_found: bool = False
    residual_max: float = 0.0
    n_good: int = 0
    radii: list = field(default_factory=list)

    def classify_tol(self, i, tol):
        """Proximity tolerance for solution ``i``: widened for singular solutions."""
        return max(tol, 2 * self.radii[i]) if self.radii else tol


def aberth(coeffs, tol=1e-15, max_iter=500):
    """All roots of a polynomial given by ascending coefficients.

    Aberth-Ehrlich simultaneous iteration; trailing zero coefficients
    give exact zero roots, leading zeros are dropped.
    """
    c = np.trim_zeros(np.asarray(coeffs, complex), "b")
    if c.size == 0:
        raise DegenerateSystemError("zero polynomial has no isolated roots")
    nzero = 0
    while c[nzero] == 0:
        nzero += 1
    c = c[nzero:]
    d = c.size - 1
    zeros = [0j] * nzero
    if d == 0:
        return np.array(zeros, complex)
    if d == 1:
        return np.array(zeros + [-c[0] / c[1]], complex)
    a = c / c[-1]
    # initial circle: geometric mean of root moduli
    rad = abs(a[0]) ** (1.0 / d)
    rad = max(rad, 1e-3)
    z = rad * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4))
    desc = a[::-1]
    ddesc = np.polyder(desc)
    for _ in range(max_iter):
        p = np.polyval(desc, z)
        dp = np.polyval(ddesc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            corr = ratio / (1 - ratio * s)
        corr = np.where(np.isfinite(corr), corr, 0)
        z = z - corr
        if np.all(np.abs(corr) <= tol * np.maximum(1.0, np.abs(z))):
            break
    return np.concatenate([np.array(zeros, complex), z])


def _side_poly(pref, consts, weights):
    """Coefficients (ascending) of ``pref * prod (c + w*t)`` in one variable."""
    p = np.array([pref], complex)
    for c, w in zip(consts, weights):
        p = np.convolve(p, [c, w])
    return p


def _univariate(spec):
    tb = system_tables(spec, 1)
    lhs = _side_poly(tb.pref_l, tb.c_l[0], tb.w_l[0, :, 0])
    rhs = _side_poly(tb.pref_r, tb.c_r[0], tb.w_r[0, :, 0])
    coef = lhs - rhs
    scale = np.max(np.abs(lhs)) + np.max(np.abs(rhs))
    coef[np.abs(coef) <= 1e-14 * scale] = 0
    return coef


def newton(spec, sector, t0, cfg, tables=None):
    """Damped Newton on the cleared system.

    Returns ``(t, converged)``.  The step is halved up to 20 times while
    the residual norm fails to decrease.
    """
    tb = tables or system_tables(spec, sector.k)
    t = np.array(t0, complex)
    e = bethe_residual(spec, sector, t, tb)
    nrm = np.linalg.norm(e)
    for _ in range(cfg.newton_max_iter):
        if normalized_residual(spec, sector, t, tb) <= cfg.newton_tol:
            return t, True
        jac = bethe_jacobian(spec, sector, t, tb)
        try:
            dx = np.linalg.solve(jac, -e)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(jac, -e, rcond=None)[0]
        if not np.all(np.isfinite(dx)):
            return t, False
        step = 1.0
        for _ in range(21):
            tn = t + step * dx
            en = bethe_residual(spec, sector, tn, tb)
            nn = np.linalg.norm(en)
            if np.isfinite(nn) and nn < nrm:
                break
            step /= 2
        else:
            break
        t, e, nrm = tn, en, nn
    return t, normalized_residual(spec, sector, t, tb) <= cfg.newton_tol


def set_distance(a, b):
    """Largest root displacement under the best matching of two root multisets."""
    a, b = np.asarray(list(a), complex), np.asarray(list(b), complex)
    if a.size == 0:
        return 0.0
    if a.size <= 5:
        return min(float(np.max(np.abs(a - b[list(p)])))
                   for p in itertools.permutations(range(a.size)))
    return float(np.max(np.abs(a - b)))


def solution_radius(spec, sector, t, tol, tables=None):
    """Extent of the region around ``t`` whose normalized residual stays below ``tol``.

    Zero for solutions with a well-conditioned Jacobian.  For singular
    (multiple) solutions the residual floor is reached far from the exact
    point, and this radius is the honest accuracy of the computed roots.
    """
    tb = tables or system_tables(spec, sector.k)
    if sector.k == 0:
        return 0.0
    jac = bethe_jacobian(spec, sector, t, tb)
    rows = np.linalg.norm(jac, axis=1)
    _, sv, vh = np.linalg.svd(jac / np.where(rows > 0, rows, 1.0)[:, None])
    if sv[-1] > _SINGULAR_RCOND * sv[0]:
        return 0.0
    v = vh[-1].conj()
    radius = 0.0
    # a computed singular solution sits anywhere in the flat region, so
    # probe the complex null line in several phases and keep the longest
    # reach; the residual grows along each ray, so bisect in log radius
    for phase in np.exp(2j * np.pi * np.arange(8) / 8):
        def flat(lg):
            return normalized_residual(spec, sector, t + phase * 10.0 ** lg * v, tb) <= tol
        lo, hi = -14.0, -1.0
        if not flat(lo):
            continue
        if flat(hi):
            return 10.0 ** hi
        for _ in range(12):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if flat(mid) else (lo, mid)
        radius = max(radius, 10.0 ** lo)
    return radius


def _mp_system(tb, t):
    """Cleared residual and Jacobian at ``t`` in mpmath arithmetic."""
    k = len(t)
    e = mpmath.matrix(k, 1)
    jac = mpmath.matrix(k, k)
    for a in range(k):
        for pref, c, w, sign in ((tb.pref_l, tb.c_l, tb.w_l, 1), (tb.pref_r, tb.c_r, tb.w_r, -1)):
            facs = [mpmath.mpc(c[a, f]) + mpmath.fsum(mpmath.mpc(w[a, f, j]) * t[j] for j in range(k))
                    for f in range(c.shape[1])]
            pref = mpmath.mpc(pref)
            e[a] += sign * pref * mpmath.fprod(facs)
            for f in range(len(facs)):
                rest = sign * pref * mpmath.fprod(facs[:f] + facs[f + 1:])
                for j in range(k):
                    jac[a, j] += rest * mpmath.mpc(w[a, f, j])
    return e, jac


def polish_singular(spec, sector, t, cfg, tables=None, dps=60, max_iter=800):
    """Newton in extended precision for a solution with singular Jacobian.

    Near a multiple solution double precision stalls at a distance of
    order eps**(1/m); ``dps`` digits push the attainable accuracy well
    below ``cfg.dedup_tol``.  Returns ``(t, converged)``.
    """
    tb = tables or system_tables(spec, sector.k)
    with mpmath.workdps(dps):
        x = [mpmath.mpc(complex(v)) for v in t]
        floor = mpmath.mpf(10) ** (-(dps - 10))
        for _ in range(max_iter):
            e, jac = _mp_system(tb, x)
            try:
                dx = mpmath.lu_solve(jac, -e)
            except ZeroDivisionError:
                break
            x = [xi + di for xi, di in zip(x, dx)]
            if mpmath.norm(dx) <= floor * max(1, mpmath.norm(mpmath.matrix(x))):
                break
        tn = np.array([complex(v) for v in x])
    if normalized_residual(spec, sector, tn, tb) <= cfg.newton_tol and np.all(np.isfinite(tn)):
        return tn, True
    return np.asarray(t, complex), False


def _merge(found, radii, resid, rs, r, res, tol):
    """Insert a polished solution unless it lies within an existing one's region."""
    for i, f in enumerate(found):
        scale = max(1.0, max((abs(x) for x in f), default=0.0))
        if set_distance(f, rs) <= tol * scale + r + radii[i]:
            if res < resid[i]:
                found[i], resid[i] = rs, res
            radii[i] = max(radii[i], r)
            return False
    found.append(rs)
    radii.append(r)
    resid.append(res)
    return True


def _refine_singular(spec, sector, t, cfg, tb, known):
    """Replace a member of a singular cluster by the exact multiple solution.

    ``known`` caches refined singular solutions; a candidate whose flat
    residual region reaches one of them is identified with it.  Returns
    the solution and its uncertainty radius, zero once refined.
    """
    r = solution_radius(spec, sector, t, cfg.newton_tol, tb)
    if r == 0.0:
        return t, 0.0
    for p in known:
        if set_distance(p, t) <= 10 * r:
            return p, 0.0
    tn, ok = polish_singular(spec, sector, t, cfg, tb)
    if not ok:
        return t, r
    known.append(tn)
    return tn, 0.0


def _polish_all(spec, sector, candidates, cfg):
    tb = system_tables(spec, sector.k)
    found, radii, resid, known = [], [], [], []
    for c in candidates:
        t, ok = newton(spec, sector, c, cfg, tb)
        if ok:
            t, r = _refine_singular(spec, sector, t, cfg, tb, known)
            _merge(found, radii, resid, canonicalize(t, cfg.dedup_tol), r,
                   normalized_residual(spec, sector, t, tb), cfg.dedup_tol)
    return found, radii


def solve_k1(spec, sector, cfg=None, _full=False):
    """All solutions in the one-particle sector.

    The single equation is a polynomial of degree at most N; its roots
    come from :func:`aberth` and are Newton-polished.
    """
    cfg = cfg or SolverConfig()
    sector.check(spec)
    if sector.k != 1:
        raise InvalidInputError(f"solve_k1 needs k = 1, got k = {sector.k}")
    coef = _univariate(spec)
    if not np.any(coef):
        raise DegenerateSystemError(
            "the one-particle Bethe equation vanishes identically for this twist")
    out = _outcome(spec, sector, *_polish_all(spec, sector, [[r] for r in aberth(coef)], cfg), 0, cfg)
    return out if _full else out.solutions


def _bimul(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), complex)
    for i, j in zip(*np.nonzero(a)):
        out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


def _bivariate_first_equation(spec):
    """``E_1(t1, t2)`` as a coefficient grid ``E[i, j]`` of ``t1**i t2**j``."""
    tb = system_tables(spec, 2)
    total = np.zeros((1, 1), complex)
    for pref, c, w, sign in ((tb.pref_l, tb.c_l, tb.w_l, 1), (tb.pref_r, tb.c_r, tb.w_r, -1)):
        p = np.array([[pref]], complex)
        for f in range(c.shape[1]):
            fac = np.array([[c[0, f], w[0, f, 1]], [w[0, f, 0], 0]], complex)
            p = _bimul(p, fac)
        if p.shape[0] > total.shape[0] or p.shape[1] > total.shape[1]:
            grown = np.zeros((max(p.shape[0], total.shape[0]), max(p.shape[1], total.shape[1])), complex)
            grown[:total.shape[0], :total.shape[1]] = total
            total = grown
        total[:p.shape[0], :p.shape[1]] += sign * p
    return total


def _trim_columns(e, rel=1e-14):
    """Drop trailing t2-powers whose t1-coefficient polynomial vanishes."""
    big = np.max(np.abs(e)) if e.size else 0.0
    n = e.shape[1]
    while n > 1 and np.all(np.abs(e[:, n - 1]) <= rel * big):
        n -= 1
    return e[:, :n]


def _sylvester(p, q):
    """Sylvester matrix of two univariate polynomials (ascending coefficients)."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    s = np.zeros((size, size), complex)
    pd, qd = p[::-1], q[::-1]
    for i in range(n):
        s[i, i:i + m + 1] = pd
    for i in range(m):
        s[n + i, i:i + n + 1] = qd
    return s


def resultant_coefficients(e1, e2, radius=1.0):
    """Coefficients in t1 of ``Res_{t2}(E1, E2)`` by sampling and FFT.

    The resultant is evaluated at equispaced points on ``|t1| = radius``
    and interpolated; coefficients are returned ascending, already
    unscaled.  Raises :class:`DegenerateSystemError` if it vanishes
    identically.
    """
    m, n = e1.shape[1] - 1, e2.shape[1] - 1
    deg1 = max(np.nonzero(np.any(e1 != 0, axis=1))[0], default=0)
    deg2 = max(np.nonzero(np.any(e2 != 0, axis=1))[0], default=0)
    bound = n * deg1 + m * deg2
    npts = bound + 1
    u = radius * np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.empty(npts, complex)
    hadamard = np.empty(npts)
    for j, uj in enumerate(u):
        powers = uj ** np.arange(max(e1.shape[0], e2.shape[0]))
        p = powers[:e1.shape[0]] @ e1
        q = powers[:e2.shape[0]] @ e2
        s = _sylvester(p, q)
        vals[j] = np.linalg.det(s)
        hadamard[j] = np.prod(np.linalg.norm(s, axis=1))
    if np.max(np.abs(vals)) <= 1e-12 * np.max(hadamard):
        raise DegenerateSystemError(
            "resultant vanishes identically; perturb z or the twist to generic values")
    scaled = np.fft.fft(vals) / npts
    scaled[np.abs(scaled) <= 1e-13 * np.max(np.abs(scaled))] = 0
    return scaled / radius ** np.arange(npts)


def _root_radius(spec):
    pts = drinfeld_roots(spec) + list(spec.z)
    return max(1.0, max(abs(p) for p in pts))


def solve_k2(spec, sector, cfg=None, _full=False):
    """All solutions in the two-particle sector via resultant elimination.

    ``t2`` is eliminated from the two cleared equations; each root of the
    eliminant is paired with the roots of both equations in ``t2`` and
    Newton-polished.  Diagonal and inadmissible solutions are kept.
    """
    cfg = cfg or SolverConfig()
    sector.check(spec)
    if sector.k != 2:
        raise InvalidInputError(f"solve_k2 needs k = 2, got k = {sector.k}")
    e1 = _bivariate_first_equation(spec)
    # the system is symmetric: E_2(t1, t2) = E_1(t2, t1)
    e2 = e1.T.copy()
    e1, e2 = _trim_columns(e1), _trim_columns(e2)
    rad = _root_radius(spec)
    if e1.shape[1] == 1:
        t1_roots = aberth(e1[:, 0])
    elif e2.shape[1] == 1:
        t1_roots = aberth(e2[:, 0])
    else:
        res = resultant_coefficients(e1, e2, rad)
        t1_roots = aberth(res)
    candidates = []
    for r in t1_roots:
        powers = r ** np.arange(max(e1.shape[0], e2.shape[0]))
        for e in (e1, e2):
            p = powers[:e.shape[0]] @ e
            if e.shape[1] > 1 and np.any(np.abs(p[1:]) > 1e-14 * np.max(np.abs(e))):
                candidates.extend([r, s] for s in aberth(p))
    out = _outcome(spec, sector, *_polish_all(spec, sector, candidates, cfg), 0, cfg)
    return out if _full else out.solutions


def _good(spec, roots, tol):
    # admissible and offdiagonal, counted towards expected_count
    from .classify import classify
    c = classify(spec, None, roots, tol)
    return c.admissible and c.offdiagonal


def _start_sampler(spec, rng):
    """Random starts: half in the region of the site data, half log-uniform
    over a much wider annulus, since Bethe roots can sit far from every z_i
    or near 0."""
    if spec.family is Family.XXX:
        rad = 2 * (max(abs(z) for z in spec.z) + max(spec.ell) + 1)

        def core(k):
            return rad * np.sqrt(rng.uniform(0, 1, k))
        lo, hi = 1e-3 * rad, 30 * rad
    else:
        qmax = abs(spec.qpow(max(spec.two_ell)))
        spread = max(qmax, 1 / qmax)
        c_lo = min(abs(z) for z in spec.z) / spread / 2
        c_hi = max(abs(z) for z in spec.z) * spread * 2

        def core(k):
            return np.exp(rng.uniform(np.log(c_lo), np.log(c_hi), k))
        lo, hi = 1e-3 * c_lo, 30 * c_hi

    def draw(k):
        if rng.uniform() < 0.5:
            r = core(k)
        else:
            r = np.exp(rng.uniform(np.log(lo), np.log(hi), k))
        return r * np.exp(2j * np.pi * rng.uniform(0, 1, k))
    return draw


def multistart(spec, sector, cfg=None):
    """Seeded multistart damped Newton for any ``k >= 1``.

    Stops after ``cfg.starts`` starts, or early once ``expected_count``
    admissible offdiagonal solutions have been found.
    """
    cfg = cfg or SolverConfig()
    sector.check(spec)
    k = sector.k
    rng = np.random.default_rng(cfg.rng_seed)
    draw = _start_sampler(spec, rng)
    tb = system_tables(spec, k)
    found, radii, resid, known = [], [], [], []
    n_good, used = 0, 0
    for used in range(1, cfg.starts + 1):
        t, ok = newton(spec, sector, draw(k), cfg, tb)
        if ok:
            t, r = _refine_singular(spec, sector, t, cfg, tb, known)
            rs = canonicalize(t, cfg.dedup_tol)
            if _merge(found, radii, resid, rs, r,
                      normalized_residual(spec, sector, t, tb), cfg.dedup_tol):
                n_good += _good(spec, rs, max(cfg.dedup_tol, 2 * r))
        if cfg.expected_count is not None and n_good >= cfg.expected_count:
            break
    return _outcome(spec, sector, found, radii, used, cfg)


def _outcome(spec, sector, found, radii, used, cfg):
    order = sorted(range(len(found)), key=lambda i: [(c.real, c.imag) for c in found[i].roots])
    found, radii = [found[i] for i in order], [radii[i] for i in order]
    resid = [normalized_residual(spec, sector, r) for r in found]
    n_good = sum(_good(spec, r, max(cfg.dedup_tol, 2 * d)) for r, d in zip(found, radii))
    under = cfg.expected_count is not None and n_good < cfg.expected_count
    return SolveOutcome(found, used, under, max(resid, default=0.0), n_good, radii)


def solve(spec, sector, cfg=None):
    """Solve the Bethe system in ``sector``; never raises on non-convergence.

    ``k = 0`` gives the empty solution, ``k <= 2`` uses exact elimination,
    ``k >= 3`` runs :func:`multistart`.  ``under_found`` is set when fewer
    than ``cfg.expected_count`` admissible offdiagonal solutions came back.
    """
    cfg = cfg or SolverConfig()
    sector.check(spec)
    if sector.k == 0:
        return _outcome(spec, sector, [RootSet(())], [0.0], 0, cfg)
    if sector.k <= 2:
        try:
            return (solve_k1 if sector.k == 1 else solve_k2)(spec, sector, cfg, _full=True)
        except DegenerateSystemError as exc:
            log.warning("exact elimination failed (%s); falling back to multistart", exc)
            return multistart(spec, sector, cfg)
    return multistart(spec, sector, cfg)
