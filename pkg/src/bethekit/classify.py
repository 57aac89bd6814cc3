"""Admissibility / offdiagonality flags and the forbidden-point implications."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .model import Family, RootSet, close, normalized_residual


@dataclass(frozen=True)
class Classification:
    admissible: bool
    offdiagonal: bool
    near_plus_points: frozenset   # {(root index, site index)}, 0-based
    near_minus_points: frozenset
    precondition_ok: bool

    def to_dict(self):
        return {"admissible": self.admissible, "offdiagonal": self.offdiagonal,
                "near_plus_points": sorted(map(list, self.near_plus_points)),
                "near_minus_points": sorted(map(list, self.near_minus_points)),
                "precondition_ok": self.precondition_ok}


@dataclass(frozen=True)
class LemmaVerdict:
    """Outcome of the three implications on one solution.

    ``a`` is vacuously true when the precondition fails.
    """

    precondition_ok: bool
    a: bool
    b: bool
    c: bool

    @property
    def passed(self):
        return self.a and self.b and self.c

    def to_dict(self):
        return {"precondition_ok": self.precondition_ok, "a": self.a, "b": self.b,
                "c": self.c}


def _near(roots, points, tol):
    return frozenset((a, i) for a, t in enumerate(roots)
                     for i, p in enumerate(points) if close(t, p, tol))


def lemma_precondition(spec, tol=None):
    """No plus point coincides with any minus point."""
    tol = spec.tol if tol is None else tol
    return not any(close(p, m, tol) for p in spec.plus_points() for m in spec.minus_points())


def classify(spec, sector, roots, tol=1e-7):
    """Flag a root set as admissible / offdiagonal and locate forbidden points.

    ``sector`` may be None; when given, the root count is checked against it.
    """
    rs = roots if isinstance(roots, RootSet) else RootSet(tuple(roots))
    if sector is not None and len(rs) != sector.k:
        raise InvalidInputError(f"expected {sector.k} rapidities, got {len(rs)}")
    t = rs.roots
    k = len(t)
    if spec.family is Family.XXX:
        bad_pair = any(close(t[a], t[b] + 1, tol) for a in range(k) for b in range(k))
        admissible = not bad_pair
    else:
        q2 = spec.qpow(2)
        bad_pair = any(close(t[a], q2 * t[b], tol) for a in range(k) for b in range(k) if a != b)
        admissible = not bad_pair and not any(abs(x) <= tol for x in t)
    offdiagonal = not any(close(t[a], t[b], tol) for a in range(k) for b in range(a + 1, k))
    return Classification(
        admissible=admissible,
        offdiagonal=offdiagonal,
        near_plus_points=_near(t, spec.plus_points(), tol),
        near_minus_points=_near(t, spec.minus_points(), tol),
        precondition_ok=lemma_precondition(spec),
    )


def check_lemma(spec, sector, roots, residual_tol=1e-9, tol=1e-7):
    """Evaluate the forbidden-point implications on a verified solution.

    (a) precondition and admissible => no root at any plus or minus point;
    (b) no root at a plus point => admissible;
    (c) no root at a minus point => admissible.
    """
    rs = roots if isinstance(roots, RootSet) else RootSet(tuple(roots))
    res = normalized_residual(spec, sector, rs)
    if res > residual_tol:
        raise InvalidInputError(
            f"not a solution: normalized residual {res:.3e} exceeds {residual_tol:.1e}")
    c = classify(spec, sector, rs, tol)
    near_any = bool(c.near_plus_points or c.near_minus_points)
    a = not (c.precondition_ok and c.admissible) or not near_any
    b = bool(c.near_plus_points) or c.admissible
    cc = bool(c.near_minus_points) or c.admissible
    return LemmaVerdict(c.precondition_ok, a, b, cc)
