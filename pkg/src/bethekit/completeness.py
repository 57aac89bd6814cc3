"""Expected solution counts from sl2 weight combinatorics (exact integers)."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Family


@dataclass(frozen=True)
class CountReport:
    expected: int
    found_admissible_offdiagonal: int
    found_total: int
    conjectural: bool = False

    @property
    def match(self):
        return self.expected == self.found_admissible_offdiagonal

    def to_dict(self):
        return {"expected": self.expected,
                "found_admissible_offdiagonal": self.found_admissible_offdiagonal,
                "found_total": self.found_total, "match": self.match,
                "conjectural": self.conjectural}


def weight_generating_polynomial(two_ell):
    """Coefficients of prod_i (1 + x + ... + x**(2 l_i))."""
    poly = [1]
    for te in two_ell:
        out = [0] * (len(poly) + te)
        for i, c in enumerate(poly):
            if c:
                for j in range(te + 1):
                    out[i + j] += c
        poly = out
    return poly


def weight_subspace_dim(two_ell, k):
    """Number of ways to place k excitations on sites of capacity 2*l_i."""
    poly = weight_generating_polynomial(two_ell)
    return poly[k] if 0 <= k < len(poly) else 0


def singular_vector_count(two_ell, k):
    """Highest-weight vectors with S_z = sum(l) - k; zero when S_z < 0."""
    if k < 0 or 2 * k > sum(two_ell):
        return 0
    return weight_subspace_dim(two_ell, k) - weight_subspace_dim(two_ell, k - 1)


def expected_count(spec, sector):
    """Expected number of admissible offdiagonal solutions and whether it is conjectural.

    Generic twist gives the weight-subspace dimension.  Periodic XXX gives
    the singular-vector count; periodic XXZ keeps the weight dimension
    (conjectural, valid off roots of unity).  Homogeneous chains are
    always marked conjectural.
    """
    two_ell, k = spec.two_ell, sector.k
    conj = spec.is_homogeneous() and spec.n_sites > 1
    if spec.is_periodic():
        if spec.family is Family.XXX:
            return singular_vector_count(two_ell, k), conj
        return weight_subspace_dim(two_ell, k), True
    return weight_subspace_dim(two_ell, k), conj


def completeness_report(spec, sector, outcome, classifications):
    good = sum(1 for c in classifications if c.admissible and c.offdiagonal)
    expected, conj = expected_count(spec, sector)
    return CountReport(expected, good, len(outcome.solutions), conj)
