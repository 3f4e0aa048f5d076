"""Bulk objects of the multi-species ASEP.

Holes count as species 1 and labels increase with priority, so a swap
t1 t2 -> t2 t1 happens at rate 1 when t1 > t2 and at rate q when t1 < t2.

Square roots of q never appear here: the Hecke generator is used in the
rationalized form A = m + q, for which the quadratic relation becomes
A^2 = (q-1) A + q and the braid relation keeps its shape. All identities
checked downstream are cleared of sqrt(q) in the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidDimension, SpectralPole
from .linalg import QMat, TensorSpace, embed, swap_operator


@dataclass(frozen=True)
class BulkParams:
    """Total species count N (holes included) and the asymmetry q > 0."""

    n_species_total: int
    q: Fraction

    def __post_init__(self):
        if self.n_species_total < 2:
            raise InvalidDimension(f"need N >= 2, got {self.n_species_total}")
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 0:
            raise InvalidDimension(f"need q > 0, got {self.q}")


def local_markov(p: BulkParams) -> QMat:
    """Two-site Markov generator m: swaps t1>t2 at rate 1, t1<t2 at rate q."""
    n = p.n_species_total
    m = QMat.zeros(n * n, n * n)
    one = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            # columns are source configurations, rows targets
            ji = j * n + i  # (j, i) with j > i: swap at rate 1
            ij = i * n + j  # (i, j) with i < j: swap at rate q
            m.data[ij * n * n + ji] += one
            m.data[ji * n * n + ji] -= one
            m.data[ji * n * n + ij] += p.q
            m.data[ij * n * n + ij] -= p.q
    return m


def permutation_operator(p: BulkParams) -> QMat:
    return swap_operator(p.n_species_total)


def r_matrix(p: BulkParams, x: Fraction) -> QMat:
    """Spectral R-matrix  P (Id + (x-1)/(qx-1) m); pole at qx = 1."""
    x = Fraction(x)
    if p.q * x == 1:
        raise SpectralPole(f"R-matrix pole at q*x = 1 (q={p.q}, x={x})")
    n2 = p.n_species_total ** 2
    coeff = (x - 1) / (p.q * x - 1)
    return swap_operator(p.n_species_total) @ (QMat.identity(n2) + coeff * local_markov(p))


def bulk_markov(p: BulkParams, sites: int) -> QMat:
    """Sum of the local generator over all bonds; zero matrix for one site."""
    if sites < 1:
        raise InvalidDimension(f"need at least one site, got {sites}")
    n = p.n_species_total
    if sites == 1:
        return QMat.zeros(n, n)
    space = TensorSpace(n, sites)
    m = local_markov(p)
    total = embed(m, 1, space)
    for i in range(2, sites):
        total = total + embed(m, i, space)
    return total


def hecke_generator_rationalized(p: BulkParams) -> QMat:
    """A = m + q Id, satisfying A^2 = (q-1) A + q and the braid relation."""
    n2 = p.n_species_total ** 2
    return local_markov(p) + p.q * QMat.identity(n2)
