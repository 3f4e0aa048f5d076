"""Boundary K-matrices: closed form, algebraic (Baxterised) form, duals.

The closed form is K(x) = Id + k(x) (b0 + x b0+ + b0-/x) over the Markovian
decomposition of the boundary generator, with the scalar

    k(x) = (x^2 - 1)(a + c) / [ (c x + a) ((a + c)(x - 1) + (q - 1) x) ].

The algebraic form rebuilds the same matrix from the single generator
e0 = (B + a + c + q - 1)/(1 - q); its geometric-series inverse is evaluated
as an exact matrix inverse, never as a truncated series. Both forms agree
entrywise wherever both are defined, which is one of the verified identities.

Everything here takes a left-template spec; right boundaries enter through
`kbar_matrix` (reversal conjugation at inverted spectral parameter).
"""

from __future__ import annotations

from fractions import Fraction

from .boundary import BoundarySpec, Side, build_boundary, decompose_boundary
from .bulk import BulkParams, r_matrix
from .errors import DegenerateQ, InvalidSpec, SingularMatrix, SpectralPole
from .linalg import (
    QMat,
    invert,
    kron,
    partial_trace,
    partial_transpose,
    reversal_matrix,
    swap_operator,
)


def _require_left(spec: BoundarySpec):
    if spec.side is not Side.LEFT:
        raise InvalidSpec("K-matrices are built from left-template specs")


def k_scalar(a: Fraction, c: Fraction, q: Fraction, x: Fraction) -> Fraction:
    """The scalar prefactor k(x); raises SpectralPole on its two pole lines."""
    a, c, q, x = Fraction(a), Fraction(c), Fraction(q), Fraction(x)
    den = (c * x + a) * ((a + c) * (x - 1) + (q - 1) * x)
    if den == 0:
        raise SpectralPole(f"k(x) pole at x={x} (a={a}, c={c}, q={q})")
    return (x * x - 1) * (a + c) / den


def k_scalar_derivative_at_one(q: Fraction) -> Fraction:
    """k'(1) = 2/(q-1), independent of the rates; guarded by tests with an
    exact central-difference probe."""
    q = Fraction(q)
    if q == 1:
        raise DegenerateQ("k'(1) undefined at q = 1")
    return Fraction(2) / (q - 1)


def k_matrix(spec: BoundarySpec, q: Fraction, x: Fraction) -> QMat:
    """Closed-form K(x) over the (b0, b0+, b0-) decomposition."""
    _require_left(spec)
    x = Fraction(x)
    if x == 0:
        raise SpectralPole("K(x) undefined at x = 0")
    b0, bp, bm = decompose_boundary(spec, q)
    k = k_scalar(spec.rate_a, spec.rate_c, q, x)
    n = spec.n_species_total
    return QMat.identity(n) + k * (b0 + x * bp + (1 / x) * bm)


def k_matrix_derivative_at_one(spec: BoundarySpec, q: Fraction) -> QMat:
    """dK/dx at x=1, exactly k'(1) B since k(1) = 0 kills the other term."""
    _require_left(spec)
    b0, bp, bm = decompose_boundary(spec, q)
    return k_scalar_derivative_at_one(q) * (b0 + bp + bm)


def e0_matrix(spec: BoundarySpec, q: Fraction) -> QMat:
    """Boundary algebra generator e0 = (B + a + c + q - 1)/(1 - q)."""
    _require_left(spec)
    q = Fraction(q)
    if q == 1:
        raise DegenerateQ("e0 undefined at q = 1")
    n = spec.n_species_total
    shift = spec.rate_a + spec.rate_c + q - 1
    return (build_boundary(spec, q) + shift * QMat.identity(n)).scale(Fraction(1) / (1 - q))


def e0_spectrum_roots(spec: BoundarySpec, q: Fraction):
    """Roots of the quartic annihilator of e0, with duplicates removed."""
    q = Fraction(q)
    if q == 1:
        raise DegenerateQ("annihilator roots undefined at q = 1")
    sigma = spec.rate_a + spec.rate_c
    roots = [Fraction(0), Fraction(-1), -spec.rate_a / sigma, -(sigma + q - 1) / (q - 1)]
    seen = []
    for r in roots:
        if r not in seen:
            seen.append(r)
    return seen


def e0_minimal_polynomial_degree(spec: BoundarySpec, q: Fraction) -> int:
    """Degree of the minimal polynomial of e0.

    The quartic annihilator factors into the distinct linear terms from
    `e0_spectrum_roots`, so the minimal polynomial is the product over roots
    that actually occur in the spectrum; a root occurs iff e0 - r is singular.
    """
    e0 = e0_matrix(spec, q)
    n = spec.n_species_total
    degree = 0
    for r in e0_spectrum_roots(spec, q):
        shifted = e0 - r * QMat.identity(n)
        try:
            invert(shifted)
        except SingularMatrix:
            degree += 1
    return degree


def k_matrix_baxterised(spec: BoundarySpec, q: Fraction, x: Fraction) -> QMat:
    """K(x) from the generator e0:

        prefactor(x) * (Id - (x-1) e0) (Id - (1/x - 1) e0)^(-1)

    with prefactor(x) = [(s+q-1)(1/x-1)+q-1] / [(s+q-1)(x-1)+q-1], s = a+c.
    The matrix inverse is exact; series expansions are never summed.
    """
    _require_left(spec)
    x = Fraction(x)
    if x == 0:
        raise SpectralPole("K(x) undefined at x = 0")
    q = Fraction(q)
    sigma = spec.rate_a + spec.rate_c
    den = (sigma + q - 1) * (x - 1) + (q - 1)
    if den == 0:
        raise SpectralPole(f"Baxterised prefactor pole at x={x}")
    pref = ((sigma + q - 1) * (1 / x - 1) + (q - 1)) / den
    e0 = e0_matrix(spec, q)
    n = spec.n_species_total
    left = QMat.identity(n) - (x - 1) * e0
    right = QMat.identity(n) - (1 / x - 1) * e0
    return pref * (left @ invert(right))


def kbar_matrix(spec: BoundarySpec, q: Fraction, x: Fraction) -> QMat:
    """Reflected boundary K-bar(x) = U K(1/x) U."""
    x = Fraction(x)
    if x == 0:
        raise SpectralPole("K-bar(x) undefined at x = 0")
    u = reversal_matrix(spec.n_species_total)
    return u @ k_matrix(spec, q, 1 / x) @ u


def dual_k_matrix(spec: BoundarySpec, q: Fraction, x: Fraction) -> QMat:
    """Dual boundary matrix closing the open transfer matrix.

    Computed as the auxiliary-space trace of
    K-bar(1/x) x Id times the partial-transposed-inverse-transposed R(x^2),
    times the factor swap. Raises SpectralPole / SingularMatrix at the finite
    set of x where R(x^2) or the partially transposed inverse degenerates.
    """
    _require_left(spec)
    x = Fraction(x)
    if x == 0:
        raise SpectralPole("dual K undefined at x = 0")
    n = spec.n_species_total
    params = BulkParams(n, q)
    r = r_matrix(params, x * x)
    dims = [n, n]
    r_t1 = partial_transpose(r, 2, dims)
    try:
        inv = invert(r_t1)
    except SingularMatrix as exc:
        raise SingularMatrix(f"partially transposed R(x^2) singular at x={x}") from exc
    dressed = partial_transpose(inv, 2, dims)
    kbar_at = kron(kbar_matrix(spec, q, 1 / x), QMat.identity(n))
    w = kbar_at @ dressed @ swap_operator(n)
    return partial_trace(w, 1, dims)
