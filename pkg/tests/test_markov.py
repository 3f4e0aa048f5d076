"""Full generator assembly, irreducibility, exact stationary states."""

from fractions import Fraction

import pytest

from masep.boundary import BoundarySpec, Side, Variant
from masep.errors import DimensionCapExceeded, InvalidSpec, NonMarkovian
from masep.linalg import QMat, TensorSpace
from masep.markov import (
    LatticeModel,
    configuration_transitions,
    full_markov,
    is_irreducible,
    stationary_distribution,
)

from conftest import admissible_draw, assert_markovian


def model(n, sites, q, left_labels, right_labels, rates=(1, 1, 1, 1), variants=None):
    la, lc, rb, rd = (Fraction(r) for r in rates)
    lv, rv = variants or (Variant.INERT, Variant.INERT)
    return LatticeModel(
        n,
        sites,
        Fraction(q),
        BoundarySpec(Side.LEFT, la, lc, *left_labels, variant=lv, n_species_total=n),
        BoundarySpec(Side.RIGHT, rb, rd, *right_labels, variant=rv, n_species_total=n),
    )


def pairing_3_4(n):
    """Boundary pairing with a species-connecting cycle (odd/even cases)."""
    if n % 2 == 1:
        k = (n - 1) // 2
        return (2, k + 1, k + 2, n), (1, k, k + 1, n - 1)
    k = (n - 2) // 2
    return (2, k + 1, k + 3, n), (1, k, k + 2, n - 1)


def test_model_validation():
    left = BoundarySpec(Side.LEFT, Fraction(1), Fraction(1), 1, 1, 2, 2, n_species_total=2)
    right = BoundarySpec(Side.RIGHT, Fraction(1), Fraction(1), 1, 1, 2, 2, n_species_total=2)
    with pytest.raises(InvalidSpec):
        LatticeModel(2, 0, Fraction(1), left, right)
    with pytest.raises(InvalidSpec):
        LatticeModel(2, 2, Fraction(1), right, left)  # sides swapped
    with pytest.raises(NonMarkovian):
        LatticeModel(2, 2, Fraction(1, 4), left.with_rates(Fraction(1, 4), Fraction(1, 4)), right)


def test_full_markov_single_site_fixture():
    # gamma = delta = 0 gives the plain two-state injection/extraction chain
    m = model(2, 1, "1/2", (1, 1, 2, 2), (1, 1, 2, 2), rates=(1, 0, 2, 0))
    assert full_markov(m) == QMat.from_rows([[-1, 2], [1, -2]])


def test_full_markov_two_sites_entries():
    q = Fraction(1, 3)
    m = model(2, 2, q, (1, 1, 2, 2), (1, 1, 2, 2), rates=(1, 2, 3, 4))
    mat = full_markov(m)
    space = TensorSpace(2, 2)
    up = space.flat_index((1, 2))    # particle on site 2
    down = space.flat_index((2, 1))  # particle on site 1
    assert mat[up, down] == 1        # descending pair swaps at rate 1
    assert mat[down, up] == q        # ascending pair swaps at rate q
    assert_markovian(mat)


def test_full_markov_generator_properties(rng):
    a, c, q = admissible_draw(rng)
    m = model(3, 3, q, (2, 2, 3, 3), (1, 1, 2, 2), rates=(a, c, c, a))
    assert_markovian(full_markov(m))


def test_transitions_match_generator():
    # the transition enumerator is an independent assembly of the generator
    m = model(3, 2, "2/3", (2, 2, 3, 3), (1, 1, 2, 2), rates=(1, 2, 3, 1))
    mat = full_markov(m)
    space = m.space
    rebuilt = QMat.zeros(space.dim, space.dim)
    for idx in range(space.dim):
        config = space.config(idx)
        for target, rate in configuration_transitions(m, config):
            tgt = space.flat_index(target)
            rebuilt.data[tgt * space.dim + idx] += rate
            rebuilt.data[idx * space.dim + idx] -= rate
    assert rebuilt == mat


def test_exp_positivity_surrogate(rng):
    a, c, q = admissible_draw(rng)
    m = model(2, 3, q, (1, 1, 2, 2), (1, 1, 2, 2), rates=(a, c, 1, 1))
    mat = full_markov(m)
    max_diag = max(-mat[i, i] for i in range(mat.rows))
    eps = Fraction(1, 2) / max_diag
    step = QMat.identity(mat.rows) + eps * mat
    assert all(x >= 0 for x in step.data)


@pytest.mark.parametrize("n,sites", [(3, 2), (3, 3), (4, 2), (5, 2)])
def test_irreducible_pairings(n, sites):
    left, right = pairing_3_4(n)
    m = model(n, sites, "1/2", left, right)
    assert is_irreducible(m)


def test_reducible_when_particles_only_die():
    # neither boundary creates particles: the all-holes state is absorbing
    m = model(2, 2, "1/2", (1, 1, 2, 2), (1, 1, 2, 2), rates=(0, 1, 1, 0))
    assert not is_irreducible(m)
    st = stationary_distribution(m)
    assert st.kernel_dimension == 1 and not st.irreducible
    assert st.distribution[0] == 1  # all mass on the all-holes configuration


def test_inert_intermediate_blocks_irreducibility():
    # both boundaries leave the intermediate species untouched (inert
    # variant, labels self-reflected), so the single-site chain splits into
    # the sector {1, 3} and the isolated configuration 2: kernel dim 2
    m = model(3, 1, "2", (1, 1, 3, 3), (1, 1, 3, 3))
    assert not is_irreducible(m)
    st = stationary_distribution(m)
    assert st.kernel_dimension == 2
    assert st.distribution is None and len(st.kernel_basis) == 2


def test_stationary_single_site():
    alpha, beta = Fraction(1), Fraction(2)
    m = model(2, 1, "1/2", (1, 1, 2, 2), (1, 1, 2, 2), rates=(alpha, 0, beta, 0))
    st = stationary_distribution(m)
    assert st.distribution == [beta / (alpha + beta), alpha / (alpha + beta)]
    assert st.irreducible and st.kernel_dimension == 1
    # serialized report re-parses into the same structure
    from masep.markov import StationaryResult

    payload = st.to_json_dict()
    back = StationaryResult.from_json_dict(payload)
    assert back.distribution == st.distribution
    assert back.to_json_dict() == payload


def test_stationary_strictly_positive_when_irreducible(rng):
    a, c, q = admissible_draw(rng)
    m = model(3, 2, q, (2, 2, 3, 3), (1, 1, 2, 2), rates=(a, c, 1, 2))
    st = stationary_distribution(m)
    assert st.irreducible
    assert all(x > 0 for x in st.distribution)
    mat = full_markov(m)
    assert (mat @ QMat.column(st.distribution)).is_zero()
    assert sum(st.distribution) == 1


def test_stationary_against_float_evolution():
    scipy = pytest.importorskip("scipy")
    import numpy as np

    m = model(2, 2, "3/5", (1, 1, 2, 2), (1, 1, 2, 2), rates=(1, 0, 1, 0))
    st = stationary_distribution(m)
    mat = full_markov(m)
    dense = np.array([[float(mat[i, j]) for j in range(4)] for i in range(4)])
    prop = scipy.linalg.expm(dense * 200.0)
    evolved = prop @ np.full(4, 0.25)
    exact = np.array([float(x) for x in st.distribution])
    assert np.max(np.abs(evolved - exact)) < 1e-10


def test_stationary_reversal_covariance(rng):
    # relabeling species by reversal and flipping the chain maps the model
    # with swapped, reflected boundaries onto the original one
    from masep.boundary import reflected_labels

    a, c, q = admissible_draw(rng)
    n, sites = 3, 2
    m = model(n, sites, q, (2, 2, 3, 3), (1, 1, 2, 2), rates=(a, c, c, a))
    mirrored = LatticeModel(
        n,
        sites,
        q,
        BoundarySpec(
            Side.LEFT, m.right.rate_a, m.right.rate_c,
            *reflected_labels(n, m.right.labels),
            variant=m.right.variant, n_species_total=n,
        ),
        BoundarySpec(
            Side.RIGHT, m.left.rate_a, m.left.rate_c,
            *reflected_labels(n, m.left.labels),
            variant=m.left.variant, n_species_total=n,
        ),
    )
    st = stationary_distribution(m).distribution
    st_mirror = stationary_distribution(mirrored).distribution
    space = m.space
    for idx in range(space.dim):
        config = space.config(idx)
        image = tuple(n + 1 - t for t in reversed(config))
        assert st[idx] == st_mirror[space.flat_index(image)]


def test_scc_cap():
    m = model(2, 17, "1/2", (1, 1, 2, 2), (1, 1, 2, 2))
    with pytest.raises(DimensionCapExceeded):
        is_irreducible(m)
