"""Full open-chain generator, irreducibility, and exact stationary states.

The generator acts on probability column vectors indexed by the big-endian
configuration codec of `TensorSpace`: columns are source configurations, so
the stationary state is the right kernel, computed exactly over rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .boundary import BoundarySpec, Side, build_boundary
from .bulk import BulkParams, bulk_markov
from .errors import DimensionCapExceeded, InvalidSpec, NonMarkovian
from .linalg import QMat, TensorSpace, embed, format_rat, nullspace

SCC_CONFIG_CAP = 100_000


@dataclass(frozen=True)
class LatticeModel:
    """One open multi-species ASEP instance."""

    n_species_total: int
    sites: int
    q: Fraction
    left: BoundarySpec
    right: BoundarySpec

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.sites < 1:
            raise InvalidSpec(f"need at least one site, got {self.sites}")
        if self.left.side is not Side.LEFT or self.right.side is not Side.RIGHT:
            raise InvalidSpec("model needs a left-side and a right-side spec")
        for spec in (self.left, self.right):
            if spec.n_species_total != self.n_species_total:
                raise InvalidSpec("boundary spec N differs from model N")
            if not spec.admissible_for(self.q):
                raise NonMarkovian(f"spec {spec.labels} inadmissible for q={self.q}")

    @property
    def space(self) -> TensorSpace:
        return TensorSpace(self.n_species_total, self.sites)

    def bulk_params(self) -> BulkParams:
        return BulkParams(self.n_species_total, self.q)


@dataclass
class StationaryResult:
    """Exact kernel of the generator; distribution is set iff the kernel is
    one-dimensional (then normalized, nonnegative, summing to 1)."""

    kernel_dimension: int
    irreducible: bool
    distribution: list | None
    kernel_basis: list

    def to_json_dict(self) -> dict:
        out = {
            "irreducible": self.irreducible,
            "kernel_dimension": self.kernel_dimension,
            "distribution": None
            if self.distribution is None
            else [format_rat(x) for x in self.distribution],
        }
        if self.distribution is None:
            out["kernel_basis"] = [
                [format_rat(x) for x in vec] for vec in self.kernel_basis
            ]
        return out

    @staticmethod
    def from_json_dict(payload: dict) -> "StationaryResult":
        from .linalg import parse_rat

        dist = payload["distribution"]
        basis = payload.get("kernel_basis", [] if dist is None else [dist])
        return StationaryResult(
            kernel_dimension=payload["kernel_dimension"],
            irreducible=payload["irreducible"],
            distribution=None if dist is None else [parse_rat(x) for x in dist],
            kernel_basis=[[parse_rat(x) for x in vec] for vec in basis],
        )


def full_markov(model: LatticeModel) -> QMat:
    """M = bulk + left boundary on site 1 + right boundary on site L."""
    space = model.space
    m = bulk_markov(model.bulk_params(), model.sites)
    m = m + embed(build_boundary(model.left, model.q), 1, space)
    m = m + embed(build_boundary(model.right, model.q), model.sites, space)
    return m


def configuration_transitions(model: LatticeModel, config):
    """Yield (target_config, rate) for every positive-rate move out of config.

    Bond swaps use rate 1 (descending pair) or q (ascending pair); boundary
    moves read the off-diagonal entries of the boundary generators. Mirrors
    the full generator entrywise, which tests verify.
    """
    q = model.q
    left = build_boundary(model.left, model.q)
    right = build_boundary(model.right, model.q)
    yield from _transitions(config, model.sites, model.n_species_total, q, left, right)


def _transitions(config, sites, n, q, left, right):
    for i in range(sites - 1):
        a, b = config[i], config[i + 1]
        if a == b:
            continue
        rate = Fraction(1) if a > b else q
        if rate != 0:
            swapped = config[:i] + (b, a) + config[i + 2 :]
            yield swapped, rate
    for site, bmat in ((0, left), (sites - 1, right)):
        src = config[site]
        for dst in range(1, n + 1):
            if dst == src:
                continue
            rate = bmat[dst - 1, src - 1]
            if rate > 0:
                yield config[:site] + (dst,) + config[site + 1 :], rate


def is_irreducible(model: LatticeModel) -> bool:
    """Strong connectivity of the positive-rate configuration digraph."""
    space = model.space
    if space.dim > SCC_CONFIG_CAP:
        raise DimensionCapExceeded(
            f"{space.dim} configurations exceed the SCC cap {SCC_CONFIG_CAP}"
        )
    n = model.n_species_total
    left = build_boundary(model.left, model.q)
    right = build_boundary(model.right, model.q)
    forward = [[] for _ in range(space.dim)]
    backward = [[] for _ in range(space.dim)]
    for idx in range(space.dim):
        config = space.config(idx)
        for target, _rate in _transitions(config, model.sites, n, model.q, left, right):
            tidx = space.flat_index(target)
            forward[idx].append(tidx)
            backward[tidx].append(idx)
    return _reaches_all(forward, 0) and _reaches_all(backward, 0)


def _reaches_all(adj, start) -> bool:
    seen = [False] * len(adj)
    seen[start] = True
    stack = [start]
    count = 1
    while stack:
        node = stack.pop()
        for nxt in adj[node]:
            if not seen[nxt]:
                seen[nxt] = True
                count += 1
                stack.append(nxt)
    return count == len(adj)


def stationary_distribution(model: LatticeModel) -> StationaryResult:
    """Exact right kernel of the generator, normalized when one-dimensional."""
    m = full_markov(model)
    basis = nullspace(m)
    assert basis, "generator with zero column sums has a nontrivial kernel"
    irreducible = is_irreducible(model)
    if len(basis) > 1:
        return StationaryResult(
            kernel_dimension=len(basis),
            irreducible=False,
            distribution=None,
            kernel_basis=[vec.data for vec in basis],
        )
    vec = basis[0].data
    total = sum(vec, Fraction(0))
    assert total != 0, "kernel vector of a one-dimensional kernel sums to zero"
    dist = [x / total for x in vec]
    assert all(x >= 0 for x in dist), "kernel vector is not sign-definite"
    return StationaryResult(
        kernel_dimension=1,
        irreducible=irreducible,
        distribution=dist,
        kernel_basis=[vec],
    )
