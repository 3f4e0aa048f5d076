"""Zero-tolerance checks of the algebraic integrability identities.

Functional identities in the spectral parameter are verified by exact
rational evaluation at pseudo-random rational points (polynomial identity
testing): after clearing denominators both sides are polynomial of bounded
degree, so exact agreement at more distinct non-pole points than the degree
bound certifies the identity; the per-check bound travels with the report
under ``degree_bound`` (a per-variable bound on the cleared numerators).

Sample points hitting a pole of any factor are redrawn (at most 100 attempts
per point, logged in the report notes). Every check returns a CheckReport
whose ``witness`` pinpoints the first differing matrix entry, if any.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .boundary import BoundarySpec, decompose_boundary, reflected_spec, tilde_rates
from .bulk import BulkParams, local_markov
from .errors import DegenerateQ, DimensionCapExceeded, SingularMatrix, SpectralPole
from .kmatrix import (
    dual_k_matrix,
    e0_matrix,
    e0_minimal_polynomial_degree,
    k_matrix,
)
from .linalg import (
    QMat,
    TensorSpace,
    embed,
    embed_pair,
    format_rat,
    invert,
    kron,
    partial_trace,
    swap_operator,
)

# Per-variable degree bounds of the cleared polynomial identities; PIT needs
# more distinct sample values per variable than the bound to constitute proof.
DEGREE_BOUNDS = {
    "ybe": 4,            # three bilinear R factors per side
    "runitarity": 2,     # one R factor per side of the product
    "reflection": 10,    # two R factors (deg 2) and two K factors (deg 3) per side
    "kunitarity": 6,     # two K factors, each rational of degree <= 3
    "hecke": 0,          # no spectral parameter
    "algebra": 0,
    "lemma": 0,
    "poly": 0,
    "cyclotomic": 0,
    "transfer": None,    # filled per model: 4L + 12 with L chain sites
}


class SampleExhausted(Exception):
    """More than the allowed redraw attempts hit poles."""


@dataclass
class CheckReport:
    """Outcome of one identity check; passed is True iff witness is None."""

    check_name: str
    parameters: dict
    seed: int | None
    sample_points: list = field(default_factory=list)
    passed: bool = True
    witness: dict | None = None
    notes: list = field(default_factory=list)

    def record_failure(self, witness: dict):
        if self.passed:
            self.passed = False
            self.witness = witness

    def to_json_dict(self) -> dict:
        return {
            "check": self.check_name,
            "params": self.parameters,
            "seed": self.seed,
            "samples": self.sample_points,
            "passed": self.passed,
            "witness": self.witness,
            "notes": self.notes,
        }

    @staticmethod
    def from_json_dict(payload: dict) -> "CheckReport":
        return CheckReport(
            check_name=payload["check"],
            parameters=payload["params"],
            seed=payload["seed"],
            sample_points=payload["samples"],
            passed=payload["passed"],
            witness=payload["witness"],
            notes=payload.get("notes", []),
        )


class SpectralSampler:
    """Seeded positive-rational sampler with pole-rejection redraws."""

    MAX_ATTEMPTS = 100

    def __init__(self, seed: int, max_int: int = 40):
        self.seed = seed
        self.max_int = max_int
        self._rng = random.Random(seed)
        self.redraw_log: list[str] = []

    def _raw(self) -> Fraction:
        num = self._rng.randint(1, self.max_int)
        den = self._rng.randint(1, self.max_int)
        return Fraction(num, den)

    def draw(self, count: int, evaluate):
        """Draw a tuple of `count` rationals on which `evaluate` does not
        raise SpectralPole/SingularMatrix; returns (points, value)."""
        for _ in range(self.MAX_ATTEMPTS):
            pts = tuple(self._raw() for _ in range(count))
            if any(p == 1 for p in pts):
                continue  # x = 1 makes most identities trivially true
            try:
                return pts, evaluate(*pts)
            except (SpectralPole, SingularMatrix) as exc:
                self.redraw_log.append(
                    f"redrew {tuple(format_rat(p) for p in pts)}: {exc}"
                )
        raise SampleExhausted(
            f"no pole-free sample found in {self.MAX_ATTEMPTS} attempts"
        )


def _first_diff(lhs: QMat, rhs: QMat, extra: dict | None = None):
    """Witness dict for the first differing entry, or None if equal."""
    if lhs == rhs:
        return None
    for idx, (lv, rv) in enumerate(zip(lhs.data, rhs.data)):
        if lv != rv:
            w = {
                "position": [idx // lhs.cols, idx % lhs.cols],
                "lhs": format_rat(lv),
                "rhs": format_rat(rv),
            }
            if extra:
                w.update(extra)
            return w
    return None  # pragma: no cover


def _points_json(points) -> list:
    return [format_rat(p) for p in points]


def _base_params(**kwargs) -> dict:
    out = {}
    for key, value in kwargs.items():
        if isinstance(value, Fraction):
            out[key] = format_rat(value)
        elif isinstance(value, BoundarySpec):
            out[key] = value.to_record()
        else:
            out[key] = value
    return out


def _run_sampled(report: CheckReport, sampler: SpectralSampler, samples: int,
                 count: int, evaluate):
    """Shared driver: draw `samples` tuples, record the first mismatch."""
    try:
        for _ in range(samples):
            pts, witness = sampler.draw(count, evaluate)
            report.sample_points.append(_points_json(pts))
            if witness is not None:
                witness["sample"] = _points_json(pts)
                report.record_failure(witness)
                break
    except SampleExhausted as exc:
        report.record_failure({"kind": "sample-exhaustion", "detail": str(exc)})
    report.notes.extend(sampler.redraw_log)
    return report


def _r_builder(p: BulkParams, m_local: QMat | None = None):
    m = local_markov(p) if m_local is None else m_local
    n2 = p.n_species_total ** 2
    perm = swap_operator(p.n_species_total)
    ident = QMat.identity(n2)

    def r(x: Fraction) -> QMat:
        if p.q * x == 1:
            raise SpectralPole(f"R pole at q x = 1 (x={x})")
        return perm @ (ident + ((x - 1) / (p.q * x - 1)) * m)

    return r


# ---- bulk checks -----------------------------------------------------------


def check_ybe(p: BulkParams, samples: int, seed: int,
              local_matrix: QMat | None = None) -> CheckReport:
    """R12 R13 R23 = R23 R13 R12 on three factors at sampled (x1, x2, x3)."""
    report = CheckReport(
        "ybe",
        _base_params(n=p.n_species_total, q=p.q, samples=samples,
                     degree_bound=DEGREE_BOUNDS["ybe"]),
        seed,
    )
    r = _r_builder(p, local_matrix)
    space = TensorSpace(p.n_species_total, 3)

    def evaluate(x1, x2, x3):
        r12 = embed_pair(r(x1 / x2), 1, 2, space)
        r13 = embed_pair(r(x1 / x3), 1, 3, space)
        r23 = embed_pair(r(x2 / x3), 2, 3, space)
        return _first_diff(r12 @ r13 @ r23, r23 @ r13 @ r12)

    return _run_sampled(report, SpectralSampler(seed), samples, 3, evaluate)


def check_r_unitarity(p: BulkParams, samples: int, seed: int,
                      local_matrix: QMat | None = None) -> CheckReport:
    """R12(x) R21(1/x) = Id at sampled x."""
    report = CheckReport(
        "runitarity",
        _base_params(n=p.n_species_total, q=p.q, samples=samples,
                     degree_bound=DEGREE_BOUNDS["runitarity"]),
        seed,
    )
    r = _r_builder(p, local_matrix)
    perm = swap_operator(p.n_species_total)
    ident = QMat.identity(p.n_species_total ** 2)

    def evaluate(x):
        r21 = perm @ r(1 / x) @ perm
        return _first_diff(r(x) @ r21, ident)

    return _run_sampled(report, SpectralSampler(seed), samples, 1, evaluate)


def check_hecke(p: BulkParams, local_matrix: QMat | None = None) -> CheckReport:
    """Rationalized quadratic m^2 = -(1+q) m and braid A1 A2 A1 = A2 A1 A2."""
    report = CheckReport(
        "hecke",
        _base_params(n=p.n_species_total, q=p.q, degree_bound=DEGREE_BOUNDS["hecke"]),
        seed=None,
    )
    m = local_markov(p) if local_matrix is None else local_matrix
    n2 = p.n_species_total ** 2
    quad = _first_diff(m @ m, (-(1 + p.q)) * m, {"relation": "quadratic"})
    if quad is not None:
        report.record_failure(quad)
        return report
    a = m + p.q * QMat.identity(n2)
    space = TensorSpace(p.n_species_total, 3)
    a1 = embed(a, 1, space)
    a2 = embed(a, 2, space)
    braid = _first_diff(a1 @ a2 @ a1, a2 @ a1 @ a2, {"relation": "braid"})
    if braid is not None:
        report.record_failure(braid)
    return report


# ---- boundary checks -------------------------------------------------------


def check_reflection(spec: BoundarySpec, q: Fraction, samples: int, seed: int) -> CheckReport:
    """R12(x1/x2) K1(x1) R21(x1 x2) K2(x2) = K2(x2) R12(x1 x2) K1(x1) R21(x1/x2)."""
    q = Fraction(q)
    report = CheckReport(
        "reflection",
        _base_params(spec=spec, q=q, samples=samples,
                     degree_bound=DEGREE_BOUNDS["reflection"]),
        seed,
    )
    n = spec.n_species_total
    p = BulkParams(n, q)
    r = _r_builder(p)
    perm = swap_operator(n)
    ident = QMat.identity(n)

    def evaluate(x1, x2):
        k1 = kron(k_matrix(spec, q, x1), ident)
        k2 = kron(ident, k_matrix(spec, q, x2))
        r21_ratio = perm @ r(x1 / x2) @ perm
        r21_prod = perm @ r(x1 * x2) @ perm
        lhs = r(x1 / x2) @ k1 @ r21_prod @ k2
        rhs = k2 @ r(x1 * x2) @ k1 @ r21_ratio
        return _first_diff(lhs, rhs)

    return _run_sampled(report, SpectralSampler(seed), samples, 2, evaluate)


def check_k_unitarity(spec: BoundarySpec, q: Fraction, samples: int, seed: int) -> CheckReport:
    """K(x) K(1/x) = Id at sampled x."""
    q = Fraction(q)
    report = CheckReport(
        "kunitarity",
        _base_params(spec=spec, q=q, samples=samples,
                     degree_bound=DEGREE_BOUNDS["kunitarity"]),
        seed,
    )
    ident = QMat.identity(spec.n_species_total)

    def evaluate(x):
        return _first_diff(k_matrix(spec, q, x) @ k_matrix(spec, q, 1 / x), ident)

    return _run_sampled(report, SpectralSampler(seed), samples, 1, evaluate)


def check_boundary_algebra(spec: BoundarySpec, q: Fraction,
                           boundary: QMat | None = None) -> CheckReport:
    """Four-term exchange relation between the bulk generator and e0.

    In the sqrt(q)-cleared form on two sites, with A = m + q and E0 the
    boundary generator acting on site 1:

        A E0 A E0 - E0 A E0 A = (q-1)(E0^2 A E0 - E0 A E0^2).

    An explicit `boundary` matrix may replace the family matrix (used to
    probe non-family and mutated boundaries, which must fail).
    """
    q = Fraction(q)
    if q == 1:
        raise DegenerateQ("boundary algebra check needs q != 1")
    report = CheckReport(
        "algebra",
        _base_params(spec=spec, q=q, degree_bound=DEGREE_BOUNDS["algebra"],
                     boundary_override=boundary is not None),
        seed=None,
    )
    n = spec.n_species_total
    if boundary is None:
        e0 = e0_matrix(spec, q)
    else:
        shift = spec.rate_a + spec.rate_c + q - 1
        e0 = (boundary + shift * QMat.identity(n)).scale(Fraction(1) / (1 - q))
    space = TensorSpace(n, 2)
    big_e0 = embed(e0, 1, space)
    a = local_markov(BulkParams(n, q)) + q * QMat.identity(n * n)
    lhs = a @ big_e0 @ a @ big_e0 - big_e0 @ a @ big_e0 @ a
    e0sq = big_e0 @ big_e0
    rhs = (q - 1) * (e0sq @ a @ big_e0 - big_e0 @ a @ e0sq)
    witness = _first_diff(lhs, rhs)
    if witness is not None:
        report.record_failure(witness)
    return report


def check_lemma_relations(spec: BoundarySpec, q: Fraction, k_max: int) -> CheckReport:
    """Power-ladder consequences of the exchange relation, k = 0..k_max.

    All four families carry the bulk generator twice on the left and once
    (with the Hecke constant) on the right, so clearing sqrt(q) replaces the
    generator by A = m + q and the constant by q - 1.
    """
    q = Fraction(q)
    if q == 1:
        raise DegenerateQ("ladder relations need q != 1")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    report = CheckReport(
        "lemma",
        _base_params(spec=spec, q=q, k_max=k_max, degree_bound=DEGREE_BOUNDS["lemma"]),
        seed=None,
    )
    n = spec.n_species_total
    space = TensorSpace(n, 2)
    e = embed(e0_matrix(spec, q), 1, space)
    a = local_markov(BulkParams(n, q)) + q * QMat.identity(n * n)
    ident = QMat.identity(n * n)
    f = e + ident
    e_pow = [ident]
    f_pow = [ident]
    for _ in range(k_max + 1):
        e_pow.append(e_pow[-1] @ e)
        f_pow.append(f_pow[-1] @ f)
    w = q - 1
    for k in range(k_max + 1):
        ladder = w * (e_pow[k + 1] @ a @ e - e @ a @ e_pow[k + 1])
        checks = [
            ("ladder-1", a @ e @ a @ e_pow[k] - e_pow[k] @ a @ e @ a, ladder),
            ("ladder-2", a @ e_pow[k] @ a @ e - e @ a @ e_pow[k] @ a,
             ladder + w * (e_pow[k] @ a @ e - e @ a @ e_pow[k])),
            ("ladder-3", a @ f_pow[k] @ a @ e - e @ a @ f_pow[k] @ a,
             w * (f_pow[k + 1] @ a @ e - e @ a @ f_pow[k + 1])),
            ("ladder-4", a @ (e @ f_pow[k]) @ a @ e - e @ a @ (e @ f_pow[k]) @ a,
             w * (e @ f_pow[k + 1] @ a @ e - e @ a @ e @ f_pow[k + 1])),
        ]
        for name, lhs, rhs in checks:
            witness = _first_diff(lhs, rhs, {"relation": name, "k": k})
            if witness is not None:
                report.record_failure(witness)
                return report
    return report


def check_poly_relations(spec: BoundarySpec, q: Fraction) -> CheckReport:
    """Quadratic relations of the decomposition parts and the e0 quartic."""
    q = Fraction(q)
    report = CheckReport(
        "poly",
        _base_params(spec=spec, q=q, degree_bound=DEGREE_BOUNDS["poly"]),
        seed=None,
    )
    n = spec.n_species_total
    a, c = spec.rate_a, spec.rate_c
    at, ct = tilde_rates(a, c, q)
    b0, bp, bm = decompose_boundary(spec, q)
    zero = QMat.zeros(n, n)
    relations = [
        ("b0^2", b0 @ b0, (-(a + ct)) * b0 + at * bp + c * bm),
        ("b0p^2", bp @ bp, (-c) * bp),
        ("b0m^2", bm @ bm, (-at) * bm),
        ("b0.b0p", b0 @ bp, (-a) * bp),
        ("b0p.b0", bp @ b0, (-a) * bp),
        ("b0.b0m", b0 @ bm, (-ct) * bm),
        ("b0m.b0", bm @ b0, (-ct) * bm),
        ("b0p.b0m", bp @ bm, zero),
        ("b0m.b0p", bm @ bp, zero),
    ]
    for name, lhs, rhs in relations:
        witness = _first_diff(lhs, rhs, {"relation": name})
        if witness is not None:
            report.record_failure(witness)
            return report
    if q == 1:
        report.notes.append("quartic annihilator skipped at q = 1 (e0 undefined)")
        return report
    e0 = e0_matrix(spec, q)
    ident = QMat.identity(n)
    sigma = a + c
    quartic = (
        e0
        @ (e0 + ident)
        @ (e0 + (a / sigma) * ident)
        @ (e0 + ((sigma + q - 1) / (q - 1)) * ident)
    )
    witness = _first_diff(quartic, zero, {"relation": "quartic"})
    if witness is not None:
        report.record_failure(witness)
    return report


def check_cyclotomic_map(spec: BoundarySpec, q: Fraction) -> CheckReport:
    """Commuting-square relation for ebar0 = e0 (1 + e0)^(-1), when defined.

    When 1 + e0 is singular the report carries outcome "not-invertible"
    (these boundaries are exactly the reason the four-term relation is needed
    instead of the plain commuting square); this is a result, not a failure.
    """
    q = Fraction(q)
    if q == 1:
        raise DegenerateQ("cyclotomic map needs q != 1")
    report = CheckReport(
        "cyclotomic",
        _base_params(spec=spec, q=q, degree_bound=DEGREE_BOUNDS["cyclotomic"]),
        seed=None,
    )
    n = spec.n_species_total
    e0 = e0_matrix(spec, q)
    report.parameters["minimal_polynomial_degree"] = e0_minimal_polynomial_degree(spec, q)
    ident = QMat.identity(n)
    try:
        inv = invert(e0 + ident)
    except SingularMatrix:
        report.parameters["outcome"] = "not-invertible"
        report.notes.append("1 + e0 singular: commuting-square generator undefined")
        return report
    report.parameters["outcome"] = "verified"
    ebar = e0 @ inv
    space = TensorSpace(n, 2)
    big = embed(ebar, 1, space)
    a = local_markov(BulkParams(n, q)) + q * QMat.identity(n * n)
    witness = _first_diff(a @ big @ a @ big, big @ a @ big @ a)
    if witness is not None:
        report.record_failure(witness)
    return report


# ---- transfer matrix -------------------------------------------------------


def transfer_matrix(model, x: Fraction) -> QMat:
    """Open-chain transfer matrix at spectral parameter x.

    The auxiliary space is tensor factor 1; chain site i sits at factor i+1.
    The dual boundary matrix is built from the reflected right spec so that
    the derivative of the family reproduces the full Markov generator.
    """
    x = Fraction(x)
    n = model.n_species_total
    length = model.sites
    q = model.q
    p = BulkParams(n, q)
    r = _r_builder(p)
    space = TensorSpace(n, length + 1)
    rx = r(x)
    prod = embed_pair(rx, 1, length + 1, space)
    for i in range(length - 1, 0, -1):
        prod = prod @ embed_pair(rx, 1, i + 1, space)
    prod = prod @ embed(k_matrix(model.left, q, x), 1, space)
    for i in range(1, length + 1):
        prod = prod @ embed_pair(rx, i + 1, 1, space)
    ktilde = dual_k_matrix(reflected_spec(model.right), q, x)
    prod = prod @ embed(ktilde, 1, space)
    return partial_trace(prod, 1, [n] * (length + 1))


def check_transfer_commutation(model, samples: int, seed: int,
                               dimension_cap: int = 256) -> CheckReport:
    """[t(x), t(y)] = 0 for sampled pairs and [t(x), M] = 0 for the model."""
    from .markov import full_markov

    n = model.n_species_total
    bound = 4 * model.sites + 12
    report = CheckReport(
        "transfer",
        _base_params(n=n, l=model.sites, q=model.q,
                     left=model.left, right=model.right,
                     samples=samples, dimension_cap=dimension_cap,
                     degree_bound=bound),
        seed,
    )
    full_dim = n ** (model.sites + 1)
    if full_dim > dimension_cap:
        raise DimensionCapExceeded(
            f"transfer check needs dimension {full_dim} > cap {dimension_cap}"
        )
    m = full_markov(model)
    sampler = SpectralSampler(seed)
    transfers = []
    try:
        for _ in range(samples):
            pts, t = sampler.draw(1, lambda x: transfer_matrix(model, x))
            report.sample_points.append(_points_json(pts))
            transfers.append((pts[0], t))
    except SampleExhausted as exc:
        report.record_failure({"kind": "sample-exhaustion", "detail": str(exc)})
        report.notes.extend(sampler.redraw_log)
        return report
    report.notes.extend(sampler.redraw_log)
    zero = QMat.zeros(n ** model.sites, n ** model.sites)
    for x, t in transfers:
        witness = _first_diff(t.commutator(m), zero,
                              {"relation": "[t(x), M]", "x": format_rat(x)})
        if witness is not None:
            report.record_failure(witness)
            return report
    for i in range(len(transfers)):
        for j in range(i + 1, len(transfers)):
            x, tx = transfers[i]
            y, ty = transfers[j]
            witness = _first_diff(
                tx.commutator(ty), zero,
                {"relation": "[t(x), t(y)]", "x": format_rat(x), "y": format_rat(y)},
            )
            if witness is not None:
                report.record_failure(witness)
                return report
    return report
