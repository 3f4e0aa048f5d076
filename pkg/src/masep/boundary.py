"""The integrable boundary family of the multi-species ASEP.

A boundary is labeled by two rates (a, c) and four integers
1 <= s1 <= s2 < f2 <= f1 <= N with f1 - f2 = s2 - s1. The integers split the
species into five classes; the class of a species fixes which boundary
transitions it undergoes:

* very slow (t < s1):      t -> s1 at rate c,        t -> f1 at rate a
* slow (s1 <= t <= s2):    t -> s1+f1-t at rate a
* intermediate (s2<t<f2):  inert variant: nothing;
                           decaying variant: t -> s2 at rate c~, t -> f2 at rate a
* fast (f2 <= t <= f1):    t -> s1+f1-t at rate c~
* very fast (t > f1):      t -> s1 at rate c~,       t -> f1 at rate a~

where a~ = (a+c+q-1) a / (a+c) and c~ = (a+c+q-1) c / (a+c). For a left
boundary (a, c) play the role of the injection/extraction pair usually
written (alpha, gamma); for a right boundary, of (beta, delta).

Two constructions are provided and cross-checked in tests: a block template
(`build_boundary`, authoritative) written the way the matrices are usually
displayed, and a literal transition-rule interpreter (`boundary_from_rules`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import (
    DegenerateRates,
    InvalidSpec,
    InvalidSpecies,
    NonMarkovian,
    SingularConjugation,
)
from .linalg import QMat, format_rat, invert, parse_rat, reversal_matrix


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Variant(enum.Enum):
    INERT = "inert"       # intermediate species frozen
    DECAYING = "decaying"  # intermediate species decay onto s2 and f2


class SpeciesClass(enum.Enum):
    VERY_SLOW = "very-slow"
    SLOW = "slow"
    INTERMEDIATE = "intermediate"
    FAST = "fast"
    VERY_FAST = "very-fast"


def tilde_rates(a: Fraction, c: Fraction, q: Fraction):
    """The dressed rate pair ((a+c+q-1)a/(a+c), (a+c+q-1)c/(a+c))."""
    a, c, q = Fraction(a), Fraction(c), Fraction(q)
    if a + c == 0:
        raise DegenerateRates("tilde rates need a + c > 0")
    factor = (a + c + q - 1) / (a + c)
    return factor * a, factor * c


@dataclass(frozen=True)
class BoundarySpec:
    """One member of the integrable boundary family.

    ``rate_a``/``rate_c`` are (alpha, gamma) for a left boundary and
    (beta, delta) for a right one. When f2 = s2 + 1 there are no intermediate
    species and the variant is normalized to INERT.
    """

    side: Side
    rate_a: Fraction
    rate_c: Fraction
    s1: int
    s2: int
    f2: int
    f1: int
    variant: Variant = Variant.INERT
    n_species_total: int = 2

    def __post_init__(self):
        object.__setattr__(self, "rate_a", Fraction(self.rate_a))
        object.__setattr__(self, "rate_c", Fraction(self.rate_c))
        n = self.n_species_total
        if not (1 <= self.s1 <= self.s2 < self.f2 <= self.f1 <= n):
            raise InvalidSpec(
                f"need 1 <= s1 <= s2 < f2 <= f1 <= N, got "
                f"({self.s1},{self.s2},{self.f2},{self.f1}) with N={n}"
            )
        if self.f1 - self.f2 != self.s2 - self.s1:
            raise InvalidSpec(
                f"need f1 - f2 = s2 - s1, got {self.f1 - self.f2} != {self.s2 - self.s1}"
            )
        if self.rate_a < 0 or self.rate_c < 0 or self.rate_a + self.rate_c == 0:
            raise InvalidSpec(f"rates must be nonnegative with a + c > 0, got ({self.rate_a},{self.rate_c})")
        if self.f2 == self.s2 + 1:
            object.__setattr__(self, "variant", Variant.INERT)

    @property
    def labels(self):
        return (self.s1, self.s2, self.f2, self.f1)

    def admissible_for(self, q: Fraction) -> bool:
        """True when the dressed rates are nonnegative for this q."""
        return self.rate_a + self.rate_c + Fraction(q) - 1 >= 0

    def degenerate_for(self, q: Fraction) -> bool:
        """Boundary case a + c + q - 1 = 0: dressed rates collapse to zero."""
        return self.rate_a + self.rate_c + Fraction(q) - 1 == 0

    def with_rates(self, a, c) -> "BoundarySpec":
        return replace(self, rate_a=Fraction(a), rate_c=Fraction(c))

    def to_record(self) -> dict:
        return {
            "side": self.side.value,
            "a": format_rat(self.rate_a),
            "c": format_rat(self.rate_c),
            "s1": self.s1,
            "s2": self.s2,
            "f2": self.f2,
            "f1": self.f1,
            "variant": self.variant.value,
            "N": self.n_species_total,
        }

    @staticmethod
    def from_record(rec: dict) -> "BoundarySpec":
        return BoundarySpec(
            side=Side(rec["side"]),
            rate_a=parse_rat(str(rec["a"])),
            rate_c=parse_rat(str(rec["c"])),
            s1=int(rec["s1"]),
            s2=int(rec["s2"]),
            f2=int(rec["f2"]),
            f1=int(rec["f1"]),
            variant=Variant(rec.get("variant", "inert")),
            n_species_total=int(rec["N"]),
        )


def classify(spec: BoundarySpec, species: int) -> SpeciesClass:
    """Class of a species label 1..N under the spec's partition."""
    if not 1 <= species <= spec.n_species_total:
        raise InvalidSpecies(f"species {species} outside 1..{spec.n_species_total}")
    if species < spec.s1:
        return SpeciesClass.VERY_SLOW
    if species <= spec.s2:
        return SpeciesClass.SLOW
    if species < spec.f2:
        return SpeciesClass.INTERMEDIATE
    if species <= spec.f1:
        return SpeciesClass.FAST
    return SpeciesClass.VERY_FAST


def partner(spec: BoundarySpec, species: int) -> int:
    """Transmutation partner s1 + f1 - t of a slow or fast species."""
    cls = classify(spec, species)
    if cls not in (SpeciesClass.SLOW, SpeciesClass.FAST):
        raise InvalidSpecies(f"species {species} is {cls.value}, has no partner")
    return spec.s1 + spec.f1 - species


def transition_rates(spec: BoundarySpec, q: Fraction) -> dict:
    """Rule interpreter: map (source, target) -> rate from the class rules.

    Right boundaries are the species-reversed image of the reflected left
    template, so their rule table is the left table of the reflected spec
    with every species label sent to N + 1 - label.
    """
    if spec.side is Side.RIGHT:
        n = spec.n_species_total
        return {
            (n + 1 - src, n + 1 - dst): rate
            for (src, dst), rate in transition_rates(reflected_spec(spec), q).items()
        }
    _require_admissible(spec, q)
    a, c = spec.rate_a, spec.rate_c
    at, ct = tilde_rates(a, c, q)
    rates: dict = {}

    def put(src, dst, r):
        if r != 0:
            rates[(src, dst)] = rates.get((src, dst), Fraction(0)) + r

    for t in range(1, spec.n_species_total + 1):
        cls = classify(spec, t)
        if cls is SpeciesClass.VERY_SLOW:
            put(t, spec.s1, c)
            put(t, spec.f1, a)
        elif cls is SpeciesClass.SLOW:
            put(t, partner(spec, t), a)
        elif cls is SpeciesClass.INTERMEDIATE:
            if spec.variant is Variant.DECAYING:
                put(t, spec.s2, ct)
                put(t, spec.f2, a)
        elif cls is SpeciesClass.FAST:
            put(t, partner(spec, t), ct)
        else:  # very fast
            put(t, spec.s1, ct)
            put(t, spec.f1, at)
    return rates


def boundary_from_rules(spec: BoundarySpec, q: Fraction) -> QMat:
    """Markov matrix assembled from `transition_rates` (cross-check path)."""
    n = spec.n_species_total
    b = QMat.zeros(n, n)
    for (src, dst), r in transition_rates(spec, q).items():
        b.data[(dst - 1) * n + src - 1] += r
        b.data[(src - 1) * n + src - 1] -= r
    return b


def _require_admissible(spec: BoundarySpec, q: Fraction):
    if not spec.admissible_for(q):
        raise NonMarkovian(
            f"a + c + q - 1 = {format_rat(spec.rate_a + spec.rate_c + Fraction(q) - 1)} < 0; "
            "dressed rates would be negative"
        )


def build_boundary(spec: BoundarySpec, q: Fraction) -> QMat:
    """Boundary generator as a block template (authoritative construction).

    Left specs are built directly; right specs delegate to
    `build_right_boundary`, which conjugates the reflected left template by
    the species-reversal matrix.
    """
    if spec.side is Side.RIGHT:
        return build_right_boundary(spec, q)
    _require_admissible(spec, q)
    at, ct = tilde_rates(spec.rate_a, spec.rate_c, q)
    return _left_template(
        spec.n_species_total, spec.labels, spec.variant, spec.rate_a, spec.rate_c, at, ct
    )


def _left_template(n, labels, variant, a, c, at, ct) -> QMat:
    """Blockwise template with the plain and dressed rates passed explicitly."""
    s1, s2, f2, f1 = labels
    sigma = a + c
    sigma_prime = a + ct
    sigma_tilde = at + ct
    b = QMat.zeros(n, n)

    def put(i, j, v):  # 1-based row/column
        b.data[(i - 1) * n + j - 1] += v

    # diagonal blocks of the five classes
    for t in range(1, s1):
        put(t, t, -sigma)
    for t in range(s1, s2 + 1):
        put(t, t, -a)
    if variant is Variant.DECAYING:
        for t in range(s2 + 1, f2):
            put(t, t, -sigma_prime)
    for t in range(f2, f1 + 1):
        put(t, t, -ct)
    for t in range(f1 + 1, n + 1):
        put(t, t, -sigma_tilde)
    # row s1: creation of the slowest special species
    for t in range(1, s1):
        put(s1, t, c)
    for t in range(f1 + 1, n + 1):
        put(s1, t, ct)
    # row f1: creation of the fastest special species
    for t in range(1, s1):
        put(f1, t, a)
    for t in range(f1 + 1, n + 1):
        put(f1, t, at)
    # anti-diagonal transmutation blocks between the slow and fast ranges
    for t in range(s1, s2 + 1):
        put(s1 + f1 - t, t, a)       # slow column t feeds its fast partner
    for t in range(f2, f1 + 1):
        put(s1 + f1 - t, t, ct)      # fast column t feeds its slow partner
    # decaying variant: intermediate columns feed s2 and f2
    if variant is Variant.DECAYING:
        for t in range(s2 + 1, f2):
            put(s2, t, ct)
            put(f2, t, a)
    return b


def reflected_labels(n: int, labels):
    """Label map induced by species reversal: (s1,s2,f2,f1) -> (N+1-f1, ...)."""
    s1, s2, f2, f1 = labels
    return (n + 1 - f1, n + 1 - f2, n + 1 - s2, n + 1 - s1)


def reflected_spec(spec: BoundarySpec) -> BoundarySpec:
    """Left-template spec whose U-conjugate realizes this right boundary."""
    r1, r2, r3, r4 = reflected_labels(spec.n_species_total, spec.labels)
    return replace(spec, side=Side.LEFT, s1=r1, s2=r2, f2=r3, f1=r4)


def build_right_boundary(spec: BoundarySpec, q: Fraction) -> QMat:
    """Right boundary U B(a, c | reflected labels) U^-1 (U = reversal)."""
    if spec.side is not Side.RIGHT:
        raise InvalidSpec("build_right_boundary needs a right-side spec")
    u = reversal_matrix(spec.n_species_total)
    return u @ build_boundary(reflected_spec(spec), q) @ u


def decompose_boundary(spec: BoundarySpec, q: Fraction):
    """Split B into (b0, b0_plus, b0_minus), each separately Markovian.

    b0_plus holds the rate-c feeding of s1 from the very slow block,
    b0_minus the dressed-rate-a feeding of f1 from the very fast block;
    b0 is the remainder.
    """
    if spec.side is Side.RIGHT:
        raise InvalidSpec("decomposition is defined on the left template")
    _require_admissible(spec, q)
    n = spec.n_species_total
    a, c = spec.rate_a, spec.rate_c
    at, _ = tilde_rates(a, c, q)
    b = build_boundary(spec, q)
    bp = QMat.zeros(n, n)
    bm = QMat.zeros(n, n)
    for t in range(1, spec.s1):
        bp.data[(t - 1) * n + t - 1] = -c
        bp.data[(spec.s1 - 1) * n + t - 1] = c
    for t in range(spec.f1 + 1, n + 1):
        bm.data[(t - 1) * n + t - 1] = -at
        bm.data[(spec.f1 - 1) * n + t - 1] = at
    return b - bp - bm, bp, bm


def enumerate_specs(n: int, side: Side = Side.LEFT):
    """All boundary specs for N species, unit rates, deterministic order.

    Decaying duplicates are emitted right after their inert partner whenever
    intermediate species exist (f2 > s2 + 1); the total count is C(N+1, 3).
    """
    if n < 2:
        raise InvalidSpec(f"need N >= 2, got {n}")
    specs = []
    for s1 in range(1, n + 1):
        for s2 in range(s1, n + 1):
            for f2 in range(s2 + 1, n + 1):
                f1 = f2 + (s2 - s1)
                if f1 > n:
                    continue
                base = BoundarySpec(
                    side=side,
                    rate_a=Fraction(1),
                    rate_c=Fraction(1),
                    s1=s1,
                    s2=s2,
                    f2=f2,
                    f1=f1,
                    variant=Variant.INERT,
                    n_species_total=n,
                )
                specs.append(base)
                if f2 > s2 + 1:
                    specs.append(replace(base, variant=Variant.DECAYING))
    return specs


def deform_boundary(b: QMat, weights) -> QMat:
    """Diagonal conjugation V b V^-1, V = diag(weights); preserves integrability.

    The result is generally not Markovian; it is the standard deformation used
    to weight boundary particle currents.
    """
    weights = [Fraction(w) for w in weights]
    if len(weights) != b.rows:
        raise SingularConjugation(f"need {b.rows} weights, got {len(weights)}")
    if any(w == 0 for w in weights):
        raise SingularConjugation("zero weight is not invertible")
    v = QMat.zeros(b.rows, b.rows)
    for i, w in enumerate(weights):
        v.data[i * b.rows + i] = w
    return v @ b @ invert(v)


def right_left_template_discrepancy(spec: BoundarySpec, q: Fraction):
    """Diagnostic for the plain/dressed rate-swap description of right boundaries.

    Compares the actual right boundary (reversal conjugation of the reflected
    left template) against the same-label left template with the plain and
    dressed rate pairs interchanged. Returns (matches, actual, swapped). The
    two generally differ entrywise, which is why the conjugation is the
    definition here and the rate swap only a recorded diagnostic.
    """
    if spec.side is not Side.RIGHT:
        raise InvalidSpec("diagnostic applies to right-side specs")
    _require_admissible(spec, q)
    actual = build_right_boundary(spec, q)
    at, ct = tilde_rates(spec.rate_a, spec.rate_c, q)
    swapped = _left_template(
        spec.n_species_total, spec.labels, spec.variant, at, ct, spec.rate_a, spec.rate_c
    )
    return actual == swapped, actual, swapped
