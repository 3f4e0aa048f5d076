"""Exact rational scalars, dense rational matrices and tensor-leg plumbing.

Scalars are `fractions.Fraction` (aliased ``Rat``): always reduced, positive
denominator, so equality tests are exact. Matrices are dense row-major lists
of Fractions; every operation returns a new matrix, nothing mutates in place.

Index conventions, used consistently by every module:

* matrix entries are addressed 0-based: ``m[i, j]``;
* tensor *factors* (lattice sites, auxiliary spaces) are addressed 1-based,
  and the flat index of a configuration (t_1, ..., t_L) with t_i in 1..N is
  sum_i (t_i - 1) * N**(L - i), i.e. factor 1 is the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import InvalidDimension, SingularMatrix

Rat = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def parse_rat(text: str) -> Fraction:
    """Parse "p/q" or "p" into an exact rational (no decimals accepted)."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"decimal notation is not exact; write a fraction: {text!r}")
    return Fraction(text)


def format_rat(value: Fraction) -> str:
    """Render a rational as "p/q", or "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class QMat:
    """Immutable-by-convention dense matrix of Fractions (row-major)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data):
        if rows <= 0 or cols <= 0:
            raise InvalidDimension(f"bad shape {rows}x{cols}")
        data = [x if isinstance(x, Fraction) else Fraction(x) for x in data]
        if len(data) != rows * cols:
            raise InvalidDimension(f"{rows}x{cols} needs {rows * cols} entries, got {len(data)}")
        self.rows = rows
        self.cols = cols
        self.data = data

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int) -> "QMat":
        return QMat(rows, cols, [_ZERO] * (rows * cols))

    @staticmethod
    def identity(n: int) -> "QMat":
        m = QMat.zeros(n, n)
        for i in range(n):
            m.data[i * n + i] = _ONE
        return m

    @staticmethod
    def from_rows(rows) -> "QMat":
        rows = [list(r) for r in rows]
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise InvalidDimension("ragged rows")
        return QMat(len(rows), ncols, [x for r in rows for x in r])

    @staticmethod
    def column(entries) -> "QMat":
        entries = list(entries)
        return QMat(len(entries), 1, entries)

    # ---- access --------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i * self.cols + j]

    def row(self, i: int):
        return self.data[i * self.cols : (i + 1) * self.cols]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def __eq__(self, other):
        return (
            isinstance(other, QMat)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.data)))

    def __repr__(self):
        body = "; ".join(" ".join(format_rat(x) for x in self.row(i)) for i in range(self.rows))
        return f"QMat({self.rows}x{self.cols}: {body})"

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.data)

    # ---- arithmetic ----------------------------------------------------

    def __add__(self, other: "QMat") -> "QMat":
        self._same_shape(other)
        return QMat(self.rows, self.cols, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "QMat") -> "QMat":
        self._same_shape(other)
        return QMat(self.rows, self.cols, [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self) -> "QMat":
        return QMat(self.rows, self.cols, [-a for a in self.data])

    def scale(self, s) -> "QMat":
        s = s if isinstance(s, Fraction) else Fraction(s)
        return QMat(self.rows, self.cols, [s * a for a in self.data])

    __rmul__ = scale
    __mul__ = scale

    def __matmul__(self, other: "QMat") -> "QMat":
        if self.cols != other.rows:
            raise InvalidDimension(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.data, other.data
        out = [_ZERO] * (n * m)
        for i in range(n):
            arow = i * k
            orow = i * m
            for t in range(k):
                x = a[arow + t]
                if x:
                    brow = t * m
                    for j in range(m):
                        y = b[brow + j]
                        if y:
                            out[orow + j] += x * y
        return QMat(n, m, out)

    def transpose(self) -> "QMat":
        out = [_ZERO] * (self.rows * self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out[j * self.rows + i] = self.data[i * self.cols + j]
        return QMat(self.cols, self.rows, out)

    def trace(self) -> Fraction:
        if not self.is_square():
            raise InvalidDimension("trace of a non-square matrix")
        return sum((self.data[i * self.cols + i] for i in range(self.rows)), _ZERO)

    def column_sums(self):
        sums = [_ZERO] * self.cols
        for i in range(self.rows):
            for j in range(self.cols):
                sums[j] += self.data[i * self.cols + j]
        return sums

    def _same_shape(self, other: "QMat"):
        if self.rows != other.rows or self.cols != other.cols:
            raise InvalidDimension(
                f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def commutator(self, other: "QMat") -> "QMat":
        return self @ other - other @ self

    def to_strings(self):
        """Row-major list of "p/q" strings (the report serialization)."""
        return [format_rat(x) for x in self.data]


@dataclass(frozen=True)
class TensorSpace:
    """L tensor factors of local dimension N with the big-endian flat codec."""

    local_dim: int
    factors: int

    def __post_init__(self):
        if self.local_dim < 2 or self.factors < 1:
            raise InvalidDimension(f"bad tensor space {self.local_dim}^{self.factors}")

    @property
    def dim(self) -> int:
        return self.local_dim ** self.factors

    def flat_index(self, config) -> int:
        """Flat index of a configuration (species labels 1..N, site 1 first)."""
        if len(config) != self.factors:
            raise InvalidDimension(f"configuration length {len(config)} != {self.factors}")
        idx = 0
        for t in config:
            if not 1 <= t <= self.local_dim:
                raise InvalidDimension(f"species {t} outside 1..{self.local_dim}")
            idx = idx * self.local_dim + (t - 1)
        return idx

    def config(self, flat: int):
        """Inverse of flat_index: tuple of species labels 1..N."""
        if not 0 <= flat < self.dim:
            raise InvalidDimension(f"flat index {flat} outside configuration space")
        out = []
        for _ in range(self.factors):
            flat, r = divmod(flat, self.local_dim)
            out.append(r + 1)
        return tuple(reversed(out))

    def configurations(self):
        return (self.config(i) for i in range(self.dim))


# ---- tensor operations ---------------------------------------------------


def kron(a: QMat, b: QMat) -> QMat:
    """Kronecker product; block (i1, j1) of the result is a[i1,j1] * b."""
    out = [_ZERO] * (a.rows * b.rows * a.cols * b.cols)
    rcols = a.cols * b.cols
    for i1 in range(a.rows):
        for j1 in range(a.cols):
            x = a.data[i1 * a.cols + j1]
            if x:
                for i2 in range(b.rows):
                    base = (i1 * b.rows + i2) * rcols + j1 * b.cols
                    for j2 in range(b.cols):
                        y = b.data[i2 * b.cols + j2]
                        if y:
                            out[base + j2] = x * y
    return QMat(a.rows * b.rows, a.cols * b.cols, out)


def embed(op: QMat, first_site: int, space: TensorSpace) -> QMat:
    """Id x ... x op x ... x Id with op covering factors first_site..first_site+k-1."""
    n = space.local_dim
    if not op.is_square():
        raise InvalidDimension("embedded operator must be square")
    k = 0
    d = 1
    while d < op.rows:
        d *= n
        k += 1
    if d != op.rows or k < 1:
        raise InvalidDimension(f"operator dimension {op.rows} is not a power of {n}")
    if first_site < 1 or first_site + k - 1 > space.factors:
        raise InvalidDimension(f"sites {first_site}..{first_site + k - 1} outside 1..{space.factors}")
    left = n ** (first_site - 1)
    right = n ** (space.factors - first_site - k + 1)
    out = op
    if left > 1:
        out = kron(QMat.identity(left), out)
    if right > 1:
        out = kron(out, QMat.identity(right))
    return out


def embed_pair(op: QMat, site_a: int, site_b: int, space: TensorSpace) -> QMat:
    """Embed a two-factor operator with legs on (possibly non-adjacent) sites.

    The first tensor leg of ``op`` lands on ``site_a``, the second on
    ``site_b``; all other factors carry the identity.
    """
    n = space.local_dim
    L = space.factors
    if op.rows != n * n or op.cols != n * n:
        raise InvalidDimension(f"two-site operator must be {n * n}x{n * n}")
    if site_a == site_b or not (1 <= site_a <= L and 1 <= site_b <= L):
        raise InvalidDimension(f"bad site pair ({site_a}, {site_b}) for L={L}")
    if site_b == site_a + 1:
        return embed(op, site_a, space)
    dim = space.dim
    out = [_ZERO] * (dim * dim)
    others = [s for s in range(1, L + 1) if s not in (site_a, site_b)]
    pw = [n ** (L - s) for s in range(1, L + 1)]  # place value of each site
    rest_dim = n ** len(others)
    for ia in range(n):
        for ib in range(n):
            for ja in range(n):
                for jb in range(n):
                    v = op.data[(ia * n + ib) * n * n + ja * n + jb]
                    if not v:
                        continue
                    ibase = ia * pw[site_a - 1] + ib * pw[site_b - 1]
                    jbase = ja * pw[site_a - 1] + jb * pw[site_b - 1]
                    for rest in range(rest_dim):
                        r = rest
                        off = 0
                        for s in reversed(others):
                            r, dgt = divmod(r, n)
                            off += dgt * pw[s - 1]
                        out[(ibase + off) * dim + jbase + off] = v
    return QMat(dim, dim, out)


def _check_product_dim(m: QMat, dims):
    total = 1
    for d in dims:
        total *= d
    if not m.is_square() or m.rows != total:
        raise InvalidDimension(f"matrix dim {m.rows} != product of factors {dims}")


def _splits(dims, factor):
    if not 1 <= factor <= len(dims):
        raise InvalidDimension(f"factor {factor} outside 1..{len(dims)}")
    left = 1
    for d in dims[: factor - 1]:
        left *= d
    mid = dims[factor - 1]
    right = 1
    for d in dims[factor:]:
        right *= d
    return left, mid, right


def partial_trace(m: QMat, factor: int, dims) -> QMat:
    """Trace out one tensor factor (1-based) of a square matrix."""
    _check_product_dim(m, dims)
    left, mid, right = _splits(dims, factor)
    red = left * right
    out = [_ZERO] * (red * red)
    for il in range(left):
        for ir in range(right):
            for jl in range(left):
                for jr in range(right):
                    acc = _ZERO
                    for t in range(mid):
                        ii = (il * mid + t) * right + ir
                        jj = (jl * mid + t) * right + jr
                        acc += m.data[ii * m.cols + jj]
                    out[(il * right + ir) * red + jl * right + jr] = acc
    return QMat(red, red, out)


def partial_transpose(m: QMat, factor: int, dims) -> QMat:
    """Transpose the indices of one tensor factor (1-based) only."""
    _check_product_dim(m, dims)
    left, mid, right = _splits(dims, factor)
    out = [_ZERO] * (m.rows * m.cols)
    for il in range(left):
        for im in range(mid):
            for ir in range(right):
                ii = (il * mid + im) * right + ir
                for jl in range(left):
                    for jm in range(mid):
                        for jr in range(right):
                            jj = (jl * mid + jm) * right + jr
                            v = m.data[ii * m.cols + jj]
                            if v:
                                ti = (il * mid + jm) * right + ir
                                tj = (jl * mid + im) * right + jr
                                out[ti * m.cols + tj] = v
    return QMat(m.rows, m.cols, out)


def invert(m: QMat) -> QMat:
    """Exact inverse by Gauss-Jordan elimination (first-nonzero pivoting)."""
    if not m.is_square():
        raise InvalidDimension("inverse of a non-square matrix")
    n = m.rows
    aug = [m.row(i) + QMat.identity(n).row(i) for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularMatrix(f"singular at column {col}")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        prow = aug[col]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], prow)]
    return QMat(n, n, [x for row in aug for x in row[n:]])


def _integer_rows(m: QMat):
    """Clear denominators row by row; exact, keeps the kernel unchanged."""
    rows = []
    for i in range(m.rows):
        row = m.row(i)
        scale = lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * scale) for x in row])
    return rows


def nullspace(m: QMat):
    """Exact basis of the right kernel, as a list of column QMats.

    Fraction-free (integer cross-multiplication) forward elimination with the
    pivot chosen as the first nonzero entry in column scan order, so the
    returned basis is deterministic. Each basis vector has value 1 in its
    free coordinate.
    """
    rows = _integer_rows(m)
    ncols = m.cols
    pivots = []  # (row, col) in elimination order
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        pv = pr[col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col]
                new = [pv * a - f * b for a, b in zip(rows[r], pr)]
                g = gcd(*new) if any(new) else 1
                rows[r] = [a // g for a in new] if g > 1 else new
        pivots.append((rank, col))
        rank += 1
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for free in free_cols:
        vec = [_ZERO] * ncols
        vec[free] = _ONE
        for r, c in reversed(pivots):
            row = rows[r]
            acc = sum((Fraction(row[j]) * vec[j] for j in range(c + 1, ncols) if row[j]), _ZERO)
            vec[c] = -acc / row[c]
        basis.append(QMat.column(vec))
    return basis


def swap_operator(n: int) -> QMat:
    """Permutation matrix exchanging the two factors of C^n (x) C^n."""
    p = QMat.zeros(n * n, n * n)
    for i in range(n):
        for j in range(n):
            p.data[(j * n + i) * n * n + i * n + j] = _ONE
    return p


def reversal_matrix(n: int) -> QMat:
    """Anti-diagonal involution sending basis vector i to n+1-i."""
    u = QMat.zeros(n, n)
    for i in range(n):
        u.data[i * n + (n - 1 - i)] = _ONE
    return u
