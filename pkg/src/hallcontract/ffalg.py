"""Exact linear algebra over small finite fields.

Elements of F_q (q = p^e) are plain ints 0..q-1, read as base-p digit
vectors of polynomial coefficients. A Field builds its arithmetic tables
once, so everything downstream is int indexing; matrices are immutable
tuples of row tuples and therefore hashable. Nothing here floats.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

#: Default ceiling for brute-force enumerations (points, group elements).
DEFAULT_MAX_POINTS = 1 << 20


class EnumerationBoundError(Exception):
    """An enumeration would exceed the configured size bound."""


class UnsupportedFieldError(ValueError):
    """No modulus is on file for the requested field size."""


# Irreducible monic moduli over F_p, coefficients ascending, leading 1 last.
# Hard-coded so that serialized field elements stay stable across builds.
_MODULI = {
    (2, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 1): (0, 1),
    (5, 2): (2, 0, 1),
    (7, 1): (0, 1),
    (7, 2): (1, 0, 1),
    (11, 1): (0, 1),
    (13, 1): (0, 1),
}


def _prime_power(q):
    if q < 2:
        raise ValueError(f"field size must be at least 2, got {q}")
    for p in range(2, q + 1):
        if q % p == 0:
            e, m = 0, q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise ValueError(f"{q} is not a prime power")


class Field:
    """The finite field with q = p^e elements, interned per q."""

    _instances: dict[int, "Field"] = {}

    def __new__(cls, q: int) -> "Field":
        inst = cls._instances.get(q)
        if inst is None:
            inst = super().__new__(cls)
            inst._build(q)
            cls._instances[q] = inst
        return inst

    def _build(self, q: int) -> None:
        p, e = _prime_power(q)
        if (p, e) not in _MODULI:
            raise UnsupportedFieldError(f"no modulus on file for q={q} (p={p}, e={e})")
        self.q = q
        self.p = p
        self.e = e
        self.modulus = _MODULI[(p, e)]
        self._add = [[self._encode(self._poly_add(self._decode(a), self._decode(b)))
                      for b in range(q)] for a in range(q)]
        self._mul = [[self._encode(self._poly_mul(self._decode(a), self._decode(b)))
                      for b in range(q)] for a in range(q)]
        self._neg = [self._encode(tuple((-d) % p for d in self._decode(a))) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            row = self._mul[a]
            for b in range(1, q):
                if row[b] == 1:
                    inv[a] = b
                    break
            else:
                # only possible if the modulus were reducible
                raise UnsupportedFieldError(f"zero divisor in F_{q}: modulus not irreducible")
        self._inv = inv

    def _decode(self, a: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.e):
            digits.append(a % self.p)
            a //= self.p
        return tuple(digits)

    def _encode(self, digits) -> int:
        a = 0
        for d in reversed(digits):
            a = a * self.p + d
        return a

    def _poly_add(self, u, v):
        return tuple((x + y) % self.p for x, y in zip(u, v))

    def _poly_mul(self, u, v):
        p, e = self.p, self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the monic modulus of degree e
        for i in range(len(prod) - 1, e - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(e):
                    prod[i - e + j] = (prod[i - e + j] - c * self.modulus[j]) % p
        return tuple(prod[:e])

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def primitive(self) -> int:
        """Smallest generator of the multiplicative group."""
        target = self.q - 1
        for g in self.units():
            x, order = g, 1
            while x != 1:
                x = self._mul[x][g]
                order += 1
            if order == target:
                return g
        raise UnsupportedFieldError(f"multiplicative group of F_{self.q} not cyclic")

    def __repr__(self) -> str:
        return f"Field({self.q})"


class Mat:
    """Immutable matrix over a Field: tuple-of-row-tuples, hashable, orderable."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, data, cols: int | None = None):
        data = tuple(tuple(row) for row in data)
        rows = len(data)
        if rows:
            ncols = len(data[0])
            if any(len(r) != ncols for r in data):
                raise ValueError("ragged rows")
            if cols is not None and cols != ncols:
                raise ValueError("cols does not match data")
        else:
            if cols is None:
                raise ValueError("empty matrix needs explicit cols")
            ncols = cols
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Mat":
        return cls(field, tuple((0,) * cols for _ in range(rows)), cols=cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        return cls(field, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), cols=n)

    @classmethod
    def from_flat(cls, field: Field, rows: int, cols: int, flat) -> "Mat":
        flat = tuple(flat)
        if len(flat) != rows * cols:
            raise ValueError("flat length does not match shape")
        return cls(field, tuple(flat[i * cols:(i + 1) * cols] for i in range(rows)), cols=cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def flat(self) -> tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(self.data))

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.field is other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        return hash((self.field.q, self.rows, self.cols, self.data))

    def __lt__(self, other):
        return (self.rows, self.cols, self.data) < (other.rows, other.cols, other.data)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.field is not other.field:
            raise ValueError("field mismatch")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        mul = self.field._mul
        add = self.field._add
        ocols = range(other.cols)
        out = []
        for arow in self.data:
            row = [0] * other.cols
            for k, a in enumerate(arow):
                if a:
                    mrow = mul[a]
                    brow = other.data[k]
                    for j in ocols:
                        b = brow[j]
                        if b:
                            row[j] = add[row[j]][mrow[b]]
            out.append(tuple(row))
        return Mat(self.field, tuple(out), cols=other.cols)

    def vec(self, v: tuple[int, ...]) -> tuple[int, ...]:
        """Apply to a column vector given as a tuple."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        mul = self.field._mul
        add = self.field._add
        out = [0] * self.rows
        for i, arow in enumerate(self.data):
            acc = 0
            for a, x in zip(arow, v):
                if a and x:
                    acc = add[acc][mul[a][x]]
            out[i] = acc
        return tuple(out)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def transpose(self) -> "Mat":
        if self.rows == 0 or self.cols == 0:
            return Mat(self.field, ((),) * self.cols if self.cols else (), cols=self.rows)
        return Mat(self.field, tuple(zip(*self.data)), cols=self.rows)

    def rank(self) -> int:
        f = self.field
        work = [list(r) for r in self.data]
        rank = 0
        for col in range(self.cols):
            pivot = None
            for r in range(rank, self.rows):
                if work[r][col]:
                    pivot = r
                    break
            if pivot is None:
                continue
            work[rank], work[pivot] = work[pivot], work[rank]
            pinv = f.inv(work[rank][col])
            work[rank] = [f.mul(pinv, x) for x in work[rank]]
            for r in range(self.rows):
                if r != rank and work[r][col]:
                    c = work[r][col]
                    work[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(work[r], work[rank])]
            rank += 1
        return rank

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "Mat":
        if self.rows != self.cols:
            raise ValueError("only square matrices invert")
        n = self.rows
        f = self.field
        work = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(self.data)]
        for col in range(n):
            pivot = None
            for r in range(col, n):
                if work[r][col]:
                    pivot = r
                    break
            if pivot is None:
                raise ZeroDivisionError("singular matrix")
            work[col], work[pivot] = work[pivot], work[col]
            pinv = f.inv(work[col][col])
            work[col] = [f.mul(pinv, x) for x in work[col]]
            for r in range(n):
                if r != col and work[r][col]:
                    c = work[r][col]
                    work[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(work[r], work[col])]
        return Mat(f, tuple(tuple(row[n:]) for row in work), cols=n)

    def __repr__(self):
        return f"Mat({self.field.q}, {self.data!r}, cols={self.cols})"


def block2x2(field: Field, tl: Mat, tr: Mat, bl: Mat, br: Mat) -> Mat:
    """Assemble [[tl, tr], [bl, br]]; shapes must agree along shared edges."""
    if tl.rows != tr.rows or bl.rows != br.rows:
        raise ValueError("row mismatch in blocks")
    if tl.cols != bl.cols or tr.cols != br.cols:
        raise ValueError("column mismatch in blocks")
    top = tuple(a + b for a, b in zip(tl.data, tr.data)) if tl.rows else ()
    bot = tuple(a + b for a, b in zip(bl.data, br.data)) if bl.rows else ()
    return Mat(field, top + bot, cols=tl.cols + tr.cols)


def split2x2(m: Mat, row_split: int, col_split: int) -> tuple[Mat, Mat, Mat, Mat]:
    """Split into (tl, tr, bl, br) at the given row/column boundary."""
    f = m.field
    tl = Mat(f, tuple(r[:col_split] for r in m.data[:row_split]), cols=col_split)
    tr = Mat(f, tuple(r[col_split:] for r in m.data[:row_split]), cols=m.cols - col_split)
    bl = Mat(f, tuple(r[:col_split] for r in m.data[row_split:]), cols=col_split)
    br = Mat(f, tuple(r[col_split:] for r in m.data[row_split:]), cols=m.cols - col_split)
    return tl, tr, bl, br


class Subspace:
    """A k-dimensional subspace of F_q^n, held as its reduced column-echelon basis.

    The basis matrix is n x k with pivot rows forming an identity block, so
    coordinates of a member vector are read off the pivot rows directly. Two
    equal subspaces always produce the identical basis.
    """

    __slots__ = ("field", "ambient", "dim", "basis", "pivots", "free_rows")

    def __init__(self, field: Field, ambient: int, basis: Mat, pivots: tuple[int, ...]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "dim", len(pivots))
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "pivots", pivots)
        object.__setattr__(self, "free_rows",
                           tuple(r for r in range(ambient) if r not in set(pivots)))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field is other.field
                and self.ambient == other.ambient and self.basis == other.basis)

    def __hash__(self):
        return hash((self.field.q, self.ambient, self.basis))

    def __repr__(self):
        return f"Subspace(q={self.field.q}, n={self.ambient}, pivots={self.pivots})"

    @classmethod
    def spanned_by(cls, field: Field, ambient: int, vectors) -> "Subspace":
        """Canonicalize an arbitrary spanning set by column reduction."""
        cols = [list(v) for v in vectors]
        pivots: list[int] = []
        basis_cols: list[list[int]] = []
        for vec in cols:
            vec = list(vec)
            # reduce against the basis built so far
            for p, b in zip(pivots, basis_cols):
                c = vec[p]
                if c:
                    vec = [field.sub(x, field.mul(c, y)) for x, y in zip(vec, b)]
            pivot = next((r for r, x in enumerate(vec) if x), None)
            if pivot is None:
                continue
            pinv = field.inv(vec[pivot])
            vec = [field.mul(pinv, x) for x in vec]
            # back-substitute into earlier basis columns
            for idx, b in enumerate(basis_cols):
                c = b[pivot]
                if c:
                    basis_cols[idx] = [field.sub(x, field.mul(c, y)) for x, y in zip(b, vec)]
            pivots.append(pivot)
            basis_cols.append(vec)
        order = sorted(range(len(pivots)), key=lambda i: pivots[i])
        pivots = [pivots[i] for i in order]
        basis_cols = [basis_cols[i] for i in order]
        data = tuple(tuple(basis_cols[j][r] for j in range(len(pivots))) for r in range(ambient))
        return cls(field, ambient, Mat(field, data, cols=len(pivots)), tuple(pivots))

    def coords(self, v: tuple[int, ...]):
        """Coordinates of v in the echelon basis, or None if v is not a member."""
        c = tuple(v[p] for p in self.pivots)
        w = self.basis.vec(c)
        if any(self.field.sub(x, y) for x, y in zip(v, w)):
            return None
        return c

    def reduce(self, v: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Split v into (pivot coordinates, residue on the free rows).

        The residue is the image of v in the quotient by this subspace, read in
        the free-row coordinate system.
        """
        c = tuple(v[p] for p in self.pivots)
        w = self.basis.vec(c)
        diff = tuple(self.field.sub(x, y) for x, y in zip(v, w))
        return c, tuple(diff[r] for r in self.free_rows)

    def contains(self, v: tuple[int, ...]) -> bool:
        return self.coords(v) is not None


@lru_cache(maxsize=None)
def _subspaces(q: int, n: int, k: int) -> tuple[Subspace, ...]:
    field = Field(q)
    if k < 0 or k > n:
        return ()
    out = []
    for pivots in itertools.combinations(range(n), k):
        pivot_set = set(pivots)
        free_positions = [(r, j) for j, p in enumerate(pivots)
                          for r in range(p + 1, n) if r not in pivot_set]
        for values in itertools.product(range(q), repeat=len(free_positions)):
            entries = {}
            for (r, j), v in zip(free_positions, values):
                entries[(r, j)] = v
            data = tuple(
                tuple(1 if r == pivots[j] else entries.get((r, j), 0) for j in range(k))
                for r in range(n))
            out.append(Subspace(field, n, Mat(field, data, cols=k) if n else Mat(field, (), cols=k),
                                pivots))
    return tuple(out)


def enumerate_subspaces(field: Field, n: int, k: int,
                        max_count: int = DEFAULT_MAX_POINTS) -> tuple[Subspace, ...]:
    """All k-dimensional subspaces of F_q^n, canonical bases, fixed order."""
    total = gaussian_binomial(n, k, field.q)
    if total > max_count:
        raise EnumerationBoundError(
            f"{total} subspaces of dim {k} in F_{field.q}^{n} exceed the bound {max_count}")
    return _subspaces(field.q, n, k)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def gl_order(n: int, q: int) -> int:
    """Order of GL_n(F_q)."""
    out = 1
    for k in range(n):
        out *= q ** n - q ** k
    return out


@lru_cache(maxsize=None)
def _gl_elements(q: int, n: int) -> tuple[Mat, ...]:
    field = Field(q)
    if n == 0:
        return (Mat(field, (), cols=0),)
    out = []
    for flat in itertools.product(range(q), repeat=n * n):
        m = Mat.from_flat(field, n, n, flat)
        if m.is_invertible():
            out.append(m)
    return tuple(out)


def enumerate_gl(field: Field, n: int, max_count: int = DEFAULT_MAX_POINTS) -> tuple[Mat, ...]:
    """All invertible n x n matrices, by brute-force filtering."""
    if field.q ** (n * n) > max_count:
        raise EnumerationBoundError(
            f"GL_{n}(F_{field.q}) search space {field.q ** (n * n)} exceeds the bound {max_count}")
    return _gl_elements(field.q, n)


def gl_generators(field: Field, n: int) -> list[Mat]:
    """A small generating set of GL_n(F_q): permutations, a transvection,
    and a primitive diagonal entry."""
    if n == 0:
        return []
    gens: list[Mat] = []
    if field.q > 2:
        alpha = field.primitive()
        diag = [[int(i == j) for j in range(n)] for i in range(n)]
        diag[0][0] = alpha
        gens.append(Mat(field, tuple(tuple(r) for r in diag), cols=n))
    if n >= 2:
        cycle = tuple(tuple(int(j == (i + 1) % n) for j in range(n)) for i in range(n))
        gens.append(Mat(field, cycle, cols=n))
        if n >= 3:
            swap = [[int(i == j) for j in range(n)] for i in range(n)]
            swap[0][0] = swap[1][1] = 0
            swap[0][1] = swap[1][0] = 1
            gens.append(Mat(field, tuple(tuple(r) for r in swap), cols=n))
        trans = [[int(i == j) for j in range(n)] for i in range(n)]
        trans[0][1] = 1
        gens.append(Mat(field, tuple(tuple(r) for r in trans), cols=n))
    return gens
