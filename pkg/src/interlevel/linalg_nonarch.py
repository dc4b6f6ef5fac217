"""Valuation-aware linear algebra over Novikov fields.

Orthogonal bases, orthogonalization, the nonarchimedean singular value
decomposition of a Floer-type complex (with its verbose and concise
barcodes), homology with spectral values, and Smith normal form over Λ.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import (
    DOWN,
    INF,
    NEG_INF,
    UP,
    GroupRing,
    NovikovField,
    fraction_str,
    identity,
    is_infinite,
    mat_vec,
    row_reduce,
    solve,
)


# ---------------------------------------------------------------------------
# orthogonalizable spaces


class OrthoSpace:
    """κ-span of a basis u_1..u_n over Λ↑ or Λ↓ with the basis declared orthogonal.

    ρ↑(Σ λ_i u_i) = max_i(ℓ_i − ν↑(λ_i)); ρ↓ uses min and ν↓.
    """

    def __init__(self, domain: NovikovField, values: Sequence, labels: Sequence | None = None):
        self.domain = domain
        self.values = [Fraction(v) for v in values]
        self.labels = list(labels) if labels is not None else list(range(len(self.values)))

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def up(self) -> bool:
        return self.domain.up

    def zero_vector(self) -> list:
        return [self.domain.zero()] * self.dim

    def unit(self, i: int) -> list:
        v = self.zero_vector()
        v[i] = self.domain.one()
        return v

    def vector(self, coords: Sequence) -> "FiltVector":
        return FiltVector(self, [self.domain(c) for c in coords])

    def rho(self, coords: Sequence):
        dom = self.domain
        best = NEG_INF if self.up else INF
        for ell, c in zip(self.values, coords):
            if not c:
                continue
            val = ell - dom.nu(c)
            if (val > best) if self.up else (val < best):
                best = val
        return best

    def lead(self, coords: Sequence):
        """(ρ, {i: leading coefficient}) over the coordinates attaining ρ."""
        r = self.rho(coords)
        if is_infinite(r):
            return r, {}
        dom = self.domain
        out = {}
        for i, (ell, c) in enumerate(zip(self.values, coords)):
            if c and ell - dom.nu(c) == r:
                out[i] = dom.lead(c)
        return r, out

    def value_class(self, value):
        """Key under which leading terms can cancel: value mod Γ."""
        return self.domain.gamma.normalize(value)

    def conj(self) -> "OrthoSpace":
        return OrthoSpace(self.domain.opposite, [-v for v in self.values], self.labels)

    def __repr__(self):
        return f"OrthoSpace({self.domain.orientation}, {[str(v) for v in self.values]})"


class FiltVector:
    """A coordinate vector in an OrthoSpace."""

    __slots__ = ("space", "coords")

    def __init__(self, space: OrthoSpace, coords: Sequence):
        if len(coords) != space.dim:
            raise ValueError("coordinate length does not match the space")
        self.space = space
        self.coords = list(coords)

    def rho(self):
        return self.space.rho(self.coords)

    def __bool__(self):
        return any(bool(c) for c in self.coords)

    def __add__(self, o: "FiltVector"):
        return FiltVector(self.space, [a + b for a, b in zip(self.coords, o.coords)])

    def __sub__(self, o: "FiltVector"):
        return FiltVector(self.space, [a - b for a, b in zip(self.coords, o.coords)])

    def scale(self, c) -> "FiltVector":
        c = self.space.domain(c)
        return FiltVector(self.space, [c * a for a in self.coords])

    def __eq__(self, o):
        return isinstance(o, FiltVector) and self.coords == o.coords

    def __repr__(self):
        return f"FiltVector({self.coords})"


def rho(v: FiltVector):
    return v.rho()


def _lincomb(dom: NovikovField, coeffs: Sequence, vectors: Sequence[Sequence], n: int) -> list:
    out = [dom.zero()] * n
    for c, v in zip(coeffs, vectors):
        if not c:
            continue
        for i, x in enumerate(v):
            if x:
                out[i] = out[i] + c * x
    return out


def _complete_basis(space: OrthoSpace, ortho: Sequence[Sequence]) -> list[int]:
    """Unit vectors that extend an orthogonal family to an orthogonal basis.

    Leading terms only interact inside one value class, so per class we
    take the echelon pivots of the family's leading vectors and add the
    unit vectors of the remaining coordinates of that class.
    """
    dom = space.domain
    kappa = dom.field
    n = space.dim
    by_class: dict = {}
    for v in ortho:
        r, lead = space.lead(v)
        if not lead:
            raise ValueError("not independent")
        row = [kappa.zero] * n
        for i, a in lead.items():
            row[i] = a
        by_class.setdefault(space.value_class(r), []).append(row)
    taken: set[int] = set()
    for rows in by_class.values():
        _, piv = row_reduce(rows, kappa.zero, kappa.one)
        if len(piv) != len(rows):
            raise ValueError("family is not orthogonal")
        taken.update(piv)
    return [i for i in range(n) if i not in taken]


def _project(space: OrthoSpace, ortho: Sequence[Sequence], v: Sequence):
    """Coefficients a with v − Σ a_j ortho_j orthogonal to span(ortho)."""
    dom = space.domain
    n = space.dim
    if not ortho:
        return [], list(v)
    extra = set(_complete_basis(space, ortho))
    # the unit-vector columns only absorb their own rows, so the remaining
    # rows give a square system for the coefficients on ``ortho``
    rows = [i for i in range(n) if i not in extra]
    mat = [[w[i] for w in ortho] for i in rows]
    sol = solve(mat, [[v[i]] for i in rows], dom.zero(), dom.one())
    a = [sol[j][0] for j in range(len(ortho))]
    resid = _lincomb(dom, [dom.one()] + [-c for c in a], [v] + [list(w) for w in ortho], n)
    return a, resid


def _as_vectors(vectors) -> tuple[OrthoSpace | None, list[list]]:
    if not vectors:
        return None, []
    space = vectors[0].space
    for v in vectors:
        if v.space is not space:
            raise ValueError("vectors live in different spaces")
    return space, [list(v.coords) for v in vectors]


def orthogonalize(vectors: Sequence[FiltVector]):
    """Triangular orthogonalization: out_i = in_i + Σ_{j<i} c_ij in_j.

    Returns (outputs, c) with c the unitriangular coefficient matrix.
    """
    space, vecs = _as_vectors(vectors)
    if space is None:
        return [], []
    dom = space.domain
    k = len(vecs)
    outs: list[list] = []
    coeffs: list[list] = []
    for i, v in enumerate(vecs):
        a, resid = _project(space, outs, v)
        if not any(bool(x) for x in resid):
            raise ValueError("not independent")
        row = [dom.zero()] * k
        row[i] = dom.one()
        for j, aj in enumerate(a):
            if aj:
                for m in range(k):
                    if coeffs[j][m]:
                        row[m] = row[m] - aj * coeffs[j][m]
        outs.append(resid)
        coeffs.append(row)
    return [FiltVector(space, o) for o in outs], coeffs


def best_approximation_distance(v: FiltVector, others: Sequence[FiltVector]):
    """inf{ρ(v − w) : w ∈ span(others)}, attained by orthogonal projection."""
    if not others:
        return v.rho()
    ortho, _ = orthogonalize(list(others))
    _, resid = _project(v.space, [o.coords for o in ortho], v.coords)
    if not any(bool(x) for x in resid):
        raise ValueError("not independent")
    return v.space.rho(resid)


def is_orthogonal(vectors: Sequence[FiltVector]) -> bool:
    """Each v_i realizes its distance to the span of the others."""
    vectors = list(vectors)
    for i, v in enumerate(vectors):
        if not v:
            raise ValueError("not independent")
        dist = best_approximation_distance(v, vectors[:i] + vectors[i + 1:])
        if dist != v.rho():
            return False
    return True


def leads_independent(space: OrthoSpace, vecs: Sequence[Sequence]) -> bool:
    """Graded test: leading vectors independent inside every value class."""
    try:
        _complete_basis(space, vecs)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# bars


KINDS = ("half_up", "half_down", "inf_up", "inf_down", "closed", "open")


@dataclass(frozen=True, order=True)
class Bar:
    """An interval class modulo Γ in a given degree.

    half_up [a,b), half_down (a,b], inf_up [a,∞), inf_down (−∞,b],
    closed [a,b], open (a,b). The stored representative has its finite
    left endpoint (the right one for inf_down) in [0, λ₀) when Γ ≠ {0}.
    """

    degree: int
    kind: str
    a: Fraction | None
    b: Fraction | None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(self.kind)

    @staticmethod
    def make(degree: int, kind: str, a, b, gamma) -> "Bar":
        a = None if a is None else Fraction(a)
        b = None if b is None else Fraction(b)
        if gamma.rank:
            anchor = b if a is None else a
            shift = anchor - gamma.normalize(anchor)
            a = None if a is None else a - shift
            b = None if b is None else b - shift
        return Bar(degree, kind, a, b)

    @property
    def length(self):
        if self.a is None or self.b is None:
            return INF
        return self.b - self.a

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "kind": self.kind,
            "a": None if self.a is None else fraction_str(self.a),
            "b": None if self.b is None else fraction_str(self.b),
        }

    def __str__(self):
        a = "-inf" if self.a is None else str(self.a)
        b = "inf" if self.b is None else str(self.b)
        left = "[" if self.kind in ("half_up", "inf_up", "closed") else "("
        right = "]" if self.kind in ("half_down", "inf_down", "closed") else ")"
        return f"H{self.degree} {left}{a}, {b}{right}"


def barcode_records(bars: Sequence[Bar]) -> list[dict]:
    """Serialize a bar multiset as sorted records with multiplicities."""
    counts: dict[Bar, int] = {}
    for b in bars:
        counts[b] = counts.get(b, 0) + 1
    out = []
    for b in sorted(counts, key=_bar_sort_key):
        rec = b.to_json()
        rec["multiplicity"] = counts[b]
        out.append(rec)
    return out


def _bar_sort_key(b: Bar):
    big = Fraction(10) ** 30
    return (
        b.degree,
        KINDS.index(b.kind),
        -big if b.a is None else b.a,
        big if b.b is None else b.b,
    )


def sorted_bars(bars) -> list[Bar]:
    return sorted(bars, key=_bar_sort_key)


# ---------------------------------------------------------------------------
# Floer-type complexes and their singular value decomposition


class FloerComplex:
    """Graded complex over a Novikov field with an orthogonal basis per degree.

    ``values[k]`` lists the filtration values of the basis of C_k and
    ``boundaries[k]`` is the matrix of ∂_k: C_k → C_{k−1} (rows indexed by
    the basis of C_{k−1}). Missing degrees are zero.
    """

    def __init__(self, domain: NovikovField, values: dict, boundaries: dict | None = None, check: bool = True):
        self.domain = domain
        self.values = {int(k): [Fraction(v) for v in vals] for k, vals in values.items()}
        self.boundaries = {}
        for k, mat in (boundaries or {}).items():
            k = int(k)
            self.boundaries[k] = [[domain(x) for x in row] for row in mat]
        if check:
            self.validate()

    @property
    def degrees(self) -> list[int]:
        ks = [k for k, v in self.values.items() if v]
        if not ks:
            return []
        return list(range(min(ks), max(ks) + 1))

    def dim(self, k: int) -> int:
        return len(self.values.get(k, []))

    def space(self, k: int) -> OrthoSpace:
        return OrthoSpace(self.domain, self.values.get(k, []))

    def boundary(self, k: int) -> list[list]:
        """∂_k as a dim(C_{k−1}) × dim(C_k) matrix (zero if absent)."""
        rows, cols = self.dim(k - 1), self.dim(k)
        mat = self.boundaries.get(k)
        if mat is None or rows == 0 or cols == 0:
            return [[self.domain.zero()] * cols for _ in range(rows)]
        return mat

    def apply(self, k: int, v: Sequence) -> list:
        return mat_vec(self.boundary(k), v, self.domain.zero())

    def validate(self):
        dom = self.domain
        for k, mat in self.boundaries.items():
            rows, cols = self.dim(k - 1), self.dim(k)
            if rows == 0 or cols == 0:
                if any(any(bool(x) for x in row) for row in mat):
                    raise ValueError(f"boundary in degree {k} maps into a zero space")
                continue
            if len(mat) != rows or any(len(r) != cols for r in mat):
                raise ValueError(f"boundary in degree {k} has the wrong shape")
            src, tgt = self.values[k], self.values[k - 1]
            for j in range(cols):
                for r in range(rows):
                    x = mat[r][j]
                    if not x:
                        continue
                    val = tgt[r] - dom.nu(x)
                    if (val > src[j]) if dom.up else (val < src[j]):
                        raise ValueError(f"boundary in degree {k} is not filtration-monotone")
        for k in self.boundaries:
            if k - 1 in self.boundaries and self.dim(k - 2) and self.dim(k):
                a, b = self.boundary(k - 1), self.boundary(k)
                for r in range(len(a)):
                    for c in range(self.dim(k)):
                        acc = dom.zero()
                        for m in range(len(b)):
                            if a[r][m] and b[m][c]:
                                acc = acc + a[r][m] * b[m][c]
                        if acc:
                            raise ValueError(f"∂∂ ≠ 0 in degree {k}")

    def conj(self) -> "FloerComplex":
        dom = self.domain
        return FloerComplex(
            dom.opposite,
            {k: [-v for v in vals] for k, vals in self.values.items()},
            {k: [[dom.conj(x) for x in row] for row in mat] for k, mat in self.boundaries.items()},
            check=False,
        )

    def direct_sum(self, other: "FloerComplex") -> "FloerComplex":
        if other.domain != self.domain:
            raise ValueError("mismatched Novikov fields")
        return FloerComplex(self.domain, *_sum_graded(self.domain, self, other), check=False)


def _sum_graded(dom, a: FloerComplex, b: FloerComplex):
    ks = set(a.values) | set(b.values)
    values = {k: a.values.get(k, []) + b.values.get(k, []) for k in ks}
    bds = {}
    for k in ks:
        ra, ca, rb, cb = a.dim(k - 1), a.dim(k), b.dim(k - 1), b.dim(k)
        if not (ra + rb and ca + cb):
            continue
        ma, mb = a.boundary(k), b.boundary(k)
        z = dom.zero()
        rows = [list(ma[i]) + [z] * cb for i in range(ra)]
        rows += [[z] * ca + list(mb[i]) for i in range(rb)]
        bds[k] = rows
    return values, bds


@dataclass
class SVDPair:
    """∂y = x with y in degree k+1 and x in degree k (original coordinates)."""

    degree: int
    x: list
    y: list
    ell_x: Fraction
    ell_y: Fraction


@dataclass
class HomologyData:
    """Orthogonal basis of H_k with spectral values and a cycle reduction map."""

    degree: int
    space: OrthoSpace
    cycles: list
    reduce: Callable[[Sequence], list]


@dataclass
class SVDData:
    orientation: str
    gamma: object
    pairs: list[SVDPair] = field(default_factory=list)
    homology: dict[int, HomologyData] = field(default_factory=dict)

    def boundary_basis(self, k: int) -> list:
        return [p.x for p in self.pairs if p.degree == k]

    def complement_basis(self, k: int) -> list:
        return [p.y for p in self.pairs if p.degree + 1 == k]

    def verbose_barcode(self) -> list[tuple]:
        """Entries (degree, [ℓ(x)] normalized, length) with length ∞ for homology."""
        out = []
        for p in self.pairs:
            if self.orientation == UP:
                length = p.ell_y - p.ell_x
            else:
                length = p.ell_x - p.ell_y
            out.append((p.degree, self.gamma.normalize(p.ell_x), length))
        for k, h in self.homology.items():
            for v in h.space.values:
                out.append((k, self.gamma.normalize(v), INF))
        return sorted(out, key=lambda e: (e[0], e[1], Fraction(10) ** 30 if is_infinite(e[2]) else e[2]))


def concise_barcode(svd: SVDData) -> list[Bar]:
    """Verbose barcode without zero-length entries, as interval classes."""
    bars = []
    g = svd.gamma
    for p in svd.pairs:
        if p.ell_x == p.ell_y:
            continue
        if svd.orientation == UP:
            bars.append(Bar.make(p.degree, "half_up", p.ell_x, p.ell_y, g))
        else:
            bars.append(Bar.make(p.degree, "half_down", p.ell_y, p.ell_x, g))
    for k, h in svd.homology.items():
        for v in h.space.values:
            if svd.orientation == UP:
                bars.append(Bar.make(k, "inf_up", v, None, g))
            else:
                bars.append(Bar.make(k, "inf_down", None, v, g))
    return sorted_bars(bars)


def svd_floer(C: FloerComplex, seed: int | None = None) -> SVDData:
    """Nonarchimedean singular value decomposition of a Floer-type complex.

    Down complexes are handled through conjugation. ``seed`` only changes
    pivot tie-breaking; the barcode does not depend on it.
    """
    if not C.domain.up:
        return _svd_from_conj(C, seed)
    return _svd_up(C, seed)


def _svd_from_conj(C: FloerComplex, seed) -> SVDData:
    dom = C.domain
    inner = _svd_up(C.conj(), seed)
    conj_vec = lambda v: [dom.opposite.conj(x) for x in v]
    out = SVDData(DOWN, dom.gamma)
    for p in inner.pairs:
        out.pairs.append(SVDPair(p.degree, conj_vec(p.x), conj_vec(p.y), -p.ell_x, -p.ell_y))
    for k, h in inner.homology.items():
        red = h.reduce
        out.homology[k] = HomologyData(
            k,
            OrthoSpace(dom, [-v for v in h.space.values]),
            [conj_vec(z) for z in h.cycles],
            lambda z, red=red: conj_vec(red(conj_vec(z))),
        )
    return out


class _DegreeState:
    """Basis change bookkeeping for one chain group during elimination."""

    def __init__(self, dom: NovikovField, values: list):
        n = len(values)
        self.values = values
        self.Y = identity(n, dom.zero(), dom.one())
        self.Yinv = identity(n, dom.zero(), dom.one())
        self.kernel: list[int] = list(range(n))


def _svd_up(C: FloerComplex, seed) -> SVDData:
    dom = C.domain
    zero, one = dom.zero(), dom.one()
    rng = random.Random(seed) if seed is not None else None
    out = SVDData(UP, dom.gamma)
    ks = C.degrees
    if not ks:
        return out
    states = {k: _DegreeState(dom, C.values.get(k, [])) for k in ks}

    def zcoords(k: int, v: Sequence) -> list:
        st = states[k]
        full = mat_vec(st.Yinv, v, zero)
        return [full[i] for i in st.kernel]

    def zcheck(k: int, v: Sequence) -> list:
        st = states[k]
        full = mat_vec(st.Yinv, v, zero)
        ker = set(st.kernel)
        if any(bool(full[i]) for i in range(len(full)) if i not in ker):
            raise ValueError(f"not a cycle in degree {k}")
        return [full[i] for i in st.kernel]

    def finish_homology(k: int, R: list, W: list, active_rows: list[int]):
        st = states[k]
        zbasis = [[st.Y[i][j] for i in range(len(st.values))] for j in st.kernel]
        zvals = [st.values[j] for j in st.kernel]
        cycles, vals = [], []
        for h in active_rows:
            cycles.append(_lincomb(dom, W[h], zbasis, len(st.values)))
            vals.append(zvals[h])
        rows = [R[h] for h in active_rows]

        def reduce(z, rows=rows, k=k):
            zc = zcheck(k, z)
            return mat_vec(rows, zc, zero)

        out.homology[k] = HomologyData(k, OrthoSpace(dom, vals), cycles, reduce)

    for idx, k in enumerate(ks):
        st = states[k]
        ncols = len(st.values)
        if idx == 0 or k - 1 not in states:
            continue
        prev = states[k - 1]
        nz = len(prev.kernel)
        zvals = [prev.values[j] for j in prev.kernel]
        zbasis = [[prev.Y[i][j] for i in range(len(prev.values))] for j in prev.kernel]
        bd = C.boundary(k)
        cols = [zcoords(k - 1, [bd[i][j] for i in range(len(bd))]) for j in range(ncols)]
        A = [[cols[j][r] for j in range(ncols)] for r in range(nz)]
        R = identity(nz, zero, one)
        W = identity(nz, zero, one)
        rkey = list(range(nz))
        ckey = list(range(ncols))
        if rng is not None:
            rng.shuffle(rkey)
            rng.shuffle(ckey)
        rows_left = set(range(nz))
        cols_left = set(range(ncols))
        while True:
            best = None
            for r in rows_left:
                Ar = A[r]
                for j in cols_left:
                    x = Ar[j]
                    if not x:
                        continue
                    key = (st.values[j] - zvals[r] + dom.nu(x), rkey[r], ckey[j])
                    if best is None or key < best[0]:
                        best = (key, r, j)
            if best is None:
                break
            _, r, j = best
            p = A[r][j]
            # clear row r with column operations on C_k
            for j2 in cols_left:
                if j2 == j or not A[r][j2]:
                    continue
                f = A[r][j2] / p
                for i in range(nz):
                    if A[i][j]:
                        A[i][j2] = A[i][j2] - f * A[i][j]
                for i in range(ncols):
                    if st.Y[i][j]:
                        st.Y[i][j2] = st.Y[i][j2] - f * st.Y[i][j]
                row_j, row_j2 = st.Yinv[j], st.Yinv[j2]
                st.Yinv[j] = [a + f * b if b else a for a, b in zip(row_j, row_j2)]
            # clear column j with row operations on Z_{k-1}
            for r2 in rows_left:
                if r2 == r or not A[r2][j]:
                    continue
                c = A[r2][j] / p
                A[r2][j] = zero
                R[r2] = [a - c * b if b else a for a, b in zip(R[r2], R[r])]
                W[r] = [a + c * b if b else a for a, b in zip(W[r], W[r2])]
            rows_left.discard(r)
            cols_left.discard(j)
            xr = _lincomb(dom, W[r], zbasis, len(prev.values))
            x = [p * a if a else a for a in xr]
            y = [st.Y[i][j] for i in range(ncols)]
            ell_x = zvals[r] - dom.nu(p)
            out.pairs.append(SVDPair(k - 1, x, y, ell_x, st.values[j]))
        st.kernel = sorted(cols_left)
        finish_homology(k - 1, R, W, sorted(rows_left))
    last = ks[-1]
    st = states[last]
    nz = len(st.kernel)
    finish_homology(last, identity(nz, zero, one), identity(nz, zero, one), list(range(nz)))
    out.pairs.sort(key=lambda p: (p.degree, p.ell_x, p.ell_y))
    return out


def homology_ortho(C: FloerComplex, seed: int | None = None) -> dict[int, HomologyData]:
    """Homology of C as orthogonalizable spaces with representing cycles."""
    return svd_floer(C, seed).homology


# ---------------------------------------------------------------------------
# Smith normal form over Λ


@dataclass
class SNFResult:
    U: list
    D: list
    V: list
    Uinv: list
    Vinv: list
    diagonal: list
    rank: int
    torsion: list  # (invariant factor, κ-dimension of Λ/(α))

    def kernel_basis(self) -> list[list]:
        """Columns of V⁻¹ past the rank span the kernel of M."""
        n = len(self.Vinv)
        return [[self.Vinv[i][j] for i in range(n)] for j in range(self.rank, n)]


def smith_normal_form(M: Sequence[Sequence], ring: GroupRing, seed: int | None = None) -> SNFResult:
    """Euclidean Smith normal form with M = U·D·V and U, V unimodular."""
    m = len(M)
    n = len(M[0]) if m else 0
    zero, one = ring.zero(), ring.one()
    A = [[ring(x) for x in row] for row in M]
    U, Uinv = identity(m, zero, one), identity(m, zero, one)
    V, Vinv = identity(n, zero, one), identity(n, zero, one)
    rng = random.Random(seed) if seed is not None else None
    rkey, ckey = list(range(m)), list(range(n))
    if rng is not None:
        rng.shuffle(rkey)
        rng.shuffle(ckey)

    def row_add(i, j, c):  # row i += c row j
        A[i] = [a + c * b if b else a for a, b in zip(A[i], A[j])]
        Uinv[i] = [a + c * b if b else a for a, b in zip(Uinv[i], Uinv[j])]
        for r in range(m):
            if U[r][i]:
                U[r][j] = U[r][j] - c * U[r][i]

    def col_add(i, j, c):  # col i += c col j
        for r in range(m):
            if A[r][j]:
                A[r][i] = A[r][i] + c * A[r][j]
        for r in range(n):
            if Vinv[r][j]:
                Vinv[r][i] = Vinv[r][i] + c * Vinv[r][j]
        V[j] = [a - c * b if b else a for a, b in zip(V[j], V[i])]

    def row_swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        Uinv[i], Uinv[j] = Uinv[j], Uinv[i]
        for r in range(m):
            U[r][i], U[r][j] = U[r][j], U[r][i]

    def col_swap(i, j):
        if i == j:
            return
        for r in range(m):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(n):
            Vinv[r][i], Vinv[r][j] = Vinv[r][j], Vinv[r][i]
        V[i], V[j] = V[j], V[i]

    def row_scale(i, u):
        ui = ring.unit_inverse(u)
        A[i] = [a * u for a in A[i]]
        Uinv[i] = [a * u for a in Uinv[i]]
        for r in range(m):
            U[r][i] = U[r][i] * ui

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j]:
                    key = (ring.norm(A[i][j]), rkey[i], ckey[j])
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, i, j = best
        row_swap(t, i)
        col_swap(t, j)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q, _ = ring.divmod(A[i][t], p)
                    row_add(i, t, -q)
                    dirty = dirty or bool(A[i][t])
            for j in range(t + 1, n):
                if A[t][j]:
                    q, _ = ring.divmod(A[t][j], p)
                    col_add(j, t, -q)
                    dirty = dirty or bool(A[t][j])
            if dirty:
                # move the smallest leftover in row/column t to the pivot spot
                cands = [(ring.norm(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
                cands += [(ring.norm(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
                _, idx, kind = min(cands)
                if kind == "r":
                    row_swap(t, idx)
                else:
                    col_swap(t, idx)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] and ring.divmod(A[i][j], p)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, one)
        _, u = ring.normal_associate(A[t][t])
        row_scale(t, ring.unit_inverse(u))
        t += 1
    diag = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    torsion = [(d, ring.quotient_dim(d)) for d in diag if not ring.is_unit(d)]
    return SNFResult(U, A, V, Uinv, Vinv, diag, len(diag), torsion)
