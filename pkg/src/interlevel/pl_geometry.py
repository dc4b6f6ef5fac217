"""Simplicial complexes with ℝ- or circle-valued PL functions.

A circle-valued function is given by vertex values θ_v and integer
windings n_uv on edges; the lift to the infinite cyclic cover changes
by θ_w − θ_v + λ₀·n_vw along the edge v → w. Each simplex has a
preferred lift: the one through the preferred lift (value θ) of its
smallest vertex.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .algebra import Field, GroupRing, TranslationGroup, fraction_str
from .chain_level import ChainLevelFMP
from .linalg_nonarch import FloerComplex

# ---------------------------------------------------------------------------
# input model


class SimplicialComplex:
    """Simplices as sorted vertex tuples; ``from_maximal`` closes under faces."""

    def __init__(self, simplices: Iterable[Sequence]):
        seen = set()
        out = []
        for s in simplices:
            t = tuple(sorted(s))
            if t and t not in seen:
                seen.add(t)
                out.append(t)
        self.simplices = sorted(out, key=lambda s: (len(s), s))
        self._index = None

    @classmethod
    def from_maximal(cls, simplices: Iterable[Sequence]) -> "SimplicialComplex":
        faces = set()
        for s in simplices:
            s = tuple(sorted(s))
            for r in range(1, len(s) + 1):
                faces.update(itertools.combinations(s, r))
        return cls(faces)

    @property
    def vertices(self) -> list:
        return [s[0] for s in self.simplices if len(s) == 1]

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def of_dim(self, k: int) -> list[tuple]:
        return [s for s in self.simplices if len(s) == k + 1]

    def index(self) -> dict:
        if self._index is None:
            idx = {}
            for k in range(self.dimension + 1):
                for i, s in enumerate(self.of_dim(k)):
                    idx[s] = i
            self._index = idx
        return self._index

    def missing_faces(self) -> list[tuple]:
        have = set(self.simplices)
        out = set()
        for s in self.simplices:
            for r in range(1, len(s)):
                for f in itertools.combinations(s, r):
                    if f not in have:
                        out.add(f)
        return sorted(out)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(s) - 1) for s in self.simplices)

    def disjoint_union(self, other: "SimplicialComplex", offset: int) -> "SimplicialComplex":
        return SimplicialComplex(self.simplices + [tuple(v + offset for v in s) for s in other.simplices])


@dataclass
class PLFunction:
    theta: dict  # vertex -> Fraction
    gamma: TranslationGroup = field(default_factory=TranslationGroup)
    windings: dict = field(default_factory=dict)  # (u, v) -> n on oriented edges

    def __post_init__(self):
        self.theta = {v: Fraction(x) for v, x in self.theta.items()}
        w = {}
        for (u, v), n in self.windings.items():
            w[(u, v)] = int(n)
            w[(v, u)] = -int(n)
        self.windings = w

    @property
    def circle(self) -> bool:
        return bool(self.gamma.rank)

    def winding(self, u, v) -> int:
        if u == v:
            return 0
        return self.windings.get((u, v), 0)

    def lift_offsets(self, s: Sequence) -> dict:
        """Offsets m_w (in units of λ₀) of the vertices in the preferred lift of s."""
        v0 = min(s)
        return {w: self.winding(v0, w) for w in s}

    def lift_values(self, s: Sequence) -> dict:
        offs = self.lift_offsets(s)
        lam = self.gamma.lambda0 if self.circle else Fraction(0)
        return {w: self.theta[w] + lam * offs[w] for w in s}


@dataclass
class Diagnostics:
    valid: bool
    errors: list = field(default_factory=list)
    levels: list = field(default_factory=list)


def validate(X: SimplicialComplex, f: PLFunction) -> Diagnostics:
    errs = []
    for face in X.missing_faces():
        errs.append(f"missing face {list(face)}")
    for v in X.vertices:
        if v not in f.theta:
            errs.append(f"vertex {v} has no value")
    edges = {s for s in X.of_dim(1)}
    for (u, v) in f.windings:
        if u < v and (u, v) not in edges and f.windings[(u, v)]:
            errs.append(f"winding on non-edge ({u}, {v})")
    if f.windings and not f.circle:
        errs.append("windings given for a real-valued function")
    for s in X.of_dim(2):
        a, b, c = s
        if f.winding(a, b) + f.winding(b, c) != f.winding(a, c):
            errs.append(f"cocycle condition fails on {list(s)}")
    levels = sorted(set(f.theta.values()))
    return Diagnostics(not errs, errs, levels)


# ---------------------------------------------------------------------------
# chain-level pair


def boundary_entries(X: SimplicialComplex, f: PLFunction, s: tuple):
    """Faces of the preferred lift of s as (face, sign, exponent multiplier)."""
    offs = f.lift_offsets(s) if f.circle else None
    out = []
    for i in range(len(s)):
        face = s[:i] + s[i + 1:]
        m = -offs[min(face)] if f.circle else 0
        out.append((face, -1 if i % 2 else 1, m))
    return out


def chain_level_fmp(X: SimplicialComplex, f: PLFunction, field_spec="Q") -> ChainLevelFMP:
    """Strict pair: C = simplicial chains of the cover over Λ, φ↑ and φ↓ identities."""
    diag = validate(X, f)
    if not diag.valid:
        raise ValueError("invalid PL input: " + "; ".join(diag.errors))
    kf = Field.parse(field_spec)
    ring = GroupRing(kf, f.gamma)
    up, down = ring.novikov("up"), ring.novikov("down")
    idx = X.index()
    dims, bds, vup, vdown = {}, {}, {}, {}
    for k in range(X.dimension + 1):
        cells = X.of_dim(k)
        dims[k] = len(cells)
        vals = [f.lift_values(s) for s in cells]
        vup[k] = [max(v.values()) for v in vals]
        vdown[k] = [min(v.values()) for v in vals]
        if k:
            M = [[ring.zero()] * len(cells) for _ in range(dims[k - 1])]
            for j, s in enumerate(cells):
                for face, sign, m in boundary_entries(X, f, s):
                    M[idx[face]][j] = ring.monomial(sign, m)
            bds[k] = M
    eye = {k: [[1 if i == j else 0 for j in range(n)] for i in range(n)] for k, n in dims.items()}
    upC = FloerComplex(up, vup, bds)
    downC = FloerComplex(down, vdown, bds)
    psi = None if ring.rank else {k: [[kf(x) for x in row] for row in m] for k, m in eye.items()}
    return ChainLevelFMP(ring, dims, bds, upC, downC, eye, eye, psi, psi, strict=True, check=False)


# ---------------------------------------------------------------------------
# level cuts and the interlevel oracle


def cut_at_level(X: SimplicialComplex, f: PLFunction | dict, c) -> tuple[SimplicialComplex, dict]:
    """Subdivide every edge crossing level c, in a global edge order.

    Each crossing edge uv gets a new vertex p with value c; every simplex
    through u and v is replaced by its two halves. Afterwards each simplex
    lies on one side of the level. Returns the new complex and values.
    """
    values = dict(f.theta if isinstance(f, PLFunction) else f)
    if isinstance(f, PLFunction) and f.circle:
        raise ValueError("cut a materialized window of the cover instead")
    c = Fraction(c)
    simplices = set(X.simplices)
    crossing = sorted(
        e for e in X.of_dim(1) if (values[e[0]] - c) * (values[e[1]] - c) < 0
    )
    next_id = max(values, default=-1) + 1
    for u, v in crossing:
        p = next_id
        next_id += 1
        values[p] = c
        new = set()
        for s in simplices:
            if u in s and v in s:
                new.add(tuple(sorted(p if x == u else x for x in s)))
                new.add(tuple(sorted(p if x == v else x for x in s)))
                rest = tuple(x for x in s if x != u and x != v)
                new.add(tuple(sorted(rest + (p,))))
            else:
                new.add(s)
        simplices = new
    return SimplicialComplex(simplices), values


def betti_numbers(X: SimplicialComplex, field_spec="Q") -> list[int]:
    kf = Field.parse(field_spec)
    idx = X.index()
    top = X.dimension
    ranks = [0] * (top + 2)
    for k in range(1, top + 1):
        cols = []
        for s in X.of_dim(k):
            col = {}
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col[idx[face]] = kf(-1 if i % 2 else 1)
            cols.append(col)
        ranks[k] = sparse_rank(cols, kf)
    return [len(X.of_dim(k)) - ranks[k] - ranks[k + 1] for k in range(top + 1)]


def sparse_rank(columns: list[dict], kf: Field) -> int:
    """Exact rank by column reduction with pivots at the largest row index."""
    pivots: dict = {}
    r = 0
    for col in columns:
        col = {i: x for i, x in col.items() if x}
        while col:
            low = max(col)
            if low not in pivots:
                pivots[low] = col
                r += 1
                break
            other = pivots[low]
            fct = col[low] / other[low]
            for i, x in other.items():
                y = col.get(i, kf.zero) - fct * x
                if y:
                    col[i] = y
                else:
                    col.pop(i, None)
    return r


def materialize_window(X: SimplicialComplex, f: PLFunction, lo, hi) -> tuple[SimplicialComplex, dict]:
    """All lifts of simplices whose value range meets [lo, hi], with faces.

    Lifted vertices get fresh integer ids ordered by (vertex, sheet).
    """
    if not f.circle:
        vals = {v: f.theta[v] for v in X.vertices}
        return X, vals
    lam = f.gamma.lambda0
    lo, hi = Fraction(lo), Fraction(hi)
    lifted = set()
    for s in X.simplices:
        offs = f.lift_offsets(s)
        vals = f.lift_values(s)
        mn, mx = min(vals.values()), max(vals.values())
        # shift j moves the lift by j·λ₀
        j0 = math.ceil((lo - mx) / lam)
        j1 = math.floor((hi - mn) / lam)
        for j in range(j0, j1 + 1):
            lifted.add(tuple(sorted((w, offs[w] + j) for w in s)))
    verts = sorted({x for s in lifted for x in s})
    ids = {x: i for i, x in enumerate(verts)}
    values = {ids[(w, m)]: f.theta[w] + lam * m for (w, m) in verts}
    cx = SimplicialComplex.from_maximal([tuple(ids[x] for x in s) for s in lifted])
    return cx, values


def is_regular(f: PLFunction, c) -> bool:
    """c is not a vertex value of the lift (mod λ₀ for circle-valued f)."""
    c = Fraction(c)
    if f.circle:
        lam = f.gamma.lambda0
        return all((c - v) % lam != 0 for v in f.theta.values())
    return c not in set(f.theta.values())


def interlevel_homology(X: SimplicialComplex, f: PLFunction, a, b, field_spec="Q") -> list[int]:
    """dim H_k(f̃⁻¹([a, b])) for k = 0..dim X, by cutting at a and b."""
    a, b = Fraction(a), Fraction(b)
    if a > b:
        raise ValueError("need a ≤ b")
    if not (is_regular(f, a) and is_regular(f, b)):
        raise ValueError("choose regular values")
    Y, vals = materialize_window(X, f, a, b)
    Y, vals = cut_at_level(Y, vals, a)
    Y, vals = cut_at_level(Y, vals, b)
    keep = [s for s in Y.simplices if all(a <= vals[v] <= b for v in s)]
    Z = SimplicialComplex(keep)
    dims = betti_numbers(Z, field_spec) if keep else []
    top = X.dimension
    return [dims[k] if k < len(dims) else 0 for k in range(top + 1)]


# ---------------------------------------------------------------------------
# extended persistence


@dataclass
class ExtendedDiagram:
    ordinary: list = field(default_factory=list)  # (degree, birth, death), birth < death
    relative: list = field(default_factory=list)  # (degree, birth, death), birth > death
    extended: list = field(default_factory=list)  # (degree, birth, death)

    def to_json(self) -> dict:
        def rec(items):
            return [{"degree": k, "birth": fraction_str(b), "death": fraction_str(d)} for k, b, d in items]

        return {"ordinary": rec(self.ordinary), "relative": rec(self.relative), "extended": rec(self.extended)}


def extended_persistence(X: SimplicialComplex, f: PLFunction, field_spec="Q") -> ExtendedDiagram:
    """Ordinary, relative and extended pairs of f (Γ = {0}).

    The filtration is: a cone vertex ω, then the lower-star filtration of
    X, then the cones ω·σ in upper-star order. Vertex ties are broken by
    vertex id. Pairs of zero persistence are dropped.
    """
    if f.circle:
        raise ValueError("extended persistence needs a real-valued function")
    kf = Field.parse(field_spec)
    order = sorted(X.vertices, key=lambda v: (f.theta[v], v))
    pos = {v: i for i, v in enumerate(order)}
    lower = sorted(X.simplices, key=lambda s: (max(pos[v] for v in s), len(s), s))
    upper = sorted(X.simplices, key=lambda s: (-min(pos[v] for v in s), len(s), s))
    # cells: ("w",) is ω; ("x", s) a simplex; ("c", s) the cone ω·s
    cells = [("w", ())] + [("x", s) for s in lower] + [("c", s) for s in upper]
    index = {c: i for i, c in enumerate(cells)}

    def boundary(cell):
        kind, s = cell
        out = {}
        if kind == "w":
            return out
        if kind == "x":
            if len(s) == 1:
                return out
            for i in range(len(s)):
                out[index[("x", s[:i] + s[i + 1:])]] = kf(-1 if i % 2 else 1)
            return out
        # ∂(ω·s) = s − ω·∂s
        out[index[("x", s)]] = kf.one
        if len(s) == 1:
            out[index[("w", ())]] = -kf.one
        else:
            for i in range(len(s)):
                out[index[("c", s[:i] + s[i + 1:])]] = kf(1 if i % 2 else -1)
        return out

    pivots: dict = {}
    pairs = []
    for j, cell in enumerate(cells):
        col = boundary(cell)
        while col:
            low = max(col)
            if low not in pivots:
                pivots[low] = (j, col)
                pairs.append((low, j))
                break
            _, other = pivots[low]
            fct = col[low] / other[low]
            for i, x in other.items():
                y = col.get(i, kf.zero) - fct * x
                if y:
                    col[i] = y
                else:
                    col.pop(i, None)

    def value(cell):
        kind, s = cell
        if kind == "x":
            return max(f.theta[v] for v in s)
        return min(f.theta[v] for v in s)

    def degree(cell):
        kind, s = cell
        return len(s) - 1 if kind == "x" else len(s)

    out = ExtendedDiagram()
    for bi, di in pairs:
        bc, dc = cells[bi], cells[di]
        if bc[0] == "w":
            continue
        b, d = value(bc), value(dc)
        k = degree(bc)
        if bc[0] == "x" and dc[0] == "x":
            if b != d:
                out.ordinary.append((k, b, d))
        elif bc[0] == "c":
            if b != d:
                out.relative.append((k, b, d))
        else:
            out.extended.append((k, b, d))
    out.ordinary.sort()
    out.relative.sort()
    out.extended.sort()
    return out


# ---------------------------------------------------------------------------
# file format and fixtures


@dataclass
class PLInput:
    X: SimplicialComplex
    f: PLFunction
    field: str = "Q"
    name: str = ""

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "field": self.field,
            "gamma": self.f.gamma.to_json() if self.f.circle else None,
            "vertices": [{"id": v, "theta": fraction_str(self.f.theta[v])} for v in self.X.vertices],
            "simplices": [list(s) for s in _maximal(self.X)],
        }
        if self.f.circle:
            out["windings"] = [[u, v, n] for (u, v), n in sorted(self.f.windings.items()) if u < v and n]
        return out


def _maximal(X: SimplicialComplex) -> list[tuple]:
    sset = set(X.simplices)
    out = []
    for s in X.simplices:
        bigger = any(set(s) < set(t) for t in sset if len(t) == len(s) + 1)
        if not bigger:
            out.append(s)
    return out


def load_pl(path_or_data, close: bool = True) -> PLInput:
    data = path_or_data
    if not isinstance(data, dict):
        data = json.loads(Path(data).read_text())
    g = data.get("gamma")
    lam = None if not g else g.get("lambda0")
    gamma = TranslationGroup(None if lam is None else Fraction(lam))
    theta = {int(v["id"]): Fraction(v["theta"]) for v in data["vertices"]}
    wind = {(int(u), int(v)): int(n) for u, v, n in data.get("windings", [])}
    simp = [tuple(int(x) for x in s) for s in data.get("simplices", [])]
    simp += [(v,) for v in theta]
    X = SimplicialComplex.from_maximal(simp) if close else SimplicialComplex(simp)
    return PLInput(X, PLFunction(theta, gamma, wind), data.get("field", "Q"), data.get("name", ""))


def fixture_path(name: str) -> Path:
    return Path(__file__).with_name("fixtures") / f"{name}.json"


def load_fixture(name: str) -> PLInput:
    return load_pl(fixture_path(name))


# triangulations ------------------------------------------------------------


def polygon(n: int) -> list[tuple]:
    return [(i, (i + 1) % n) for i in range(n)]


def octahedron() -> list[tuple]:
    """Boundary of the octahedron on vertices 0..5 (antipodes i, i+3)."""
    out = []
    for a in (0, 3):
        for b in (1, 4):
            for c in (2, 5):
                out.append((a, b, c))
    return out


def torus7() -> list[tuple]:
    """The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    out = []
    for i in range(7):
        out.append((i, (i + 1) % 7, (i + 3) % 7))
        out.append((i, (i + 2) % 7, (i + 3) % 7))
    return out


def genus_two() -> list[tuple]:
    """Connected sum of two 7-vertex tori along the triangle {0, 1, 3}.

    The second torus uses vertices 0, 1, 3 and 7..10.
    """
    t1 = [t for t in torus7() if sorted(t) != [0, 1, 3]]
    relabel = {0: 0, 1: 1, 3: 3, 2: 7, 4: 8, 5: 9, 6: 10}
    t2 = [tuple(relabel[v] for v in t) for t in torus7() if sorted(t) != [0, 1, 3]]
    return t1 + t2


def grid_torus(n: int, m: int) -> list[tuple]:
    """n × m grid torus; vertex (i, j) has id i·m + j."""
    out = []
    vid = lambda i, j: (i % n) * m + (j % m)
    for i in range(n):
        for j in range(m):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            out += [(a, b, d), (a, c, d)]
    return out


def grid_klein(n: int, m: int) -> list[tuple]:
    """n × m grid Klein bottle: (i, j) ~ (i+n, m−j) in the first direction."""
    out = []

    def vid(i, j):
        if i >= n:
            i -= n
            j = -j
        return i * m + (j % m)

    for i in range(n):
        for j in range(m):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            out += [(a, b, d), (a, c, d)]
    return out


def circle_identity(n: int = 3, lam=1) -> PLInput:
    """Identity S¹ → S¹ on an n-gon: θ_i = iλ₀/n, closing edge winding 1."""
    lam = Fraction(lam)
    theta = {i: lam * i / n for i in range(n)}
    X = SimplicialComplex.from_maximal(polygon(n))
    return PLInput(X, PLFunction(theta, TranslationGroup(lam), {(0, n - 1): -1}), "Q", "circle_identity")


WAVY_ROWS = (0, Fraction(1, 6), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(5, 6))


def _row_heights(rows, n):
    if rows is None:
        return [Fraction(i, n) for i in range(n)]
    return [Fraction(r) for r in rows]


def torus_projection(n: int = 3, m: int = 3, lam=1, field_spec="Q", bump=None, rows=None) -> PLInput:
    """Projection of the n × m grid torus onto the circle along i.

    ``rows`` gives the height of each row as a fraction of λ₀ (default i/n);
    a non-monotone profile creates critical circles. ``bump`` adds a small
    variation in the j direction so that values are distinct.
    """
    lam = Fraction(lam)
    h = _row_heights(rows, n)
    n = len(h)
    bump = bump or (lambda j: Fraction(j, 10 * n * m))
    theta = {i * m + j: lam * (h[i] + bump(j)) for i in range(n) for j in range(m)}
    X = SimplicialComplex.from_maximal(grid_torus(n, m))
    wind = {}
    for u, v in X.of_dim(1):
        iu, iv = u // m, v // m
        if {iu, iv} == {0, n - 1}:
            wind[(u, v)] = 1 if iu == n - 1 else -1
    return PLInput(X, PLFunction(theta, TranslationGroup(lam), wind), field_spec, "torus_circle")


def klein_projection(n: int = 3, m: int = 3, lam=1, field_spec="GF2", rows=None) -> PLInput:
    """Klein bottle as a mapping torus over the circle, projected to S¹."""
    lam = Fraction(lam)
    h = _row_heights(rows, n)
    n = len(h)
    bump = lambda j: Fraction(min(j, m - j), 10 * n * m)
    theta = {i * m + j: lam * (h[i] + bump(j)) for i in range(n) for j in range(m)}
    X = SimplicialComplex.from_maximal(grid_klein(n, m))
    wind = {}
    for u, v in X.of_dim(1):
        iu, iv = u // m, v // m
        if {iu, iv} == {0, n - 1}:
            wind[(u, v)] = 1 if iu == n - 1 else -1
    return PLInput(X, PLFunction(theta, TranslationGroup(lam), wind), field_spec, "klein_circle")


def random_function(X: SimplicialComplex, rng, denominator: int = 12, spread: int = 60) -> PLFunction:
    """Distinct random rational vertex values."""
    vals = rng.sample(range(-spread, spread), len(X.vertices))
    return PLFunction({v: Fraction(x, denominator) for v, x in zip(X.vertices, vals)})


def surface(name: str) -> SimplicialComplex:
    shapes = {
        "circle": polygon(5),
        "sphere": octahedron(),
        "torus": torus7(),
        "genus2": genus_two(),
    }
    return SimplicialComplex.from_maximal(shapes[name])
