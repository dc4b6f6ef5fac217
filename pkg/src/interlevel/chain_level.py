"""Chain-level filtered matched pairs and the two-parameter module ℍ_k.

A chain-level pair consists of a complex C of free Λ-modules, an up
Floer complex C↑, a down Floer complex C↓ and chain maps φ↑: C → C↑,
φ↓: C → C↓ that become homotopy equivalences after extending
coefficients. ℍ_k at (s, t) models H_k of the interlevel set over
[−s, t]; dimensions and ranks are read off the block decomposition.
The literal mapping cone is only built for Γ = {0} strict pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .algebra import Field, GroupRing, TranslationGroup, identity, rank
from .linalg_nonarch import (
    Bar,
    FloerComplex,
    OrthoSpace,
    concise_barcode,
    smith_normal_form,
    sorted_bars,
    svd_floer,
)
from .matched_pair import FilteredMatchedPair, _lambda_matmul, apply_map, basis_spectrum
from .pn_structure import essential_from_spectra


def _zero_mat(rows: int, cols: int, zero) -> list[list]:
    return [[zero] * cols for _ in range(rows)]


def _block_diag(a: list[list], ar: int, ac: int, b: list[list], br: int, bc: int, zero) -> list[list]:
    a = a if a else _zero_mat(ar, ac, zero)
    b = b if b else _zero_mat(br, bc, zero)
    rows = [list(a[i]) + [zero] * bc for i in range(ar)]
    rows += [[zero] * ac + list(b[i]) for i in range(br)]
    return rows


class ChainLevelFMP:
    """(C, C↓, C↑, φ↓, φ↑) with optional homotopy inverses for the Γ = {0} oracle.

    ``dims[k]`` is the rank of C_k and ``boundaries[k]`` the Λ-matrix of
    ∂_k: C_k → C_{k−1}. ``phi_up[k]`` has rows indexed by the basis of
    C↑_k and columns by that of C_k; likewise ``phi_down``. ``psi_up`` and
    ``psi_down`` are κ-matrices C↑_k → C_k and C↓_k → C_k when known.
    """

    def __init__(
        self,
        ring: GroupRing,
        dims: dict,
        boundaries: dict,
        up: FloerComplex,
        down: FloerComplex,
        phi_up: dict,
        phi_down: dict,
        psi_up: dict | None = None,
        psi_down: dict | None = None,
        strict: bool = False,
        check: bool = True,
    ):
        self.ring = ring
        self.dims = {int(k): int(v) for k, v in dims.items() if v}
        self.boundaries = {int(k): [[ring(x) for x in row] for row in m] for k, m in boundaries.items()}
        self.up = up
        self.down = down
        self.phi_up = {int(k): [[up.domain(x) for x in row] for row in m] for k, m in phi_up.items()}
        self.phi_down = {int(k): [[down.domain(x) for x in row] for row in m] for k, m in phi_down.items()}
        self.psi_up = psi_up
        self.psi_down = psi_down
        self.strict = strict
        self._svd: dict = {}
        if check:
            self.validate()

    # structure --------------------------------------------------------------

    @property
    def gamma(self):
        return self.ring.gamma

    @property
    def degrees(self) -> list[int]:
        ks = set(self.dims) | set(self.up.degrees) | set(self.down.degrees)
        if not ks:
            return []
        return list(range(min(ks), max(ks) + 1))

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def boundary(self, k: int) -> list[list]:
        rows, cols = self.dim(k - 1), self.dim(k)
        m = self.boundaries.get(k)
        if m is None or not rows or not cols:
            return _zero_mat(rows, cols, self.ring.zero())
        return m

    def phi(self, side: str, k: int) -> list[list]:
        cx = self.up if side == "up" else self.down
        maps = self.phi_up if side == "up" else self.phi_down
        m = maps.get(k)
        if m is None or not cx.dim(k) or not self.dim(k):
            return _zero_mat(cx.dim(k), self.dim(k), cx.domain.zero())
        return m

    def validate(self):
        ring = self.ring
        for k in self.boundaries:
            m = self.boundary(k)
            if len(m) != self.dim(k - 1) or any(len(r) != self.dim(k) for r in m):
                raise ValueError(f"∂_{k} of C has the wrong shape")
        for k in self.dims:
            if self.dim(k - 1) and self.dim(k + 1):
                prod = _lambda_matmul(ring, self.boundary(k), self.boundary(k + 1))
                if any(any(bool(x) for x in row) for row in prod):
                    raise ValueError(f"∂∂ ≠ 0 on C in degree {k + 1}")
        for side, cx in (("up", self.up), ("down", self.down)):
            dom = cx.domain
            for k in self.degrees:
                phik = self.phi(side, k)
                if len(phik) != cx.dim(k) or any(len(r) != self.dim(k) for r in phik):
                    raise ValueError(f"φ{side} in degree {k} has the wrong shape")
                # chain map: ∂' φ_k = φ_{k−1} ∂_k
                for j in range(self.dim(k)):
                    col = [phik[i][j] for i in range(cx.dim(k))]
                    lhs = cx.apply(k, col) if cx.dim(k - 1) else []
                    bcol = [self.boundary(k)[i][j] for i in range(self.dim(k - 1))]
                    rhs = apply_map(dom, self.phi(side, k - 1), bcol) if cx.dim(k - 1) else []
                    if [dom(x) for x in lhs] != rhs:
                        raise ValueError(f"φ{side} is not a chain map in degree {k}")
            for k in self.degrees:
                if self._novikov_betti(cx.domain, k) != _floer_betti(cx, k):
                    raise ValueError(f"φ{side} is not a quasi-isomorphism in degree {k}")

    def _novikov_betti(self, dom, k: int) -> int:
        def rk(mat):
            if not mat or not mat[0]:
                return 0
            return rank([[dom(x) for x in row] for row in mat], dom.zero(), dom.one())

        return self.dim(k) - rk(self.boundary(k)) - rk(self.boundary(k + 1))

    def svd(self, side: str, seed: int | None = None):
        key = (side, seed)
        if key not in self._svd:
            self._svd[key] = svd_floer(self.up if side == "up" else self.down, seed)
        return self._svd[key]

    def direct_sum(self, other: "ChainLevelFMP") -> "ChainLevelFMP":
        ring = self.ring
        z = ring.zero()
        ks = set(self.degrees) | set(other.degrees)
        dims = {k: self.dim(k) + other.dim(k) for k in ks}
        bds = {}
        for k in ks:
            if dims.get(k) and dims.get(k - 1):
                bds[k] = _block_diag(
                    self.boundary(k), self.dim(k - 1), self.dim(k),
                    other.boundary(k), other.dim(k - 1), other.dim(k), z,
                )
        up = self.up.direct_sum(other.up)
        down = self.down.direct_sum(other.down)
        phis = {}
        for side, cx_a, cx_b in (("up", self.up, other.up), ("down", self.down, other.down)):
            zz = cx_a.domain.zero()
            phis[side] = {
                k: _block_diag(
                    self.phi(side, k), cx_a.dim(k), self.dim(k),
                    other.phi(side, k), cx_b.dim(k), other.dim(k), zz,
                )
                for k in ks
            }
        psis = {}
        for side, cx_a, cx_b in (("up", self.up, other.up), ("down", self.down, other.down)):
            pa = self.psi_up if side == "up" else self.psi_down
            pb = other.psi_up if side == "up" else other.psi_down
            if pa is None or pb is None:
                psis[side] = None
                continue
            zz = ring.field.zero
            psis[side] = {
                k: _block_diag(
                    pa.get(k), self.dim(k), cx_a.dim(k),
                    pb.get(k), other.dim(k), cx_b.dim(k), zz,
                )
                for k in ks
            }
        return ChainLevelFMP(
            ring, dims, bds, up, down, phis["up"], phis["down"],
            psis["up"], psis["down"], self.strict and other.strict, check=False,
        )


def _floer_betti(cx: FloerComplex, k: int) -> int:
    dom = cx.domain

    def rk(mat):
        if not mat or not mat[0]:
            return 0
        return rank(mat, dom.zero(), dom.one())

    return cx.dim(k) - rk(cx.boundary(k)) - rk(cx.boundary(k + 1))


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyOverLambda:
    degree: int
    free_cycles: list  # Λ-cycles in C_k whose classes form a basis of the free part
    torsion: list  # (invariant factor, κ-dimension)

    @property
    def torsion_dim(self) -> int:
        return sum(d for _, d in self.torsion)


def lambda_homology(CP: ChainLevelFMP, k: int, seed: int | None = None) -> HomologyOverLambda:
    """H_k(C) = Z_k / B_k through two Smith normal forms."""
    ring = CP.ring
    n = CP.dim(k)
    if n == 0:
        return HomologyOverLambda(k, [], [])
    zero = ring.zero()
    if CP.dim(k - 1):
        snf = smith_normal_form(CP.boundary(k), ring, seed)
        r = snf.rank
        V, Vinv = snf.V, snf.Vinv
    else:
        r = 0
        V = Vinv = identity(n, zero, ring.one())
    z = n - r
    K = [[Vinv[i][j] for j in range(r, n)] for i in range(n)]
    if CP.dim(k + 1) and z:
        VB = _lambda_matmul(ring, V, CP.boundary(k + 1))
        A = VB[r:]
        snf2 = smith_normal_form(A, ring, seed)
        U2, r2, torsion = snf2.U, snf2.rank, snf2.torsion
    else:
        U2, r2, torsion = identity(z, zero, ring.one()), 0, []
    cycles = []
    for j in range(r2, z):
        w = [U2[i][j] for i in range(z)]
        cycles.append([sum((K[i][m] * w[m] for m in range(z) if K[i][m] and w[m]), zero) for i in range(n)])
    return HomologyOverLambda(k, cycles, torsion)


def homology_fmp(CP: ChainLevelFMP, k: int, seed: int | None = None) -> FilteredMatchedPair:
    """The filtered matched pair H_k(C) → (H_k(C↑), ρ↑), (H_k(C↓), ρ↓)."""
    ring = CP.ring
    up, down = ring.novikov("up"), ring.novikov("down")
    H = lambda_homology(CP, k, seed)
    d = len(H.free_cycles)
    legs = []
    for side, dom in (("up", up), ("down", down)):
        h = CP.svd(side, seed).homology.get(k)
        dim = 0 if h is None else h.space.dim
        if dim != d:
            raise ValueError(
                f"quasi-isomorphism failure in degree {k}: free rank {d}, {side} homology dimension {dim}"
            )
        if d == 0:
            legs.append(([], OrthoSpace(dom, [])))
            continue
        phik = CP.phi(side, k)
        cols = [h.reduce(apply_map(dom, phik, c)) for c in H.free_cycles]
        legs.append(([[cols[j][i] for j in range(d)] for i in range(d)], h.space))
    (Pu, Su), (Pd, Sd) = legs
    return FilteredMatchedPair(ring, Pu, Su, Pd, Sd, H.torsion_dim)


def spectra(CP: ChainLevelFMP, seed: int | None = None) -> dict[int, list]:
    return {k: basis_spectrum(homology_fmp(CP, k, seed), seed) for k in CP.degrees}


def torsion_dims(CP: ChainLevelFMP, seed: int | None = None) -> dict[int, int]:
    out = {}
    for k in CP.degrees:
        t = lambda_homology(CP, k, seed).torsion_dim
        if t:
            out[k] = t
    return out


# ---------------------------------------------------------------------------
# building blocks


def _empty(dom) -> FloerComplex:
    return FloerComplex(dom, {}, {}, check=False)


def _elementary(dom, k: int, lx, ly) -> FloerComplex:
    return FloerComplex(dom, {k: [lx], k + 1: [ly]}, {k + 1: [[dom.one()]]})


def make_block(kind: str, ring: GroupRing, **params) -> ChainLevelFMP:
    """Elementary chain-level pairs.

    kind "PEup"(a, L, k): C = 0, C↑ has ∂y = x with ℓ(x) = a, ℓ(y) = a + L.
    kind "PEdown"(b, L, k): C = 0, C↓ has ∂y = x with ℓ(x) = b, ℓ(y) = b − L.
    kind "PM"(a, b, k): C_k = Λ mapped to Λ↑ (value a) and Λ↓ (value b).
    kind "PR"(T, k): C_{k+1} → C_k is diag(f_i) for T = ⊕ Λ/(f_i).
    """
    up, down = ring.novikov("up"), ring.novikov("down")
    k = int(params.get("k", 0))
    kf = ring.field
    if kind == "PEup":
        a, L = Fraction(params["a"]), Fraction(params["L"])
        if L < 0:
            raise ValueError("L must be nonnegative")
        return ChainLevelFMP(ring, {}, {}, _elementary(up, k, a, a + L), _empty(down), {}, {}, {}, {}, True)
    if kind == "PEdown":
        b, L = Fraction(params["b"]), Fraction(params["L"])
        if L < 0:
            raise ValueError("L must be nonnegative")
        return ChainLevelFMP(ring, {}, {}, _empty(up), _elementary(down, k, b, b - L), {}, {}, {}, {}, True)
    if kind == "PM":
        a, b = Fraction(params["a"]), Fraction(params["b"])
        one = [[kf.one]]
        return ChainLevelFMP(
            ring,
            {k: 1},
            {},
            FloerComplex(up, {k: [a]}),
            FloerComplex(down, {k: [b]}),
            {k: [[up.one()]]},
            {k: [[down.one()]]},
            {k: one},
            {k: one},
            True,
        )
    if kind == "PR":
        fs = [ring(f) for f in params["T"]]
        if not ring.rank:
            raise ValueError("torsion modules need a nontrivial Γ")
        if any(not f or ring.is_unit(f) for f in fs):
            raise ValueError("each cyclic factor Λ/(f) needs f nonzero and not a unit")
        r = len(fs)
        diag = [[fs[i] if i == j else ring.zero() for j in range(r)] for i in range(r)]
        return ChainLevelFMP(ring, {k: r, k + 1: r}, {k + 1: diag}, _empty(up), _empty(down), {}, {}, None, None, True)
    raise ValueError(f"unknown block kind {kind!r}")


def sum_blocks(blocks: Sequence[ChainLevelFMP]) -> ChainLevelFMP:
    out = blocks[0]
    for b in blocks[1:]:
        out = out.direct_sum(b)
    return out


def load_blocks(path_or_data) -> ChainLevelFMP:
    """Direct sum of the elementary pairs listed in a block file."""
    data = path_or_data
    if not isinstance(data, dict):
        data = json.loads(Path(data).read_text())
    g = data.get("gamma")
    lam = None if not g else g.get("lambda0")
    ring = GroupRing(Field.parse(data.get("field", "Q")), TranslationGroup(None if lam is None else Fraction(lam)))
    blocks = []
    for item in data.get("blocks", []):
        params = {key: v for key, v in item.items() if key != "kind"}
        if "T" in params:
            params["T"] = [ring.from_json(f) for f in params["T"]]
        blocks.append(make_block(item["kind"], ring, **params))
    if not blocks:
        return ChainLevelFMP(ring, {}, {}, _empty(ring.novikov("up")), _empty(ring.novikov("down")), {}, {}, {}, {}, True)
    return sum_blocks(blocks)


# ---------------------------------------------------------------------------
# block decomposition and ℍ_k


BLOCK_KINDS = ("torsion", "fin_up", "fin_down", "ess_closed", "ess_open")


@dataclass(frozen=True, order=True)
class BlockSummand:
    """One block module of ℍ_k (all Γ-translates together).

    torsion: dim copies of the whole plane; fin_up (a, b): t ∈ [a−g, b−g);
    fin_down (a, b): s ∈ [−b−g, −a−g); ess_closed (a, b) from a spectrum
    element of H_k: s ≥ −b+g and t ≥ a−g; ess_open (a, b) from a spectrum
    element of H_{k+1}: s < −b+g and t < a−g. Here b = a + ℓ.
    """

    degree: int
    kind: str
    a: Fraction | None = None
    b: Fraction | None = None
    dim: int = 1

    def g_interval(self, s, t):
        """Interval of g ∈ ℝ whose translate contains (s, t): (lo, hi, lo_closed, hi_closed)."""
        s, t = Fraction(s), Fraction(t)
        a, b = self.a, self.b
        if self.kind == "fin_up":
            return (a - t, b - t, True, False)
        if self.kind == "fin_down":
            return (-b - s, -a - s, True, False)
        if self.kind == "ess_closed":
            return (a - t, b + s, True, True)
        if self.kind == "ess_open":
            return (b + s, a - t, False, False)
        raise ValueError(self.kind)

    def to_json(self) -> dict:
        from .algebra import fraction_str

        out = {"degree": self.degree, "kind": self.kind}
        if self.kind == "torsion":
            out["dim"] = self.dim
        else:
            out["a"] = fraction_str(self.a)
            out["b"] = fraction_str(self.b)
        return out


def block_decomposition(CP: ChainLevelFMP, seed: int | None = None) -> list[BlockSummand]:
    cache = CP.__dict__.setdefault("_blocks", {})
    if seed not in cache:
        cache[seed] = _block_decomposition(CP, seed)
    return list(cache[seed])


def _block_decomposition(CP: ChainLevelFMP, seed) -> list[BlockSummand]:
    out = []
    for k, t in torsion_dims(CP, seed).items():
        out.append(BlockSummand(k, "torsion", dim=t))
    for side, kind in (("up", "fin_up"), ("down", "fin_down")):
        for bar in concise_barcode(CP.svd(side, seed)):
            if bar.kind in ("half_up", "half_down"):
                out.append(BlockSummand(bar.degree, kind, bar.a, bar.b))
    for k, spec in spectra(CP, seed).items():
        for a, ell in spec:
            out.append(BlockSummand(k, "ess_closed", a, a + ell))
            out.append(BlockSummand(k - 1, "ess_open", a, a + ell))
    return sorted(out)


def declared_summands(items: Sequence[dict], ring: GroupRing) -> list[BlockSummand]:
    """The block summands that the elementary pairs of a block file should produce."""
    gamma = ring.gamma
    out, torsion = [], {}
    for item in items:
        k = int(item.get("k", 0))
        kind = item["kind"]
        if kind == "PM":
            a, b = Fraction(item["a"]), Fraction(item["b"])
            a0 = gamma.normalize(a)
            out += [BlockSummand(k, "ess_closed", a0, a0 + b - a), BlockSummand(k - 1, "ess_open", a0, a0 + b - a)]
        elif kind == "PEup" and Fraction(item["L"]):
            a = gamma.normalize(Fraction(item["a"]))
            out.append(BlockSummand(k, "fin_up", a, a + Fraction(item["L"])))
        elif kind == "PEdown" and Fraction(item["L"]):
            lo = gamma.normalize(Fraction(item["b"]) - Fraction(item["L"]))
            out.append(BlockSummand(k, "fin_down", lo, lo + Fraction(item["L"])))
        elif kind == "PR":
            dim = sum(ring.quotient_dim(ring.from_json(f)) for f in item["T"])
            torsion[k] = torsion.get(k, 0) + dim
    out += [BlockSummand(k, "torsion", dim=d) for k, d in torsion.items()]
    return sorted(out)


def _count(gamma, iv) -> int:
    lo, hi, lc, hc = iv
    return gamma.count_in(lo, hi, lc, hc)


def hk_dim_from_blocks(blocks: Sequence[BlockSummand], gamma, k: int, s, t) -> int:
    total = 0
    for b in blocks:
        if b.degree != k:
            continue
        if b.kind == "torsion":
            total += b.dim
        else:
            total += _count(gamma, b.g_interval(s, t))
    return total


def hk_rank_from_blocks(blocks: Sequence[BlockSummand], gamma, k: int, p, q) -> int:
    (s, t), (s2, t2) = p, q
    if s2 < s or t2 < t:
        raise ValueError("ranks need (s, t) ≼ (s′, t′)")
    total = 0
    for b in blocks:
        if b.degree != k:
            continue
        if b.kind == "torsion":
            total += b.dim
            continue
        lo1, hi1, lc1, hc1 = b.g_interval(s, t)
        lo2, hi2, lc2, hc2 = b.g_interval(s2, t2)
        lo, lc = (lo1, lc1) if lo1 > lo2 else (lo2, lc2) if lo2 > lo1 else (lo1, lc1 and lc2)
        hi, hc = (hi1, hc1) if hi1 < hi2 else (hi2, hc2) if hi2 < hi1 else (hi1, hc1 and hc2)
        total += gamma.count_in(lo, hi, lc, hc)
    return total


def hk_dim(CP: ChainLevelFMP, k: int, s, t, seed: int | None = None) -> int:
    return hk_dim_from_blocks(block_decomposition(CP, seed), CP.gamma, k, s, t)


def hk_rank(CP: ChainLevelFMP, k: int, p, q, seed: int | None = None) -> int:
    return hk_rank_from_blocks(block_decomposition(CP, seed), CP.gamma, k, p, q)


# ---------------------------------------------------------------------------
# full barcode


@dataclass
class FullBarcode:
    bars: list = field(default_factory=list)
    torsion: dict = field(default_factory=dict)

    def degree(self, k: int) -> list[Bar]:
        return [b for b in self.bars if b.degree == k]

    def to_json(self) -> dict:
        from .linalg_nonarch import barcode_records

        return {
            "bars": barcode_records(self.bars),
            "torsion": [{"degree": k, "dim": d} for k, d in sorted(self.torsion.items())],
        }


def full_barcode(CP: ChainLevelFMP, seed: int | None = None) -> FullBarcode:
    bars = []
    for side, kind in (("up", "half_up"), ("down", "half_down")):
        bars += [b for b in concise_barcode(CP.svd(side, seed)) if b.kind == kind]
    bars += essential_from_spectra(spectra(CP, seed), CP.gamma)
    return FullBarcode(sorted_bars(bars), torsion_dims(CP, seed))


# ---------------------------------------------------------------------------
# direct cone oracle for Γ = {0}


def hk_cone_direct(CP: ChainLevelFMP, k: int, s, t) -> int:
    """dim H_{k+1} of the cone of −ψ↓ + ψ↑ on the (s, t)-filtered piece.

    Only for Γ = {0} with known homotopy inverses; the filtered piece is
    spanned by the basis elements with ℓ↓ ≥ −s and ℓ↑ ≤ t.
    """
    if CP.ring.rank or CP.psi_up is None or CP.psi_down is None:
        raise NotImplementedError("the direct cone needs Γ = {0} and explicit homotopy inverses")
    kf = CP.ring.field
    zero, one = kf.zero, kf.one
    s, t = Fraction(s), Fraction(t)

    def sel(side, j):
        cx = CP.up if side == "up" else CP.down
        vals = cx.values.get(j, [])
        if side == "up":
            return [i for i, v in enumerate(vals) if v <= t]
        return [i for i, v in enumerate(vals) if v >= -s]

    def psi(side, j):
        p = (CP.psi_up if side == "up" else CP.psi_down).get(j)
        cx = CP.up if side == "up" else CP.down
        if p is None or not p:
            return _zero_mat(CP.dim(j), cx.dim(j), zero)
        return p

    def dom_dim(j):
        return len(sel("down", j)) + len(sel("up", j))

    def cone_dim(j):
        return dom_dim(j - 1) + CP.dim(j)

    def cone_diff(j):
        """Matrix of d: Cone_j → Cone_{j−1}, Cone_j = A_{j−1} ⊕ C_j."""
        rows_a = dom_dim(j - 2)
        rows_c = CP.dim(j - 1)
        cols_a = dom_dim(j - 1)
        cols_c = CP.dim(j)
        M = _zero_mat(rows_a + rows_c, cols_a + cols_c, zero)
        col = 0
        for side, sign in (("down", -one), ("up", one)):
            cx = CP.up if side == "up" else CP.down
            src = sel(side, j - 1)
            ps = psi(side, j - 1)
            bd = cx.boundary(j - 1) if cx.dim(j - 2) else None
            for i in src:
                # −∂a part, restricted to the filtered piece in degree j−2
                if bd is not None:
                    off = 0
                    for side2 in ("down", "up"):
                        tgt = sel(side2, j - 2)
                        if side2 == side:
                            pos = {r: n for n, r in enumerate(tgt)}
                            for r in range(cx.dim(j - 2)):
                                x = bd[r][i]
                                if x:
                                    if r not in pos:
                                        raise ValueError("filtered piece is not a subcomplex")
                                    M[off + pos[r]][col] = M[off + pos[r]][col] - x
                        off += len(tgt)
                # F a part
                for r in range(CP.dim(j - 1)):
                    x = ps[r][i]
                    if x:
                        M[rows_a + r][col] = M[rows_a + r][col] + sign * x
                col += 1
        bdc = CP.boundary(j) if CP.dim(j - 1) else None
        for i in range(cols_c):
            if bdc is not None:
                for r in range(rows_c):
                    x = bdc[r][i]
                    if x:
                        M[rows_a + r][cols_a + i] = kf(x)
        return M

    def rk(j):
        if not cone_dim(j) or not cone_dim(j - 1):
            return 0
        return rank(cone_diff(j), zero, one)

    j = k + 1
    return cone_dim(j) - rk(j) - rk(j + 1)
