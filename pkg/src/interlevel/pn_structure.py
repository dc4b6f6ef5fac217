"""Poincaré–Novikov structures and their per-degree matched pairs.

A structure in formal dimension n carries, per degree k, a Λ-module H_k
(free part of rank d_k plus cyclic torsion summands), a sesquilinear
pairing D_k against H_{n−k}, an up space V_k and a map S_k: H_k → V_k.
The pairing is stored as the matrix P_k[a][b] = (D_k x_a)(y_b) on free
generators; it is conjugate-linear in x and linear in y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .algebra import Field, GroupRing, LaurentPoly, TranslationGroup, det, det_ring, inverse
from .linalg_nonarch import Bar, OrthoSpace, sorted_bars
from .matched_pair import (
    FilteredMatchedPair,
    basis_spectrum,
    gaps_of_spectrum,
)

WEAK, STRONG, INVALID = "weak", "strong", "invalid"


@dataclass
class PNStructure:
    n: int
    ring: GroupRing
    ranks: dict  # k -> free rank d_k
    D: dict  # k -> d_k × d_{n−k} matrix over Λ
    values: dict  # k -> filtration values of the orthogonal basis of V_k
    S: dict  # k -> dim V_k × d_k matrix over Λ↑
    torsion: dict = field(default_factory=dict)  # k -> list of Λ elements f with summand Λ/(f)
    signs: dict = field(default_factory=dict)  # k -> ±1

    def __post_init__(self):
        up = self.ring.novikov("up")
        self.ranks = {int(k): int(d) for k, d in self.ranks.items()}
        self.D = {int(k): [[self.ring(x) for x in row] for row in m] for k, m in self.D.items()}
        self.S = {int(k): [[up(x) for x in row] for row in m] for k, m in self.S.items()}
        self.values = {int(k): [Fraction(v) for v in vals] for k, vals in self.values.items()}
        self.torsion = {int(k): [self.ring(f) for f in fs] for k, fs in self.torsion.items()}
        self.signs = {int(k): int(s) for k, s in self.signs.items()}

    @property
    def degrees(self) -> list[int]:
        return sorted(k for k, d in self.ranks.items() if d)

    def rank(self, k: int) -> int:
        return self.ranks.get(k, 0)

    def sign(self, k: int) -> int:
        return self.signs.get(k, -1 if (k * (self.n - k)) % 2 else 1)

    def pairing(self, k: int) -> list[list]:
        d, e = self.rank(k), self.rank(self.n - k)
        m = self.D.get(k)
        if m is None:
            return [[self.ring.zero()] * e for _ in range(d)]
        return m

    def space(self, k: int) -> OrthoSpace:
        return OrthoSpace(self.ring.novikov("up"), self.values.get(k, []))

    def with_values(self, values: dict) -> "PNStructure":
        return PNStructure(self.n, self.ring, self.ranks, self.D, values, self.S, self.torsion, self.signs)


@dataclass
class PNDiagnostics:
    status: str
    messages: list = field(default_factory=list)


def validate_pn(N: PNStructure) -> PNDiagnostics:
    """Classify N as weak, strong or invalid, with reasons."""
    ring = N.ring
    up = ring.novikov("up")
    msgs = []
    strong = True
    ks = set(N.ranks) | set(N.D)
    for k in sorted(ks):
        d, e = N.rank(k), N.rank(N.n - k)
        P = N.pairing(k)
        if len(P) != d or any(len(r) != e for r in P):
            msgs.append(f"D_{k} has the wrong shape")
            continue
        Q = N.pairing(N.n - k)
        if len(Q) != e or any(len(r) != d for r in Q):
            continue
        eps = N.sign(k)
        for a in range(d):
            for b in range(e):
                rhs = ring.conj(Q[b][a])
                if P[a][b] != (rhs if eps > 0 else -rhs):
                    msgs.append(f"symmetry fails for D_{k} at generators ({a}, {b})")
        if d != e:
            msgs.append(f"ranks of H_{k} and H_{N.n - k} differ")
            continue
        if d:
            Dd = det_ring(P, ring.zero(), ring.one())
            if not Dd:
                msgs.append(f"D_{k} is singular over the fraction field")
            elif not ring.is_unit(Dd):
                strong = False
    for k in sorted(set(N.ranks) | set(N.values) | set(N.S)):
        d = N.rank(k)
        vals = N.values.get(k, [])
        S = N.S.get(k, [])
        if len(vals) != d or len(S) != d or any(len(r) != d for r in S):
            msgs.append(f"S_{k} is not square of size {d}")
            continue
        if d and not det(S, up.zero(), up.one()):
            msgs.append(f"S_{k} is not an isomorphism after extending coefficients")
    if msgs:
        return PNDiagnostics(INVALID, msgs)
    return PNDiagnostics(STRONG if strong else WEAK, [])


def matched_pair_at_degree(N: PNStructure, k: int) -> FilteredMatchedPair:
    """The pair H_k → (V_k, ρ_k) and H_k → (dual of V_{n−k}, dual values).

    In the dual basis of V_{n−k}, the functional S̃_k x_a has coordinates
    conj(P_k[a,:] · S_{n−k}⁻¹), since (S̃_k x)(S_{n−k} y) = (D_k x)(y).
    """
    diag = validate_pn(N)
    if diag.status == INVALID:
        raise ValueError("invalid Poincaré–Novikov structure: " + "; ".join(diag.messages))
    ring = N.ring
    up, down = ring.novikov("up"), ring.novikov("down")
    d = N.rank(k)
    m = N.n - k
    torsion_dim = sum(ring.quotient_dim(f) for f in N.torsion.get(k, []))
    if d == 0:
        return FilteredMatchedPair(ring, [], OrthoSpace(up, []), [], OrthoSpace(down, []), torsion_dim)
    P = N.pairing(k)
    Sinv = inverse(N.S[m], up.zero(), up.one())
    cols = []
    for a in range(d):
        row = [up(x) for x in P[a]]
        coords = [sum((row[b] * Sinv[b][j] for b in range(d)), up.zero()) for j in range(d)]
        cols.append([up.conj(c) for c in coords])
    Phi_down = [[cols[a][j] for a in range(d)] for j in range(d)]
    return FilteredMatchedPair(
        ring,
        N.S[k],
        N.space(k),
        Phi_down,
        OrthoSpace(down, N.values[m]),
        torsion_dim,
    )


def pn_spectra(N: PNStructure, seed: int | None = None) -> dict[int, list]:
    return {k: basis_spectrum(matched_pair_at_degree(N, k), seed) for k in N.degrees}


def essential_from_spectra(spectra: dict, gamma: TranslationGroup) -> list[Bar]:
    """Closed [a, a+ℓ] in degree k for ℓ ≥ 0; open (a+ℓ, a) in degree k−1 for ℓ < 0."""
    bars = []
    for k, spec in spectra.items():
        for a, ell in spec:
            if ell >= 0:
                bars.append(Bar.make(k, "closed", a, a + ell, gamma))
            else:
                bars.append(Bar.make(k - 1, "open", a + ell, a, gamma))
    return sorted_bars(bars)


def essential_barcode(N: PNStructure, seed: int | None = None) -> list[Bar]:
    return essential_from_spectra(pn_spectra(N, seed), N.ring.gamma)


def pn_gaps(N: PNStructure, seed: int | None = None) -> dict[int, list[Fraction]]:
    return {k: gaps_of_spectrum(s) for k, s in pn_spectra(N, seed).items()}


@dataclass
class DualityReport:
    ok: bool
    status: str
    strict: bool = False
    sums: list = field(default_factory=list)  # (k, i, G_{n−k,i} + G_{k,d_k+1−i})
    messages: list = field(default_factory=list)


def _bar_counts(bars, kind, deg, degenerate):
    out: dict = {}
    for b in bars:
        if b.kind == kind and b.degree == deg and ((b.a == b.b) == degenerate):
            out[(b.a, b.b)] = out.get((b.a, b.b), 0) + 1
    return out


def check_pn_duality(N: PNStructure, seed: int | None = None) -> DualityReport:
    """Closed/open bijection for strong N; the gap inequality in any case."""
    diag = validate_pn(N)
    if diag.status == INVALID:
        return DualityReport(False, INVALID, messages=diag.messages)
    gaps = pn_gaps(N, seed)
    report = DualityReport(True, diag.status)
    ks = sorted(set(N.degrees) | {N.n - k for k in N.degrees})
    for k in ks:
        dk, dm = N.rank(k), N.rank(N.n - k)
        if dk != dm:
            report.ok = False
            report.messages.append(f"d_{k} != d_{N.n - k}")
            continue
        gk, gm = gaps.get(k, []), gaps.get(N.n - k, [])
        for i in range(1, dk + 1):
            s = gm[i - 1] + gk[dk - i]
            report.sums.append((k, i, s))
            if s > 0:
                report.ok = False
                report.messages.append(f"gap inequality fails at k={k}, i={i}: {s}")
            elif s < 0:
                report.strict = True
    if diag.status == STRONG:
        bars = essential_barcode(N, seed)
        degs = {b.degree for b in bars} | {N.n - 1 - b.degree for b in bars} | {N.n - b.degree for b in bars}
        for k in sorted(degs):
            closed = _bar_counts(bars, "closed", k, False)
            opened = _bar_counts(bars, "open", N.n - 1 - k, False)
            if closed != opened:
                report.ok = False
                report.messages.append(f"closed bars in degree {k} do not match open bars in degree {N.n - 1 - k}")
            pts = _bar_counts(bars, "closed", k, True)
            pts2 = _bar_counts(bars, "closed", N.n - k, True)
            if pts != pts2:
                report.ok = False
                report.messages.append(f"degenerate bars in degree {k} do not match degree {N.n - k}")
    return report


# ---------------------------------------------------------------------------
# construction helpers and fixtures


def load_pn(path_or_data) -> PNStructure:
    """Read a structure from a JSON file or an already-parsed dict.

    Matrix entries over Λ are exponent → coefficient maps; entries of S
    may also be {"num": ..., "den": ...} rational functions.
    """
    data = path_or_data
    if not isinstance(data, dict):
        data = json.loads(Path(data).read_text())
    fld = Field.parse(data.get("field", "Q"))
    g = data.get("gamma")
    lam = None if not g else g.get("lambda0")
    ring = GroupRing(fld, TranslationGroup(None if lam is None else Fraction(lam)))
    up = ring.novikov("up")

    def entry(x):
        if isinstance(x, dict) and "num" in x:
            num, den = ring.from_json(x["num"]), ring.from_json(x["den"])
            return up.fraction(_poly(ring, num), _poly(ring, den))
        return ring.from_json(x)

    degs = data["degrees"]
    return PNStructure(
        n=int(data["n"]),
        ring=ring,
        ranks={k: v["rank"] for k, v in degs.items()},
        D={k: [[ring.from_json(x) for x in row] for row in m] for k, m in data.get("D", {}).items()},
        values={k: v.get("values", []) for k, v in degs.items()},
        S={k: [[entry(x) for x in row] for row in v.get("S", [])] for k, v in degs.items()},
        torsion={k: [ring.from_json(f) for f in v.get("torsion", [])] for k, v in degs.items()},
        signs={k: s for k, s in data.get("signs", {}).items()},
    )


def _poly(ring: GroupRing, x):
    if ring.rank:
        return x
    return LaurentPoly.monomial(ring.field, x)


def identity_structure(ring: GroupRing, n: int, k: int = 0, value=0) -> PNStructure:
    """Rank-1 H_k and H_{n−k} (one module if k = n−k) with identity data."""
    ks = {k, n - k}
    one = ring.one()
    return PNStructure(
        n,
        ring,
        {j: 1 for j in ks},
        {j: [[one]] for j in ks},
        {j: [value] for j in ks},
        {j: [[one]] for j in ks},
    )


def multiplication_structure(ring: GroupRing, alpha) -> PNStructure:
    """n = 0, H_0 = Λ, (D_0 λ)(μ) = α·conj(λ)·μ, V_0 = Λ↑ with value 0."""
    return PNStructure(0, ring, {0: 1}, {0: [[ring(alpha)]]}, {0: [0]}, {0: [[ring.one()]]})


def symplectic_form(g: int, ring: GroupRing, pairing: Sequence[tuple[int, int]] | None = None) -> list[list]:
    """Intersection form on H_1 of a genus-g surface.

    ``pairing`` lists the index pairs (a, b) with x_a · x_b = 1 = −x_b · x_a;
    the default is (0,1), (2,3), ...
    """
    n = 2 * g
    pairs = pairing if pairing is not None else [(2 * i, 2 * i + 1) for i in range(g)]
    J = [[ring.zero()] * n for _ in range(n)]
    for a, b in pairs:
        J[a][b] = ring.one()
        J[b][a] = -ring.one()
    return J


def surface_structure(
    ring: GroupRing,
    g: int,
    min_value,
    max_value,
    h1_values: Sequence,
    pairing: Sequence[tuple[int, int]] | None = None,
    S1: Sequence[Sequence] | None = None,
) -> PNStructure:
    """Closed oriented genus-g surface data in formal dimension 2.

    H_0 and H_2 are rank one with the unit pairing, H_1 has rank 2g with
    the symplectic intersection form and V_1 has the given values.
    """
    one = ring.one()
    n = 2 * g
    if S1 is None:
        S1 = [[one if i == j else ring.zero() for j in range(n)] for i in range(n)]
    return PNStructure(
        2,
        ring,
        {0: 1, 1: n, 2: 1},
        {0: [[one]], 1: symplectic_form(g, ring, pairing), 2: [[one]]},
        {0: [min_value], 1: list(h1_values), 2: [max_value]},
        {0: [[one]], 1: S1, 2: [[one]]},
    )


def genus_two_fixtures(ring: GroupRing) -> dict[str, PNStructure]:
    """Two genus-2 structures with the same V-values and different pairings.

    Critical values 0 < 1 < 2 < 3 < 4 < 5. "stacked" pairs 1 with 2 and
    3 with 4; "nested" pairs 1 with 4 and 2 with 3. A unitriangular S_1
    keeps the data from being diagonal in the chosen bases.
    """
    one, z = ring.one(), ring.zero()
    S1 = [[one if i == j else (one if j == i + 1 else z) for j in range(4)] for i in range(4)]
    return {
        "stacked": surface_structure(ring, 2, 0, 5, [1, 2, 3, 4], [(0, 1), (2, 3)], S1),
        "nested": surface_structure(ring, 2, 0, 5, [1, 2, 3, 4], [(0, 3), (1, 2)], S1),
    }
