"""Filtered matched pairs, doubly-orthogonal bases and basis spectra.

A pair is a free Λ-module Λ^d with two maps: Φ↑ into an up space and Φ↓
into a down space, both isomorphisms after extending coefficients. The
main routine finds a Λ-basis whose images are orthogonal on both sides,
first by triangular orthogonalization on each side separately and then
by reducing the labeled basis change matrix between the two bases.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .algebra import (
    INF,
    NEG_INF,
    GroupRing,
    LaurentPoly,
    NovikovField,
    det,
    fraction_str,
    identity,
    inverse,
)
from .linalg_nonarch import FiltVector, OrthoSpace, leads_independent, orthogonalize


# ---------------------------------------------------------------------------
# group ring helpers shared by the rank-0 and rank-1 cases


def ring_terms(ring: GroupRing, f) -> list[tuple[int, object]]:
    if ring.rank:
        return list(f.terms())
    return [(0, f)] if f else []


def ring_from_terms(ring: GroupRing, terms: dict):
    if ring.rank:
        return LaurentPoly.from_dict(ring.field, terms)
    return ring.field(terms.get(0, 0))


def exp_value(ring: GroupRing, m: int) -> Fraction:
    return ring.gamma.value(m) if ring.rank else Fraction(0)


def nu_up(ring: GroupRing, f):
    t = ring_terms(ring, f)
    return exp_value(ring, min(m for m, _ in t)) if t else INF


def nu_down(ring: GroupRing, f):
    t = ring_terms(ring, f)
    return exp_value(ring, max(m for m, _ in t)) if t else NEG_INF


def embed_column(dom: NovikovField, vec: Sequence) -> list:
    return [dom(x) for x in vec]


def apply_map(dom: NovikovField, Phi: Sequence[Sequence], vec: Sequence) -> list:
    """Φ applied to a Λ-vector (coordinates in the free module)."""
    rows = len(Phi)
    out = [dom.zero()] * rows
    for j, c in enumerate(vec):
        if not c:
            continue
        cj = dom(c)
        for i in range(rows):
            x = Phi[i][j]
            if x:
                out[i] = out[i] + cj * x
    return out


def _lambda_matmul(ring: GroupRing, A, B):
    zero = ring.zero()
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    out = [[zero] * p for _ in range(n)]
    for i in range(n):
        for k in range(m):
            a = A[i][k]
            if not a:
                continue
            for j in range(p):
                b = B[k][j]
                if b:
                    out[i][j] = out[i][j] + a * b
    return out


# ---------------------------------------------------------------------------
# the pair


class FilteredMatchedPair:
    """Free part of a filtered matched pair, with torsion carried as a dimension."""

    def __init__(
        self,
        ring: GroupRing,
        Phi_up: Sequence[Sequence],
        up_space: OrthoSpace,
        Phi_down: Sequence[Sequence],
        down_space: OrthoSpace,
        torsion_dim: int = 0,
        check: bool = True,
    ):
        if not up_space.up or down_space.up:
            raise ValueError("expected an up space and a down space")
        self.ring = ring
        self.up_space = up_space
        self.down_space = down_space
        self.up = up_space.domain
        self.down = down_space.domain
        self.Phi_up = [[self.up(x) for x in row] for row in Phi_up]
        self.Phi_down = [[self.down(x) for x in row] for row in Phi_down]
        self.torsion_dim = torsion_dim
        self.rank = up_space.dim
        if check:
            self.validate()

    def validate(self):
        d = self.rank
        if self.down_space.dim != d:
            raise ValueError("degenerate pair: the two spaces have different dimensions")
        for mat, name in ((self.Phi_up, "up"), (self.Phi_down, "down")):
            if len(mat) != d or any(len(r) != d for r in mat):
                raise ValueError(f"degenerate pair: Φ{name} is not square of size {d}")
        if d:
            if not det(self.Phi_up, self.up.zero(), self.up.one()):
                raise ValueError("degenerate pair: Φ↑ is singular")
            if not det(self.Phi_down, self.down.zero(), self.down.one()):
                raise ValueError("degenerate pair: Φ↓ is singular")

    def up_vector(self, vec) -> FiltVector:
        return FiltVector(self.up_space, apply_map(self.up, self.Phi_up, vec))

    def down_vector(self, vec) -> FiltVector:
        return FiltVector(self.down_space, apply_map(self.down, self.Phi_down, vec))

    def rho_up(self, vec):
        return self.up_vector(vec).rho()

    def rho_down(self, vec):
        return self.down_vector(vec).rho()

    def rebase(self, G: Sequence[Sequence]) -> "FilteredMatchedPair":
        """The same pair described in the Λ-basis given by the columns of G."""
        d = self.rank
        cols = [[G[i][j] for i in range(d)] for j in range(d)]
        up = [apply_map(self.up, self.Phi_up, c) for c in cols]
        dn = [apply_map(self.down, self.Phi_down, c) for c in cols]
        return FilteredMatchedPair(
            self.ring,
            [[up[j][i] for j in range(d)] for i in range(d)],
            self.up_space,
            [[dn[j][i] for j in range(d)] for i in range(d)],
            self.down_space,
            self.torsion_dim,
            check=False,
        )

    def with_values(self, up_values, down_values) -> "FilteredMatchedPair":
        """Same maps, new filtration values on the target bases."""
        return FilteredMatchedPair(
            self.ring,
            self.Phi_up,
            OrthoSpace(self.up, up_values),
            self.Phi_down,
            OrthoSpace(self.down, down_values),
            self.torsion_dim,
            check=False,
        )

    def direct_sum(self, other: "FilteredMatchedPair") -> "FilteredMatchedPair":
        def block(a, b, dom):
            z = dom.zero()
            n, m = len(a), len(b)
            return [list(a[i]) + [z] * m for i in range(n)] + [[z] * n + list(b[i]) for i in range(m)]

        return FilteredMatchedPair(
            self.ring,
            block(self.Phi_up, other.Phi_up, self.up),
            OrthoSpace(self.up, self.up_space.values + other.up_space.values),
            block(self.Phi_down, other.Phi_down, self.down),
            OrthoSpace(self.down, self.down_space.values + other.down_space.values),
            self.torsion_dim + other.torsion_dim,
            check=False,
        )


def standard_pair(ring: GroupRing, up_values, down_values) -> FilteredMatchedPair:
    """Direct sum of the elementary pairs with identity maps."""
    up, down = ring.novikov("up"), ring.novikov("down")
    d = len(up_values)
    return FilteredMatchedPair(
        ring,
        identity(d, up.zero(), up.one()),
        OrthoSpace(up, up_values),
        identity(d, down.zero(), down.one()),
        OrthoSpace(down, down_values),
    )


# ---------------------------------------------------------------------------
# labeled basis change matrices


@dataclass
class LabeledBCM:
    """Unitriangular M with x_j = Σ_i M_ij y_i, ξ_i = ρ↑(Φ↑x_i), η_j = ρ↓(Φ↓y_j)."""

    M: list
    xi: list
    eta: list

    @property
    def size(self) -> int:
        return len(self.xi)

    def copy(self) -> "LabeledBCM":
        return LabeledBCM([list(r) for r in self.M], list(self.xi), list(self.eta))

    def is_identity(self, ring: GroupRing) -> bool:
        return all(
            (self.M[i][j] == ring.one()) if i == j else not self.M[i][j]
            for i in range(self.size)
            for j in range(self.size)
        )


def misalignment(L: LabeledBCM) -> Fraction:
    diffs = [e - x for e, x in zip(L.eta, L.xi)]
    total = Fraction(0)
    for i in range(len(diffs)):
        for j in range(i + 1, len(diffs)):
            total += abs(diffs[i] - diffs[j])
    return total


def triconstruct(P: FilteredMatchedPair):
    """Bases x, y of Λ^d with Φ↑x and Φ↓y orthogonal and M unitriangular.

    Returns (x, y, LabeledBCM) with x and y as lists of coordinate vectors.
    """
    ring, d = P.ring, P.rank
    zero, one = ring.zero(), ring.one()
    if d == 0:
        return [], [], LabeledBCM([], [], [])
    # down side: orthogonalize Φ↓f in order and land the coefficients in Λ
    fvecs = [P.down_vector([one if i == j else zero for i in range(d)]) for j in range(d)]
    try:
        vs, mu = orthogonalize(fvecs)
    except ValueError as exc:
        raise ValueError("degenerate pair") from exc
    a0 = max(v.rho() for v in vs)
    d0 = min(f.rho() for f in fvecs) - a0
    ys = []
    for i in range(d):
        y = [zero] * d
        y[i] = one
        for j in range(i):
            if mu[i][j]:
                y[j] = _to_ring(ring, P.down.truncate_hat(mu[i][j], d0))
        ys.append(y)
    # up side: orthogonalize Φ↑y in order
    yvecs = [P.up_vector(y) for y in ys]
    try:
        ws, lam = orthogonalize(yvecs)
    except ValueError as exc:
        raise ValueError("degenerate pair") from exc
    d1 = max(v.rho() for v in yvecs) - min(w.rho() for w in ws)
    lam_hat = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(i):
            if lam[i][j]:
                lam_hat[i][j] = _to_ring(ring, P.up.truncate_hat(lam[i][j], d1))
    xs = []
    for i in range(d):
        x = list(ys[i])
        for j in range(i):
            c = lam_hat[i][j]
            if c:
                x = [a + c * b if b else a for a, b in zip(x, ys[j])]
        xs.append(x)
    M = [[zero] * d for _ in range(d)]
    for j in range(d):
        M[j][j] = one
        for i in range(j):
            M[i][j] = lam_hat[j][i]
    xi = [P.rho_up(x) for x in xs]
    eta = [P.rho_down(y) for y in ys]
    return xs, ys, LabeledBCM(M, xi, eta)


def _to_ring(ring: GroupRing, x):
    if ring.rank:
        return x
    return ring.field(x)


# ---------------------------------------------------------------------------
# the reduction to the identity


class _Reducer:
    def __init__(self, ring: GroupRing, L: LabeledBCM, x: list, y: list, exact_z: bool = False):
        self.ring = ring
        self.exact_z = exact_z
        self.M = [list(r) for r in L.M]
        self.xi = list(L.xi)
        self.eta = list(L.eta)
        self.x = [list(v) for v in x]
        self.y = [list(v) for v in y]
        self.d = len(self.xi)
        self.log: list[dict] = []

    # operations (A1)-(A5); each keeps x_j = Σ_i M_ij y_i

    def a1(self, i, j):
        M = self.M
        M[i], M[j] = M[j], M[i]
        self.eta[i], self.eta[j] = self.eta[j], self.eta[i]
        self.y[i], self.y[j] = self.y[j], self.y[i]
        self.log.append({"op": "A1", "i": i, "j": j})

    def a2(self, j, m):
        """Multiply column j (and x_j) by T^m."""
        ring = self.ring
        u = ring.monomial(1, m)
        for r in range(self.d):
            if self.M[r][j]:
                self.M[r][j] = self.M[r][j] * u
        self.x[j] = [c * u if c else c for c in self.x[j]]
        self.xi[j] -= exp_value(ring, m)
        self.log.append({"op": "A2", "j": j, "unit": u})

    def a3(self, i, j, mu):
        """Row i −= μ·row j, i.e. y_j += μ·y_i."""
        assert nu_down(self.ring, mu) <= self.eta[i] - self.eta[j], "A3 side condition"
        Mi, Mj = self.M[i], self.M[j]
        self.M[i] = [a - mu * b if b else a for a, b in zip(Mi, Mj)]
        self.y[j] = [a + mu * b if b else a for a, b in zip(self.y[j], self.y[i])]
        self.log.append({"op": "A3", "i": i, "j": j, "mu": mu})

    def a4(self, i, j, mu):
        """Column j += μ·column i, i.e. x_j += μ·x_i."""
        assert nu_up(self.ring, mu) >= self.xi[i] - self.xi[j], "A4 side condition"
        for r in range(self.d):
            if self.M[r][i]:
                self.M[r][j] = self.M[r][j] + mu * self.M[r][i]
        self.x[j] = [a + mu * b if b else a for a, b in zip(self.x[j], self.x[i])]
        self.log.append({"op": "A4", "i": i, "j": j, "mu": mu})

    def a5(self, i, j, di, mu, lam, dj):
        ring = self.ring
        assert nu_up(ring, di) == 0 and nu_up(ring, dj) == 0, "A5 diagonal condition"
        assert nu_up(ring, lam) > self.xi[j] - self.xi[i], "A5 lower condition"
        assert nu_up(ring, mu) >= self.xi[i] - self.xi[j], "A5 upper condition"
        assert ring.is_unit(di * dj - mu * lam), "A5 determinant condition"
        for r in range(self.d):
            a, b = self.M[r][i], self.M[r][j]
            if a or b:
                self.M[r][i] = a * di + b * lam
                self.M[r][j] = a * mu + b * dj
        xi_, xj_ = self.x[i], self.x[j]
        self.x[i] = [di * a + lam * b for a, b in zip(xi_, xj_)]
        self.x[j] = [mu * a + dj * b for a, b in zip(xi_, xj_)]
        self.log.append({"op": "A5", "i": i, "j": j, "d_i": di, "mu": mu, "lambda": lam, "d_j": dj})

    # the recursion

    def reduce_block(self, lo: int):
        if lo >= self.d - 1:
            return
        self.reduce_block(lo + 1)
        ring = self.ring
        k = lo + 1
        while k < self.d:
            f = self.M[lo][k]
            if not f:
                k += 1
                continue
            low = self.eta[lo] - self.eta[k]
            high = self.xi[lo] - self.xi[k]
            minus, plus, mid = {}, {}, {}
            for m, a in ring_terms(ring, f):
                g = exp_value(ring, m)
                if g <= low:
                    minus[m] = a
                elif g >= high:
                    plus[m] = a
                else:
                    mid[m] = a
            if minus:
                self.a3(lo, k, ring_from_terms(ring, minus))
            if plus:
                self.a4(lo, k, -ring_from_terms(ring, plus))
            if not mid:
                k += 1
                continue
            self._compress(lo, k, mid)
            self.reduce_block(k)

    def _compress(self, lo: int, k: int, mid: dict):
        """Swap the η labels of rows lo and k through (A5), (A1), (A2)."""
        ring = self.ring
        one = ring.one()
        m0 = min(mid)
        a = mid[m0]
        g = exp_value(ring, m0)
        # f₀ = a T^g (1 − r) with ν↑(r) > 0
        r = ring_from_terms(ring, {m - m0: -c / a for m, c in mid.items() if m != m0})
        bound = self.xi[lo] - self.xi[k] - g
        if r:
            nr = nu_up(ring, r)
            n_pow = max(0, math.floor(bound / nr))
            while (n_pow + 1) * nr <= bound:
                n_pow += 1
        else:
            n_pow = 0
        t_g = ring.monomial(1, m0)
        a_inv = ring.field.one / a
        if self.exact_z or not ring.rank:
            geo, power = one, one
            for _ in range(n_pow):
                power = power * r
                geo = geo + power
            mu = t_g * power * r
        else:
            # geometric sum 1 + r + ... + r^N cut above the bound; the cut
            # terms only enter μ, whose valuation stays above the bound
            top = math.floor(bound / ring.gamma.lambda0)
            geo, power = one, one
            for _ in range(n_pow):
                power = _cut_above(power * r, top)
                geo = geo + power
            mu = t_g * (one - (one - r) * geo)
        di = (one - r) * (-a)
        lam = ring.monomial(1, -m0)
        dj = geo * a_inv
        self.a5(lo, k, di, mu, lam, dj)
        self.a1(lo, k)
        self.a2(lo, m0)
        self.a2(k, -m0)


def _cut_above(p: LaurentPoly, top: int) -> LaurentPoly:
    if not p or p.high <= top:
        return p
    return LaurentPoly.from_dict(p.field, {m: c for m, c in p.terms() if m <= top})


def reduce_lbcm(L: LabeledBCM, x: list, y: list, ring: GroupRing, exact_z: bool = False):
    """Reduce M to the identity by operations (A1)-(A5).

    Returns (final LabeledBCM, common basis e, operation log).
    """
    red = _Reducer(ring, L, x, y, exact_z)
    red.reduce_block(0)
    final = LabeledBCM(red.M, red.xi, red.eta)
    if not final.is_identity(ring):
        raise AssertionError("reduction did not reach the identity")
    if red.x != red.y:
        raise AssertionError("x and y bases disagree after reduction")
    return final, red.x, red.log


def replay_log(L: LabeledBCM, log: Sequence[dict], ring: GroupRing) -> tuple[LabeledBCM, list]:
    """Apply a logged operation sequence to L.

    Returns the result and the misalignment at every state where M is
    unitriangular (misalignment is only defined there).
    """
    d = L.size
    dummy = [[ring.zero()] * d for _ in range(d)]
    red = _Reducer(ring, L, dummy, [list(r) for r in dummy])
    mis = [misalignment(L)]
    for op in log:
        kind = op["op"]
        if kind == "A1":
            red.a1(op["i"], op["j"])
        elif kind == "A2":
            u = op["unit"]
            m = u.low if ring.rank else 0
            red.a2(op["j"], m)
        elif kind == "A3":
            red.a3(op["i"], op["j"], op["mu"])
        elif kind == "A4":
            red.a4(op["i"], op["j"], op["mu"])
        elif kind == "A5":
            red.a5(op["i"], op["j"], op["d_i"], op["mu"], op["lambda"], op["d_j"])
        if _unitriangular(red.M, ring):
            mis.append(misalignment(LabeledBCM(red.M, red.xi, red.eta)))
    return LabeledBCM(red.M, red.xi, red.eta), mis


def _unitriangular(M, ring: GroupRing) -> bool:
    d = len(M)
    return all(M[i][i] == ring.one() and not any(M[i][j] for j in range(i)) for i in range(d))


def log_records(log: Sequence[dict], ring: GroupRing) -> list[dict]:
    out = []
    for op in log:
        rec = {}
        for key, val in op.items():
            if key in ("op", "i", "j"):
                rec[key] = val
            else:
                rec[key] = ring.to_json(val)
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# doubly-orthogonal bases and spectra


@dataclass
class DoublyOrthogonalBasis:
    basis: list
    up_values: list
    down_values: list
    log: list = field(default_factory=list)
    initial: LabeledBCM | None = None


def random_unimodular(ring: GroupRing, d: int, rng: random.Random, spread: int = 1, density: float = 0.5):
    """Random unitriangular Λ-matrix times unit scalings, columns shuffled.

    Coefficients are small integers so that exact arithmetic stays cheap.
    """
    G = identity(d, ring.zero(), ring.one())
    for i in range(d):
        for j in range(i + 1, d):
            if rng.random() < density:
                G[i][j] = _random_ring(ring, rng, spread)
    # 2 vanishes in characteristic 2, so drop zero scalings
    scales = [c for c in (1, -1, 2) if ring.field(c)]
    for j in range(d):
        u = ring.monomial(rng.choice(scales), rng.randint(-spread, spread) if ring.rank else 0)
        for r in range(d):
            if G[r][j]:
                G[r][j] = G[r][j] * u
    order = list(range(d))
    rng.shuffle(order)
    return [[row[j] for j in order] for row in G]


def _random_ring(ring: GroupRing, rng: random.Random, spread: int):
    if ring.rank:
        terms = {m: rng.choice([1, -1, 2]) for m in range(-spread, spread + 1) if rng.random() < 0.5}
        return LaurentPoly.from_dict(ring.field, terms)
    return ring.field(rng.choice([1, -1, 2, 0]))


def doubly_orthogonal_basis(P: FilteredMatchedPair, seed: int | None = None) -> DoublyOrthogonalBasis:
    """Λ-basis e of the free module with Φ↑e and Φ↓e both orthogonal.

    A seed starts the construction from a random Λ-basis instead of the
    standard one; the resulting spectrum does not depend on it.
    """
    ring, d = P.ring, P.rank
    G = None
    Q = P
    if seed is not None and d:
        G = random_unimodular(ring, d, random.Random(seed))
        Q = P.rebase(G)
    xs, ys, L = triconstruct(Q)
    final, e, log = reduce_lbcm(L, xs, ys, ring)
    if G is not None:
        e = [_lambda_matvec(ring, G, v) for v in e]
    up_vals = [P.rho_up(v) for v in e]
    down_vals = [P.rho_down(v) for v in e]
    if up_vals != final.xi or down_vals != final.eta:
        raise AssertionError("labels disagree with the recomputed filtration values")
    return DoublyOrthogonalBasis(e, up_vals, down_vals, log, L)


def _lambda_matvec(ring: GroupRing, G, v):
    return [row[0] for row in _lambda_matmul(ring, G, [[c] for c in v])]


def is_doubly_orthogonal(P: FilteredMatchedPair, basis: Sequence[Sequence]) -> bool:
    """Fast graded check of both orthogonality conditions."""
    ups = [apply_map(P.up, P.Phi_up, v) for v in basis]
    downs = [apply_map(P.down, P.Phi_down, v) for v in basis]
    return leads_independent(P.up_space, ups) and leads_independent(P.down_space, downs)


def spectrum_from_values(gamma, up_values, down_values) -> list[tuple[Fraction, Fraction]]:
    return sorted((gamma.normalize(a), b - a) for a, b in zip(up_values, down_values))


def basis_spectrum(P: FilteredMatchedPair, seed: int | None = None) -> list[tuple[Fraction, Fraction]]:
    """Sorted multiset of ([ρ↑] mod Γ, ρ↓ − ρ↑) over a doubly-orthogonal basis."""
    B = doubly_orthogonal_basis(P, seed)
    return spectrum_from_values(P.ring.gamma, B.up_values, B.down_values)


def gaps(P: FilteredMatchedPair, seed: int | None = None) -> list[Fraction]:
    return gaps_of_spectrum(basis_spectrum(P, seed))


def gaps_of_spectrum(spec) -> list[Fraction]:
    return sorted((ell for _, ell in spec), reverse=True)


def spectrum_records(spec) -> list[dict]:
    counts: dict = {}
    for item in spec:
        counts[item] = counts.get(item, 0) + 1
    return [
        {"a": fraction_str(a), "ell": fraction_str(ell), "multiplicity": n}
        for (a, ell), n in sorted(counts.items())
    ]


def dual_pair(P: FilteredMatchedPair) -> FilteredMatchedPair:
    """The dual pair on the dual free module.

    Up leg: dual of V↓ with its values, map conj(Φ↓⁻¹)ᵀ.
    Down leg: dual of V↑ with its values, map conj(Φ↑⁻¹)ᵀ.
    """
    d = P.rank
    if d == 0:
        return P
    inv_down = inverse(P.Phi_down, P.down.zero(), P.down.one())
    inv_up = inverse(P.Phi_up, P.up.zero(), P.up.one())
    new_up = [[P.down.conj(inv_down[j][i]) for j in range(d)] for i in range(d)]
    new_down = [[P.up.conj(inv_up[j][i]) for j in range(d)] for i in range(d)]
    return FilteredMatchedPair(
        P.ring,
        new_up,
        OrthoSpace(P.up, P.down_space.values),
        new_down,
        OrthoSpace(P.down, P.up_space.values),
        P.torsion_dim,
    )


# ---------------------------------------------------------------------------
# matchings


def admissible(gamma, s: tuple, s2: tuple, t) -> bool:
    """Is there g ∈ Γ with |g + â − a| ≤ t and |g + â + ℓ̂ − a − ℓ| ≤ t?"""
    a, ell = s
    ah, ellh = s2
    t = Fraction(t)
    lo = max(a - ah - t, a + ell - ah - ellh - t)
    hi = min(a - ah + t, a + ell - ah - ellh + t)
    return gamma.count_in(lo, hi) > 0


def check_strong_matching(S, S2, t, gamma):
    """Decide whether a strong t-matching exists; returns (ok, matching)."""
    S, S2 = list(S), list(S2)
    if len(S) != len(S2):
        return False, None
    n = len(S)
    if n == 0:
        return True, []
    rows, cols = [], []
    for i, s in enumerate(S):
        for j, s2 in enumerate(S2):
            if admissible(gamma, s, s2, t):
                rows.append(i)
                cols.append(j)
    if not rows:
        return False, None
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if (match < 0).any():
        return False, None
    return True, [(i, int(match[i])) for i in range(n)]


# ---------------------------------------------------------------------------
# planted instances and perturbations


def planted_pair(ring: GroupRing, rng: random.Random, max_blocks: int = 6, bound: int = 12):
    """A scrambled direct sum of elementary pairs and its planted spectrum."""
    d = rng.randint(1, max_blocks)
    ups = [Fraction(rng.randint(-bound, bound), rng.randint(1, 4)) for _ in range(d)]
    downs = [Fraction(rng.randint(-bound, bound), rng.randint(1, 4)) for _ in range(d)]
    P = standard_pair(ring, ups, downs).rebase(random_unimodular(ring, d, rng))
    return P, spectrum_from_values(ring.gamma, ups, downs)


def jitter(values: Sequence, eps, rng: random.Random, steps: int = 1000) -> list[Fraction]:
    """Each value moved by a seeded rational amount in [−ε, ε]."""
    eps = Fraction(eps)
    return [Fraction(v) + eps * Fraction(rng.randint(-steps, steps), steps) for v in values]


@dataclass
class TrialResult:
    ok: bool
    eps: Fraction
    spectrum: list
    perturbed: list
    gap_drift: Fraction
    matched: bool

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "eps": fraction_str(self.eps),
            "matched": self.matched,
            "gap_drift": fraction_str(self.gap_drift),
            "spectrum": spectrum_records(self.spectrum),
            "perturbed": spectrum_records(self.perturbed),
        }


def compare_spectra(S, S2, eps, gamma) -> TrialResult:
    """Strong ε-matching and the 2ε bound on gap drift."""
    eps = Fraction(eps)
    g1, g2 = gaps_of_spectrum(S), gaps_of_spectrum(S2)
    drift = max((abs(x - y) for x, y in zip(g1, g2)), default=Fraction(0))
    if len(g1) != len(g2):
        drift = Fraction(-1)
    matched, _ = check_strong_matching(S, S2, eps, gamma)
    ok = matched and 0 <= drift <= 2 * eps
    return TrialResult(ok, eps, list(S), list(S2), drift, matched)


def perturbation_trial(P: FilteredMatchedPair, eps, rng: random.Random, spectrum=None) -> TrialResult:
    """Move every basis filtration value by at most ε and compare spectra."""
    S = basis_spectrum(P) if spectrum is None else spectrum
    Q = P.with_values(jitter(P.up_space.values, eps, rng), jitter(P.down_space.values, eps, rng))
    return compare_spectra(S, basis_spectrum(Q), eps, P.ring.gamma)
