"""Test-side brute-force oracles, independent of the package's linear algebra."""

from fractions import Fraction

import sympy

from interlevel.pl_geometry import SimplicialComplex, cut_at_level


def _boundary(faces, cells):
    idx = {s: i for i, s in enumerate(faces)}
    M = sympy.zeros(len(faces), len(cells))
    for j, s in enumerate(cells):
        for i in range(len(s)):
            M[idx[s[:i] + s[i + 1:]], j] = -1 if i % 2 else 1
    return M


def _rank(M):
    return M.rank() if M.rows and M.cols else 0


def window_complex(X, values, a, b):
    keep = [s for s in X.simplices if all(a <= values[v] <= b for v in s)]
    return SimplicialComplex(keep)


def inclusion_rank(X, theta, small, big, k):
    """rank of H_k(f⁻¹[small]) → H_k(f⁻¹[big]) over ℚ for a real-valued PL f."""
    Y, vals = X, dict(theta)
    for c in sorted(set(small) | set(big)):
        Y, vals = cut_at_level(Y, vals, c)
    A = window_complex(Y, vals, *small)
    B = window_complex(Y, vals, *big)
    Bk, Bk1 = B.of_dim(k), B.of_dim(k + 1)
    Ak = A.of_dim(k)
    if not Ak:
        return 0
    dA = _boundary(A.of_dim(k - 1), Ak) if k else sympy.zeros(0, len(Ak))
    cycles = dA.nullspace() if dA.rows else [sympy.eye(len(Ak))[:, i] for i in range(len(Ak))]
    if not cycles:
        return 0
    pos = {s: i for i, s in enumerate(Bk)}
    Z = sympy.zeros(len(Bk), len(cycles))
    for j, z in enumerate(cycles):
        for i, s in enumerate(Ak):
            Z[pos[s], j] = z[i]
    dB = _boundary(Bk, Bk1) if Bk1 else sympy.zeros(len(Bk), 0)
    return _rank(dB.row_join(Z)) - _rank(dB)


def betti_sympy(X, k):
    ck = X.of_dim(k)
    if not ck:
        return 0
    dk = _rank(_boundary(X.of_dim(k - 1), ck)) if k else 0
    ck1 = X.of_dim(k + 1)
    dk1 = _rank(_boundary(ck, ck1)) if ck1 else 0
    return len(ck) - dk - dk1


def closed_form_hk(kind, params, s, t, lam=None, k=None):
    """dim of ℍ_k(s, t) for one elementary block, by enumerating translates.

    PE↑(a, L): classes of the sublevel at t born at a+g, dying at a+L+g.
    PE↓(b, L): the superlevel at −s, born at b+g, dying at b−L+g.
    PM(a, b) in degree k: both windows ends beyond the endpoints.
    PM(a, b) in degree k−1: the window strictly inside (b, a).
    PR(spans) in degree k: Λ/(f) has dimension span(f) everywhere.
    """
    s, t = Fraction(s), Fraction(t)
    if kind == "PR":
        return sum(params) if k == 0 else 0
    gs = [Fraction(0)] if lam is None else [Fraction(lam) * m for m in range(-60, 61)]
    total = 0
    for g in gs:
        if kind == "PEup":
            a, L = params
            total += a + g <= t < a + L + g
        elif kind == "PEdown":
            b, L = params
            total += b - L + g < -s <= b + g
        elif kind == "PM":
            a, b = params
            if k == 0:
                total += t >= a + g and -s <= b + g
            else:
                total += t < a + g and -s > b + g
    return total


def sparse_rank(columns, p=None):
    """Rank of a matrix given as a list of {row: entry} columns, over ℚ or GF(p)."""
    pivots = {}
    r = 0
    for col in columns:
        v = {i: (x % p if p else Fraction(x)) for i, x in col.items()}
        v = {i: x for i, x in v.items() if x}
        while v:
            top = max(v)
            if top not in pivots:
                pivots[top] = v
                r += 1
                break
            w = pivots[top]
            c = v[top] * pow(w[top], -1, p) % p if p else v[top] / w[top]
            for i, x in w.items():
                y = v.get(i, 0) - c * x
                y = y % p if p else y
                if y:
                    v[i] = y
                else:
                    v.pop(i, None)
    return r


def homology_dims(simplices, top, p=None):
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    index = {d: {s: i for i, s in enumerate(sorted(c))} for d, c in by_dim.items()}
    ranks = {}
    for d in range(1, top + 2):
        cols = []
        for s in index.get(d, {}):
            cols.append({index[d - 1][s[:i] + s[i + 1:]]: (-1) ** i for i in range(len(s))})
        ranks[d] = sparse_rank(cols, p)
    return [len(index.get(k, {})) - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(top + 1)]


def cover_window(X, f, lo, hi):
    """Lifts to the cover of every simplex meeting [lo, hi], with all their faces."""
    lam = f.gamma.lambda0
    cells = set()
    for s in X.simplices:
        v0 = min(s)
        offs = {w: f.winding(v0, w) for w in s}
        vals = [f.theta[w] + lam * offs[w] for w in s]
        j = int((lo - max(vals)) // lam) - 1
        while min(vals) + lam * j <= hi:
            if max(vals) + lam * j >= lo:
                cells.add(tuple(sorted((w, offs[w] + j) for w in s)))
            j += 1
    verts = sorted({x for c in cells for x in c})
    ids = {x: i for i, x in enumerate(verts)}
    values = {ids[(w, m)]: f.theta[w] + lam * m for w, m in verts}
    return SimplicialComplex.from_maximal([tuple(ids[x] for x in c) for c in cells]), values


def interlevel_oracle(X, f, a, b, p=None):
    """dim H_k of the preimage of [a, b] in the cover, k = 0..dim X."""
    Y, vals = cover_window(X, f, a, b)
    Y, vals = cut_at_level(Y, vals, a)
    Y, vals = cut_at_level(Y, vals, b)
    keep = [s for s in Y.simplices if all(a <= vals[v] <= b for v in s)]
    return homology_dims(keep, X.dimension, p)
