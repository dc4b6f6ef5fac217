"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from .algebra import Field, GroupRing, TranslationGroup, fraction_str
from .chain_level import (
    ChainLevelFMP,
    block_decomposition,
    declared_summands,
    full_barcode,
    hk_cone_direct,
    hk_dim,
    homology_fmp,
    load_blocks,
    spectra,
)
from .linalg_nonarch import Bar, barcode_records, concise_barcode
from .matched_pair import basis_spectrum, perturbation_trial, planted_pair
from .pl_geometry import (
    PLInput,
    chain_level_fmp,
    extended_persistence,
    interlevel_homology,
    is_regular,
    load_pl,
    validate,
)
from .pn_structure import (
    PNStructure,
    check_pn_duality,
    essential_barcode,
    load_pn,
    matched_pair_at_degree,
    validate_pn,
)

SCHEMA_VERSION = 1
OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input


@dataclass
class Loaded:
    kind: str  # "pl", "blocks" or "pn"
    name: str
    field: str
    gamma: TranslationGroup
    pl: PLInput | None = None
    chain: ChainLevelFMP | None = None
    pn: PNStructure | None = None
    items: list | None = None


def input_kind(data: dict) -> str:
    if "type" in data:
        return data["type"]
    if "blocks" in data:
        return "blocks"
    if "degrees" in data:
        return "pn"
    return "pl"


def load_input(path: str, field_spec: str | None = None) -> Loaded:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    if field_spec:
        data["field"] = field_spec
    kind = input_kind(data)
    name = data.get("name") or Path(path).stem
    try:
        Field.parse(data.get("field", "Q"))
        if kind == "pl":
            pl = load_pl(data)
            return Loaded(kind, name, pl.field, pl.f.gamma, pl=pl)
        if kind == "blocks":
            cp = load_blocks(data)
            return Loaded(kind, name, data.get("field", "Q"), cp.gamma, chain=cp, items=data.get("blocks", []))
        if kind == "pn":
            N = load_pn(data)
            return Loaded(kind, name, data.get("field", "Q"), N.ring.gamma, pn=N)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"malformed {kind} input: {exc}") from exc
    raise InputError(f"unknown input type {kind!r}")


def chain_of(inp: Loaded) -> ChainLevelFMP:
    if inp.chain is not None:
        return inp.chain
    if inp.kind != "pl":
        raise InputError("this command needs a PL or block input")
    diag = validate(inp.pl.X, inp.pl.f)
    if not diag.valid:
        raise InputError("invalid PL input: " + "; ".join(diag.errors))
    inp.chain = chain_level_fmp(inp.pl.X, inp.pl.f, inp.field)
    return inp.chain


def parse_range(text: str) -> list[Fraction]:
    try:
        lo, hi, step = (Fraction(x) for x in text.split(":"))
    except ValueError as exc:
        raise InputError(f"bad range {text!r}; expected min:max:step") from exc
    if step <= 0 or hi < lo:
        raise InputError(f"bad range {text!r}; need min ≤ max and step > 0")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def parse_grid(text: str) -> tuple[list[Fraction], list[Fraction]]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError("grid must look like smin:smax:step,tmin:tmax:step")
    return parse_range(parts[0]), parse_range(parts[1])


def default_grid(inp: Loaded) -> tuple[list[Fraction], list[Fraction]]:
    """Six window ends spread over the value range, nudged off the vertex values."""
    if inp.kind == "pl" and inp.pl.f.theta:
        vals = list(inp.pl.f.theta.values())
        lo, hi = min(vals), max(vals)
    else:
        lo, hi = Fraction(-1), Fraction(3)
    if inp.gamma.rank:
        hi = max(hi, lo + 2 * inp.gamma.lambda0)
    lo, hi = lo - Fraction(1, 2), hi + Fraction(1, 2)
    ends = [lo + (hi - lo) * i / 5 + Fraction(1, 997) for i in range(6)]
    return [-e for e in ends], ends


# ---------------------------------------------------------------------------
# output


def emit(record: dict, fmt: str, text_lines=None, svg=None):
    record = {"schema_version": SCHEMA_VERSION, **record}
    if fmt == "json":
        click.echo(json.dumps(record, indent=2, ensure_ascii=False))
    elif fmt == "svg" and svg is not None:
        click.echo(svg)
    else:
        for line in text_lines if text_lines is not None else [json.dumps(record, ensure_ascii=False)]:
            click.echo(line)


def fail_input(message: str, fmt: str = "json"):
    rec = {"schema_version": SCHEMA_VERSION, "error": {"type": "input", "message": message}}
    click.echo(json.dumps(rec, ensure_ascii=False) if fmt == "json" else f"error: {message}")
    sys.exit(BAD_INPUT)


def render_svg(bars: list[Bar], torsion: dict, gamma: TranslationGroup, title: str) -> str:
    """Bars stacked by degree; closed endpoints filled, open endpoints hollow."""
    finite = [x for b in bars for x in (b.a, b.b) if x is not None]
    lo = min(finite, default=Fraction(0))
    hi = max(finite, default=Fraction(1))
    if hi == lo:
        hi = lo + 1
    pad = (hi - lo) / 10
    lo, hi = lo - pad, hi + pad
    width, left, row = 640, 60, 18
    scale = lambda x: left + float((x - lo) / (hi - lo)) * (width - left - 20)
    lines, y = [], 40
    for k in sorted({b.degree for b in bars}):
        lines.append(f'<text x="8" y="{y + 4}" font-size="12">H{k}</text>')
        for b in [b for b in bars if b.degree == k]:
            x1 = scale(b.a) if b.a is not None else left
            x2 = scale(b.b) if b.b is not None else width - 20
            lines.append(f'<line x1="{x1:.1f}" y1="{y}" x2="{x2:.1f}" y2="{y}" stroke="black" stroke-width="2"/>')
            closed_left = b.kind in ("half_up", "inf_up", "closed")
            closed_right = b.kind in ("half_down", "inf_down", "closed")
            for x, end, closed in ((x1, b.a, closed_left), (x2, b.b, closed_right)):
                if end is None:
                    continue
                fill = "black" if closed else "white"
                lines.append(f'<circle cx="{x:.1f}" cy="{y}" r="4" fill="{fill}" stroke="black"/>')
            y += row
        y += row // 2
    notes = []
    if gamma.rank:
        notes.append(f"bars shown once per Γ-orbit, mod λ₀ = {fraction_str(gamma.lambda0)}")
    for k, d in sorted(torsion.items()):
        notes.append(f"torsion in degree {k}: dimension {d}")
    for note in notes:
        lines.append(f'<text x="8" y="{y + 4}" font-size="11">{note}</text>')
        y += row
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{y + 10}" '
        f'viewBox="0 0 {width} {y + 10}">'
    )
    body = [head, f'<text x="8" y="18" font-size="13">{title}</text>'] + lines + ["</svg>"]
    return "\n".join(body)


def _degree_filter(bars, torsion, degree):
    if degree is None:
        return bars, torsion
    return [b for b in bars if b.degree == degree], {k: d for k, d in torsion.items() if k == degree}


# ---------------------------------------------------------------------------
# commands


def _common(f):
    f = click.option("--input", "input_path", type=click.Path(dir_okay=False), help="PL, block or PN JSON file.")(f)
    f = click.option("--field", "field_spec", default=None, help="Override the coefficient field (Q, GF2, GF5, ...).")(f)
    f = click.option("--degree", type=int, default=None, help="Only report this degree.")(f)
    f = click.option("--seed", type=int, default=0, show_default=True, help="Seed for all randomized steps.")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(["json", "text", "svg"]), default="json", show_default=True
    )(f)
    return f


def _load(input_path, field_spec, fmt):
    if not input_path:
        fail_input("--input is required", fmt)
    try:
        return load_input(input_path, field_spec)
    except InputError as exc:
        fail_input(str(exc), fmt)


@click.group()
def main():
    """Interlevel barcodes of PL functions and filtered matched pairs."""


@main.command()
@_common
def barcode(input_path, field_spec, degree, seed, fmt):
    """Full barcode of the input."""
    inp = _load(input_path, field_spec, fmt)
    try:
        if inp.kind == "pn":
            N = inp.pn
            bars = essential_barcode(N, seed)
            torsion = {k: sum(N.ring.quotient_dim(f) for f in fs) for k, fs in N.torsion.items() if fs}
        else:
            fb = full_barcode(chain_of(inp), seed)
            bars, torsion = fb.bars, fb.torsion
    except (InputError, ValueError) as exc:
        fail_input(str(exc), fmt)
    bars, torsion = _degree_filter(bars, torsion, degree)
    rec = {
        "command": "barcode",
        "input": inp.name,
        "field": inp.field,
        "gamma": inp.gamma.to_json(),
        "bars": barcode_records(bars),
        "torsion": [{"degree": k, "dim": d} for k, d in sorted(torsion.items())],
    }
    text = [str(b) for b in bars] + [f"H{k} torsion dim {d}" for k, d in sorted(torsion.items())]
    if inp.gamma.rank:
        text.append(f"(bars mod λ₀ = {fraction_str(inp.gamma.lambda0)})")
    svg = render_svg(bars, torsion, inp.gamma, inp.name) if fmt == "svg" else None
    emit(rec, fmt, text, svg)


@main.command()
@_common
def blocks(input_path, field_spec, degree, seed, fmt):
    """Block decomposition of ℍ_k."""
    inp = _load(input_path, field_spec, fmt)
    try:
        summands = block_decomposition(chain_of(inp), seed)
    except (InputError, ValueError) as exc:
        fail_input(str(exc), fmt)
    if degree is not None:
        summands = [b for b in summands if b.degree == degree]
    rec = {
        "command": "blocks",
        "input": inp.name,
        "gamma": inp.gamma.to_json(),
        "blocks": [b.to_json() for b in summands],
    }
    text = []
    for b in summands:
        if b.kind == "torsion":
            text.append(f"H{b.degree} torsion dim {b.dim}")
        else:
            text.append(f"H{b.degree} {b.kind} {fraction_str(b.a)} {fraction_str(b.b)}")
    emit(rec, "text" if fmt == "svg" else fmt, text)


def _degrees(inp: Loaded, cp: ChainLevelFMP, degree) -> list[int]:
    if degree is not None:
        return [degree]
    if inp.kind == "pl":
        return list(range(inp.pl.X.dimension + 1))
    ks = cp.degrees
    return list(range(min(ks) - 1, max(ks) + 1)) if ks else [0]


@main.command()
@_common
@click.option("--grid", default=None, help="smin:smax:step,tmin:tmax:step")
def hk(input_path, field_spec, degree, seed, fmt, grid):
    """dim ℍ_k(s, t) over a grid."""
    inp = _load(input_path, field_spec, fmt)
    try:
        cp = chain_of(inp)
        ss, ts = parse_grid(grid) if grid else default_grid(inp)
        ks = _degrees(inp, cp, degree)
        rows = []
        for s in ss:
            for t in ts:
                for k in ks:
                    rows.append((s, t, k, hk_dim(cp, k, s, t, seed)))
    except (InputError, ValueError) as exc:
        fail_input(str(exc), fmt)
    rec = {
        "command": "hk",
        "input": inp.name,
        "rows": [{"s": fraction_str(s), "t": fraction_str(t), "degree": k, "dim": d} for s, t, k, d in rows],
    }
    text = ["s,t,degree,dim"] + [f"{fraction_str(s)},{fraction_str(t)},{k},{d}" for s, t, k, d in rows]
    emit(rec, "text" if fmt == "svg" else fmt, text)


# verification --------------------------------------------------------------


def _verify_pl(inp: Loaded, ss, ts, seed, degree, notices):
    X, f = inp.pl.X, inp.pl.f
    diag = validate(X, f)
    if not diag.valid:
        return {"stage": "validation", "errors": diag.errors}, 0
    cp = chain_level_fmp(X, f, inp.field)
    top = X.dimension
    ks = [degree] if degree is not None else list(range(top + 2))
    checked = 0
    for s in ss:
        for t in ts:
            if s + t < 0:
                continue
            if not (is_regular(f, -s) and is_regular(f, t)):
                notices.append(f"skipped irregular point s={fraction_str(s)}, t={fraction_str(t)}")
                continue
            oracle = interlevel_homology(X, f, -s, t, inp.field) if X.vertices else []
            for k in ks:
                want = oracle[k] if 0 <= k < len(oracle) else 0
                got = hk_dim(cp, k, s, t, seed)
                checked += 1
                if got != want:
                    return {
                        "stage": "interlevel",
                        "s": fraction_str(s),
                        "t": fraction_str(t),
                        "degree": k,
                        "hk_dim": got,
                        "oracle": want,
                    }, checked
                if not f.circle:
                    cone = hk_cone_direct(cp, k, s, t)
                    if cone != got:
                        return {
                            "stage": "cone",
                            "s": fraction_str(s),
                            "t": fraction_str(t),
                            "degree": k,
                            "hk_dim": got,
                            "cone": cone,
                        }, checked
    if not f.circle and X.vertices:
        ep = extended_persistence(X, f, inp.field)
        sp = spectra(cp, seed)
        mine = sorted((k, a, a + ell) for k, spec in sp.items() for a, ell in spec)
        ups = sorted((b.degree, b.a, b.b) for b in concise_barcode(cp.svd("up", seed)) if b.kind == "half_up")
        downs = sorted(
            (b.degree + 1, b.b, b.a) for b in concise_barcode(cp.svd("down", seed)) if b.kind == "half_down"
        )
        for label, got, want in (
            ("extended", mine, sorted(ep.extended)),
            ("ordinary", ups, sorted(ep.ordinary)),
            ("relative", downs, sorted(ep.relative)),
        ):
            checked += 1
            if got != want:
                return {
                    "stage": label,
                    "computed": [[k, fraction_str(a), fraction_str(b)] for k, a, b in got],
                    "extended_persistence": [[k, fraction_str(a), fraction_str(b)] for k, a, b in want],
                }, checked
    return None, checked


def _verify_blocks(inp: Loaded, ss, ts, seed, degree):
    cp = inp.chain
    got, want = block_decomposition(cp, seed), declared_summands(inp.items, cp.ring)
    if got != want:
        return {
            "stage": "decomposition",
            "recovered": [b.to_json() for b in got],
            "declared": [b.to_json() for b in want],
        }, 1
    if cp.ring.rank:
        return None, 1
    ks = [degree] if degree is not None else _degrees(inp, cp, None)
    checked = 1
    for s in ss:
        for t in ts:
            for k in ks:
                got, cone = hk_dim(cp, k, s, t, seed), hk_cone_direct(cp, k, s, t)
                checked += 1
                if got != cone:
                    return {"stage": "cone", "s": fraction_str(s), "t": fraction_str(t), "degree": k,
                            "hk_dim": got, "cone": cone}, checked
    return None, checked


def _verify_pn(inp: Loaded, seed):
    diag = validate_pn(inp.pn)
    if diag.status == "invalid":
        return {"stage": "validation", "errors": diag.messages}, 0
    rep = check_pn_duality(inp.pn, seed)
    if not rep.ok:
        return {"stage": "duality", "errors": rep.messages}, 1
    return None, 1


@main.command()
@_common
@click.option("--grid", default=None, help="smin:smax:step,tmin:tmax:step")
def verify(input_path, field_spec, degree, seed, fmt, grid):
    """Compare against the brute-force oracles."""
    inp = _load(input_path, field_spec, fmt)
    notices: list[str] = []
    try:
        ss, ts = parse_grid(grid) if grid else default_grid(inp)
        if inp.kind == "pl":
            mismatch, checked = _verify_pl(inp, ss, ts, seed, degree, notices)
        elif inp.kind == "blocks":
            mismatch, checked = _verify_blocks(inp, ss, ts, seed, degree)
        else:
            mismatch, checked = _verify_pn(inp, seed)
    except (InputError, ValueError) as exc:
        fail_input(str(exc), fmt)
    for n in notices:
        click.echo(f"notice: {n}", err=True)
    rec = {
        "command": "verify",
        "input": inp.name,
        "ok": mismatch is None,
        "checks": checked,
        "skipped": len(notices),
        "notices": notices,
        "mismatch": mismatch,
    }
    text = [f"{inp.name}: {'pass' if mismatch is None else 'FAIL'} ({checked} checks, {len(notices)} skipped)"]
    if mismatch is not None:
        text.append(json.dumps(mismatch, ensure_ascii=False))
    emit(rec, "text" if fmt == "svg" else fmt, text)
    sys.exit(OK if mismatch is None else FAILED)


# stability -----------------------------------------------------------------


def _pairs_of(inp: Loaded, seed):
    if inp.kind == "pn":
        return [(k, matched_pair_at_degree(inp.pn, k)) for k in inp.pn.degrees]
    cp = chain_of(inp)
    return [(k, homology_fmp(cp, k, seed)) for k in cp.degrees]


@main.command()
@_common
@click.option("--eps", default="1/10", show_default=True, help="Perturbation size ε ≥ 0 (rational).")
@click.option("--trials", default=100, show_default=True, type=int)
def perturb(input_path, field_spec, degree, seed, fmt, eps, trials):
    """Perturb basis filtration values by at most ε and check stability.

    Without --input the trials run on planted pairs over Γ = {0} and Γ = ℤ.
    """
    try:
        eps = Fraction(eps)
        if eps < 0:
            raise InputError("ε must be nonnegative")
        if input_path:
            inp = load_input(input_path, field_spec)
            pairs = [(k, P) for k, P in _pairs_of(inp, seed) if degree is None or k == degree]
            name = inp.name
        else:
            inp, pairs, name = None, None, "planted"
    except (InputError, ValueError) as exc:
        fail_input(str(exc), fmt)
    fld = Field.parse(field_spec or "Q")
    worst, failures, first = Fraction(0), 0, None
    base = {k: basis_spectrum(P) for k, P in pairs} if pairs else {}
    for i in range(trials):
        rng = random.Random(seed * 1_000_003 + i)
        if pairs is None:
            ring = GroupRing(fld, TranslationGroup(None if i % 2 == 0 else 1))
            P, S = planted_pair(ring, rng)
            results = [(None, perturbation_trial(P, eps, rng, S))]
        else:
            results = [(k, perturbation_trial(P, eps, rng, base[k])) for k, P in pairs]
        for k, r in results:
            worst = max(worst, r.gap_drift)
            if not r.ok:
                failures += 1
                if first is None:
                    first = {"trial": i, "degree": k, **r.to_json()}
    rec = {
        "command": "perturb",
        "input": name,
        "eps": fraction_str(eps),
        "trials": trials,
        "seed": seed,
        "failures": failures,
        "max_gap_drift": fraction_str(worst),
        "counterexample": first,
    }
    text = [f"{name}: {trials} trials, ε = {fraction_str(eps)}, {failures} failures, max gap drift {worst}"]
    if first is not None:
        text.append(json.dumps(first, ensure_ascii=False))
    emit(rec, "text" if fmt == "svg" else fmt, text)
    sys.exit(OK if failures == 0 else FAILED)


if __name__ == "__main__":
    main()
