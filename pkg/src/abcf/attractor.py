"""Constructive computation of the finite-rectangular attractor.

The attractor has two connected components bounded by non-decreasing
step functions whose levels are exactly the values of the four truncated
orbits.  Each level's horizontal segment is the transport of one of the
two boundary rays [-oo, x_b] x {b} and [x_a, oo] x {a} along its orbit
word; the unknown corners x_a, x_b solve the two-equation system that
glues the segment at Sb to the next level above and the segment at Sa
to the next level below.  Everything here is exact: corners come out as
rationals or quadratic surds, adjacency of segments is checked by exact
comparison, and the bijectivity of the reduction map on the domain is
certified by an exact box-tiling argument.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional

import numpy as np

from .cycles import TruncatedOrbits, truncated_orbits
from .mobius import Mobius, S, T, T_INV
from .natext import Box, Cloud, F_step_array, invariant_box_measure, map_interval
from .params import Params
from .scalars import (
    INF,
    NEG_INF,
    POS_INF,
    Bound,
    ExtReal,
    Infinity,
    as_float,
    cmp_bound,
    format_scalar,
    is_exact,
)


class ConstructionError(RuntimeError):
    """The finite-rectangular construction failed; carries diagnostics."""


Chain = Literal["La", "Lb", "Ua", "Ub"]


@dataclass(frozen=True)
class LevelEntry:
    value: ExtReal
    word: Mobius
    chain: Chain
    pos: int

    @property
    def a_anchored(self) -> bool:
        return self.chain in ("La", "Ua")

    @property
    def origin(self) -> str:
        return f"{self.chain}[{self.pos}]"


@dataclass(frozen=True)
class Step:
    x_lo: Bound
    x_hi: Bound
    y: ExtReal
    origin: str = ""

    def to_json(self) -> dict:
        def enc(v):
            if v is NEG_INF:
                return "-inf"
            if v is POS_INF:
                return "inf"
            return format_scalar(v)

        return {
            "x_lo": enc(self.x_lo),
            "x_hi": enc(self.x_hi),
            "y": format_scalar(self.y),
            "x_lo_float": -np.inf if self.x_lo is NEG_INF else as_float(self.x_lo),
            "x_hi_float": np.inf if self.x_hi is POS_INF else as_float(self.x_hi),
            "y_float": as_float(self.y),
            "origin": self.origin,
        }


@dataclass
class RectDomain:
    """Two staircase components; either may be empty in degenerate cases."""

    params: Params
    upper: list[Step]  # ascending y; region above the steps
    lower: list[Step]  # ascending y; region below the steps
    x_a: Optional[ExtReal]
    x_b: Optional[ExtReal]
    degenerate: bool = False
    orbits: Optional[TruncatedOrbits] = None

    # -- geometry ---------------------------------------------------------

    def lower_boxes(self) -> list[Box]:
        out = []
        prev: Bound = NEG_INF
        for s in self.lower:
            if cmp_bound(prev, s.y) < 0:
                out.append(Box(s.x_lo, POS_INF, prev, s.y))
            prev = s.y
        return out

    def upper_boxes(self) -> list[Box]:
        out = []
        steps = self.upper
        for i, s in enumerate(steps):
            nxt: Bound = steps[i + 1].y if i + 1 < len(steps) else POS_INF
            if cmp_bound(s.y, nxt) < 0:
                out.append(Box(NEG_INF, s.x_hi, s.y, nxt))
        return out

    def boxes(self) -> list[Box]:
        return self.upper_boxes() + self.lower_boxes()

    # -- membership --------------------------------------------------------

    @functools.cached_property
    def _float_arrays(self):
        low_levels = np.array([as_float(s.y) for s in self.lower])
        low_lefts = np.array(
            [-np.inf if s.x_lo is NEG_INF else as_float(s.x_lo) for s in self.lower]
        )
        up_levels = np.array([as_float(s.y) for s in self.upper])
        up_rights = np.array(
            [np.inf if s.x_hi is POS_INF else as_float(s.x_hi) for s in self.upper]
        )
        return low_levels, low_lefts, up_levels, up_rights

    def contains_array(self, xs: np.ndarray, ys: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        low_levels, low_lefts, up_levels, up_rights = self._float_arrays
        inside = np.zeros(xs.shape, dtype=bool)
        if len(low_levels):
            idx = np.searchsorted(low_levels, ys - tol, side="left")
            ok = ys <= low_levels[-1] + tol
            idxc = np.minimum(idx, len(low_levels) - 1)
            inside |= ok & (xs >= low_lefts[idxc] - tol)
        if len(up_levels):
            idx = np.searchsorted(up_levels, ys + tol, side="right") - 1
            ok = ys >= up_levels[0] - tol
            idxc = np.maximum(idx, 0)
            inside |= ok & (xs <= up_rights[idxc] + tol)
        return inside

    def contains(self, x: ExtReal, y: ExtReal, tol: float = 1e-9) -> bool:
        if isinstance(x, Infinity) or isinstance(y, Infinity):
            return any(_box_contains_ext(b, x, y, tol) for b in self.boxes())
        return bool(self.contains_array(np.array([as_float(x)]), np.array([as_float(y)]), tol)[0])

    def to_json(self) -> dict:
        return {
            "a": format_scalar(self.params.a),
            "b": format_scalar(self.params.b),
            "params": self.params.to_json(),
            "x_a": None if self.x_a is None else format_scalar(self.x_a),
            "x_b": None if self.x_b is None else format_scalar(self.x_b),
            "x_a_float": None if self.x_a is None else as_float(self.x_a),
            "x_b_float": None if self.x_b is None else as_float(self.x_b),
            "degenerate": self.degenerate,
            "upper": [s.to_json() for s in self.upper],
            "lower": [s.to_json() for s in self.lower],
        }


def _box_contains_ext(b: Box, x: ExtReal, y: ExtReal, tol: float) -> bool:
    def ok(v, lo, hi):
        if isinstance(v, Infinity):
            return lo is NEG_INF or hi is POS_INF
        fv = as_float(v)
        flo = -np.inf if lo is NEG_INF else as_float(lo)
        fhi = np.inf if hi is POS_INF else as_float(hi)
        return flo - tol <= fv <= fhi + tol

    return ok(x, b.x_lo, b.x_hi) and ok(y, b.y_lo, b.y_hi)


# -- transported segments -------------------------------------------------


def _arc_ends(entry: LevelEntry, x_a: ExtReal, x_b: ExtReal) -> tuple[ExtReal, ExtReal]:
    """(start, end) of the transported boundary arc at this level.

    a-chains transport [x_a, oo] (start moving, end fixed); b-chains
    transport [-oo, x_b] (start fixed at the infinity image, end moving).
    """
    w = entry.word
    if entry.a_anchored:
        return w.apply(x_a), w.apply(INF)
    return w.apply(INF), w.apply(x_b)


def _segment(entry: LevelEntry, x_a: ExtReal, x_b: ExtReal) -> Step:
    s, e = _arc_ends(entry, x_a, x_b)
    if isinstance(s, Infinity) and isinstance(e, Infinity):
        raise ConstructionError(f"level {entry.origin}: degenerate full-line segment")
    if isinstance(s, Infinity):
        return Step(NEG_INF, e, entry.value, entry.origin)
    if isinstance(e, Infinity):
        return Step(s, POS_INF, entry.value, entry.origin)
    if cmp_bound(s, e) > 0:
        raise ConstructionError(
            f"level {entry.origin}: transported arc wraps infinity ({s} > {e})"
        )
    return Step(s, e, entry.value, entry.origin)


def _entries(tro: TruncatedOrbits) -> tuple[list[LevelEntry], list[LevelEntry]]:
    lower = [LevelEntry(v, w, "La", i) for i, (v, w) in enumerate(tro.la)]
    lower += [LevelEntry(v, w, "Lb", i) for i, (v, w) in enumerate(tro.lb)]
    upper = [LevelEntry(v, w, "Ua", i) for i, (v, w) in enumerate(tro.ua)]
    upper += [LevelEntry(v, w, "Ub", i) for i, (v, w) in enumerate(tro.ub)]
    for e in lower + upper:
        if isinstance(e.value, Infinity):
            raise ConstructionError(f"orbit level at infinity: {e.origin}")
    return lower, upper


def _sorted_steps(
    entries: list[LevelEntry], x_a: ExtReal, x_b: ExtReal
) -> list[tuple[LevelEntry, Step]]:
    pairs = [(e, _segment(e, x_a, x_b)) for e in entries]

    def cmp(p1, p2):
        c = cmp_bound(p1[1].y, p2[1].y)
        if c:
            return c
        return cmp_bound(p1[1].x_lo, p2[1].x_lo)

    return sorted(pairs, key=functools.cmp_to_key(cmp))


def _staircase_ok(pairs: list[tuple[LevelEntry, Step]], component: str) -> Optional[str]:
    """None when the sorted segments chain into one staircase, else a reason."""
    if not pairs:
        return f"{component}: empty"
    steps = [s for _, s in pairs]
    for i in range(len(steps) - 1):
        if cmp_bound(steps[i].x_hi, steps[i + 1].x_lo) != 0:
            return (
                f"{component}: segments at levels {steps[i].y} ({steps[i].origin}) and "
                f"{steps[i + 1].y} ({steps[i + 1].origin}) not joined: "
                f"{steps[i].x_hi} vs {steps[i + 1].x_lo}"
            )
    if component == "lower":
        if steps[-1].x_hi is not POS_INF:
            return "lower: top segment does not extend to +oo"
        if steps[0].x_lo is NEG_INF:
            return "lower: bottom segment unbounded left"
        if any(s.x_hi is POS_INF for s in steps[:-1]):
            return "lower: interior segment unbounded"
    else:
        if steps[0].x_lo is not NEG_INF:
            return "upper: bottom segment does not extend to -oo"
        if steps[-1].x_hi is POS_INF:
            return "upper: top segment unbounded right"
        if any(s.x_lo is NEG_INF for s in steps[1:]):
            return "upper: interior segment unbounded"
    for s in steps:
        if s.x_lo is not NEG_INF and s.x_hi is not POS_INF and cmp_bound(s.x_lo, s.x_hi) >= 0:
            return f"{component}: empty segment at level {s.y} ({s.origin})"
    return None


# -- the corner system ----------------------------------------------------


def _apply_S_inverse(v: ExtReal) -> ExtReal:
    return S.apply(v)  # S is an involution in PSL(2,Z)


def _solve_pair(
    e_l: LevelEntry, e_u: LevelEntry, params: Params
) -> list[tuple[ExtReal, ExtReal]]:
    """Candidate (x_a, x_b) solutions for a chosen (y_ell, y_u) pair."""
    wl, wu = e_l.word, e_u.word
    sols: list[tuple[ExtReal, ExtReal]] = []
    if not e_l.a_anchored and not e_u.a_anchored:
        # both equations decouple through the fixed (infinity) ends
        x_b = _apply_S_inverse(wl.apply(INF))
        x_a = _apply_S_inverse(wu.apply(x_b))
        sols.append((x_a, x_b))
    elif not e_l.a_anchored and e_u.a_anchored:
        x_b = _apply_S_inverse(wl.apply(INF))
        x_a = _apply_S_inverse(wu.apply(INF))
        sols.append((x_a, x_b))
    elif e_l.a_anchored and e_u.a_anchored:
        x_a = _apply_S_inverse(wu.apply(INF))
        x_b = _apply_S_inverse(wl.apply(x_a))
        sols.append((x_a, x_b))
    else:
        # coupled: x_a is a fixed point of S wu S wl
        m = S @ wu @ S @ wl
        cls = m.classify()
        if cls == "hyperbolic":
            att, rep = m.fixed_points()
            roots = [att, rep]
        elif cls == "parabolic":
            roots = [m.parabolic_fixed_point()]
        else:
            return []
        for x_a in roots:
            if isinstance(x_a, Infinity):
                continue
            x_b = _apply_S_inverse(wl.apply(x_a))
            sols.append((x_a, x_b))
    return [
        (xa, xb)
        for xa, xb in sols
        if not isinstance(xa, Infinity) and not isinstance(xb, Infinity)
    ]


def solve_corners(
    params: Params, tro: TruncatedOrbits
) -> tuple[ExtReal, ExtReal, LevelEntry, LevelEntry]:
    """Find (x_a, x_b) by scanning the admissible (y_ell, y_u) pairs.

    Each candidate pair yields a two-equation Mobius system; a solution
    is accepted only if the corner bounds x_a >= 1, x_b <= -1 hold and
    the full transported staircase chains up exactly.
    """
    if not tro.finite:
        raise ConstructionError("finiteness condition fails at the cap")
    lower_entries, upper_entries = _entries(tro)
    sb_entry = next((e for e in lower_entries if e.chain == "Lb" and e.pos == 0), None)
    sa_entry = next((e for e in upper_entries if e.chain == "Ua" and e.pos == 0), None)
    if sb_entry is None or sa_entry is None:
        raise ConstructionError("missing anchor level (empty cycle side)")

    def cands_l():
        cs = [
            e
            for e in lower_entries
            if e is not sb_entry and params.cmp(e.value, sb_entry.value) >= 0
        ]
        cs.sort(key=functools.cmp_to_key(lambda u, v: params.cmp(u.value, v.value)))
        return cs[:6]

    def cands_u():
        cs = [
            e
            for e in upper_entries
            if e is not sa_entry and params.cmp(e.value, sa_entry.value) <= 0
        ]
        cs.sort(key=functools.cmp_to_key(lambda u, v: params.cmp(v.value, u.value)))
        return cs[:6]

    failures: list[str] = []
    for e_l in cands_l():
        for e_u in cands_u():
            for x_a, x_b in _solve_pair(e_l, e_u, params):
                if not is_exact(x_a) or not is_exact(x_b):
                    continue
                if params.cmp(x_a, 1) < 0 or params.cmp(x_b, -1) > 0:
                    failures.append(
                        f"({e_l.origin},{e_u.origin}): corner bounds fail "
                        f"x_a={as_float(x_a):.6g} x_b={as_float(x_b):.6g}"
                    )
                    continue
                try:
                    low_pairs = _sorted_steps(lower_entries, x_a, x_b)
                    up_pairs = _sorted_steps(upper_entries, x_a, x_b)
                except ConstructionError as exc:
                    failures.append(f"({e_l.origin},{e_u.origin}): {exc}")
                    continue
                reason = _staircase_ok(low_pairs, "lower") or _staircase_ok(up_pairs, "upper")
                if reason is None:
                    return x_a, x_b, e_l, e_u
                failures.append(f"({e_l.origin},{e_u.origin}): {reason}")
    raise ConstructionError(
        "no corner candidate produced a connected staircase:\n  " + "\n  ".join(failures[:12])
    )


# -- assembly ---------------------------------------------------------------


def _degenerate_domain(params: Params) -> RectDomain:
    one = Fraction(1)
    zero = Fraction(0)
    if params.is_m11:
        # the four explicit boxes; forward invariance and the exact
        # bijectivity tiling force the lower edge 0 = b - 1 on the first
        upper = [
            Step(NEG_INF, -one, zero, "deg"),
            Step(-one, zero, one, "deg"),
        ]
        lower = [
            Step(zero, one, -one, "deg"),
            Step(one, POS_INF, zero, "deg"),
        ]
        return RectDomain(params, upper, lower, one, -one, degenerate=True)
    if params.is_a0:
        lower = [
            Step(-one, zero, -one, "deg"),
            Step(zero, one, zero, "deg"),
            Step(one, POS_INF, one, "deg"),
        ]
        return RectDomain(params, [], lower, one, None, degenerate=True)
    if params.is_b0:
        upper = [
            Step(NEG_INF, -one, -one, "deg"),
            Step(-one, zero, zero, "deg"),
            Step(zero, one, one, "deg"),
        ]
        return RectDomain(params, upper, [], None, -one, degenerate=True)
    raise ValueError("not a degenerate parameter pair")


def build_attractor(params: Params, cap: int = 100_000) -> RectDomain:
    """Compute the attractor domain exactly from the truncated orbits."""
    if params.degenerate:
        return _degenerate_domain(params)
    if not params.exact:
        raise ConstructionError("attractor construction requires exact parameters")
    tro = truncated_orbits(params, cap)
    x_a, x_b, _, _ = solve_corners(params, tro)
    lower_entries, upper_entries = _entries(tro)
    low_pairs = _sorted_steps(lower_entries, x_a, x_b)
    up_pairs = _sorted_steps(upper_entries, x_a, x_b)
    dom = RectDomain(
        params,
        [s for _, s in up_pairs],
        [s for _, s in low_pairs],
        x_a,
        x_b,
        orbits=tro,
    )
    report = verify_connectivity(dom)
    if not report["ok"]:
        raise ConstructionError(f"connectivity failed: {report['failures']}")
    return dom


def verify_connectivity(dom: RectDomain) -> dict:
    """Adjacency of consecutive levels, the joins at x = 0, and the
    corner joins at x_a (straddling a) and x_b (straddling b)."""
    params = dom.params
    failures: list[str] = []
    checks: list[dict] = []

    def chain(steps: list[Step], component: str):
        for i in range(len(steps) - 1):
            ok = cmp_bound(steps[i].x_hi, steps[i + 1].x_lo) == 0
            checks.append(
                {
                    "kind": "adjacent",
                    "component": component,
                    "levels": [as_float(steps[i].y), as_float(steps[i + 1].y)],
                    "ok": ok,
                }
            )
            if not ok:
                failures.append(
                    f"{component}: {steps[i].origin} -> {steps[i + 1].origin} disconnected"
                )

    chain(dom.lower, "lower")
    chain(dom.upper, "upper")

    if not dom.degenerate:
        zero = Fraction(0)

        def named_join(steps, origin_left, origin_right, label):
            left = next((s for s in steps if s.origin == origin_left), None)
            right = next((s for s in steps if s.origin == origin_right), None)
            if left is None or right is None:
                return
            ok = cmp_bound(left.x_hi, zero) == 0 and cmp_bound(right.x_lo, zero) == 0
            checks.append({"kind": label, "ok": ok})
            if not ok:
                failures.append(f"{label}: expected join at x = 0")

        named_join(dom.lower, "La[1]", "Lb[0]", "join STa|Sb at 0")
        named_join(dom.upper, "Ua[0]", "Ub[1]", "join Sa|ST-1b at 0")

        def corner_join(steps, pivot, corner, component):
            # when the endpoint itself occurs as an orbit level (an exact
            # hit, the coupling case), either adjacent pair may carry the
            # corner; accept any straddling pair joining there
            cands = [
                i
                for i in range(len(steps) - 1)
                if params.cmp(steps[i].y, pivot) <= 0
                and params.cmp(pivot, steps[i + 1].y) <= 0
            ]
            if not cands:
                return
            ok = any(cmp_bound(steps[i].x_hi, corner) == 0 for i in cands)
            checks.append({"kind": f"corner join ({component})", "ok": ok})
            if not ok:
                failures.append(
                    f"{component}: levels straddling the endpoint do not join at the corner"
                )

        if dom.x_a is not None and dom.lower:
            corner_join(dom.lower, params.a, dom.x_a, "lower/x_a")
        if dom.x_b is not None and dom.upper:
            corner_join(dom.upper, params.b, dom.x_b, "upper/x_b")

    return {"ok": not failures, "failures": failures, "checks": checks}


# -- bijectivity ------------------------------------------------------------


@dataclass
class BijectivityReport:
    pieces: dict
    overlap_cells: int
    uncovered_cells: int
    escaped_cells: int
    overlap_measure: float
    uncovered_measure: float
    locking_segments: list
    ok: bool

    def to_json(self) -> dict:
        return {
            "overlap_cells": self.overlap_cells,
            "uncovered_cells": self.uncovered_cells,
            "escaped_cells": self.escaped_cells,
            "overlap_measure": self.overlap_measure,
            "uncovered_measure": self.uncovered_measure,
            "locking_segments": [
                {
                    "level": as_float(lv),
                    "x_lo": -np.inf if lo is NEG_INF else as_float(lo),
                    "x_hi": np.inf if hi is POS_INF else as_float(hi),
                }
                for lv, lo, hi in self.locking_segments
            ],
            "ok": self.ok,
        }


def _clip_slab(box: Box, y_lo: Bound, y_hi: Bound) -> Optional[Box]:
    lo = box.y_lo if cmp_bound(box.y_lo, y_lo) >= 0 else y_lo
    hi = box.y_hi if cmp_bound(box.y_hi, y_hi) <= 0 else y_hi
    if cmp_bound(lo, hi) >= 0:
        return None
    return Box(box.x_lo, box.x_hi, lo, hi)


def _image_boxes(m: Mobius, boxes: list[Box]) -> list[Box]:
    out: list[Box] = []
    for b in boxes:
        for x_lo, x_hi in map_interval(m, b.x_lo, b.x_hi):
            for y_lo, y_hi in map_interval(m, b.y_lo, b.y_hi):
                if cmp_bound(x_lo, x_hi) < 0 and cmp_bound(y_lo, y_hi) < 0:
                    out.append(Box(x_lo, x_hi, y_lo, y_hi))
    return out


def _fragment(boxes_list: list[list[Box]]):
    """Fragment several box families on their joint exact grid.

    Returns (cut function) mapping each family to a multiset of grid cell
    ids, plus the cell geometry for measure reports.
    """
    xs: list[Bound] = []
    ys: list[Bound] = []
    for boxes in boxes_list:
        for b in boxes:
            for v in (b.x_lo, b.x_hi):
                if v is not NEG_INF and v is not POS_INF:
                    xs.append(v)
            for v in (b.y_lo, b.y_hi):
                if v is not NEG_INF and v is not POS_INF:
                    ys.append(v)

    def dedup_sort(vals: list[Bound]) -> list[Bound]:
        out: list[Bound] = []
        for v in sorted(vals, key=functools.cmp_to_key(cmp_bound)):
            if not out or cmp_bound(out[-1], v) != 0:
                out.append(v)
        return out

    xcuts = dedup_sort(xs)
    ycuts = dedup_sort(ys)

    def index(cuts: list[Bound], v: Bound, side: str) -> int:
        # cells: [-oo,c0]=0, [c0,c1]=1, ..., [ck-1,+oo]=k
        if v is NEG_INF:
            return 0
        if v is POS_INF:
            return len(cuts)
        for i, c in enumerate(cuts):
            cc = cmp_bound(v, c)
            if cc == 0:
                return i + 1 if side == "lo" else i
            if cc < 0:
                raise ConstructionError("box endpoint missing from the cut grid")
        raise ConstructionError("box endpoint missing from the cut grid")

    def cells_of(b: Box) -> list[tuple[int, int]]:
        xi0 = index(xcuts, b.x_lo, "lo")
        xi1 = index(xcuts, b.x_hi, "hi")
        yi0 = index(ycuts, b.y_lo, "lo")
        yi1 = index(ycuts, b.y_hi, "hi")
        return [(xi, yi) for xi in range(xi0, xi1 + 1) for yi in range(yi0, yi1 + 1)]

    def cell_box(cell: tuple[int, int]) -> Box:
        xi, yi = cell
        x_lo = NEG_INF if xi == 0 else xcuts[xi - 1]
        x_hi = POS_INF if xi == len(xcuts) else xcuts[xi]
        y_lo = NEG_INF if yi == 0 else ycuts[yi - 1]
        y_hi = POS_INF if yi == len(ycuts) else ycuts[yi]
        return Box(x_lo, x_hi, y_lo, y_hi)

    return cells_of, cell_box


def locking_segments(dom: RectDomain) -> list[tuple[ExtReal, Bound, Bound]]:
    """Interior horizontal segments at the strong-cycle end levels."""
    if dom.orbits is None or dom.x_a is None or dom.x_b is None:
        return []
    out = []
    for res, a_side in ((dom.orbits.cycle_a, True), (dom.orbits.cycle_b, False)):
        if res.classification != "strong":
            continue
        w = res.end_word_lower
        if a_side:
            s, e = w.apply(dom.x_a), w.apply(INF)
        else:
            s, e = w.apply(INF), w.apply(dom.x_b)
        lo: Bound = NEG_INF if isinstance(s, Infinity) else s
        hi: Bound = POS_INF if isinstance(e, Infinity) else e
        if not isinstance(s, Infinity) and not isinstance(e, Infinity) and cmp_bound(s, e) > 0:
            lo, hi = e, s
        out.append((res.end, lo, hi))
    return out


def verify_bijectivity(dom: RectDomain, params: Optional[Params] = None) -> BijectivityReport:
    """Cut the components at the canonical heights, map the six pieces by
    T^-1, S, S, T, S, S, and certify that the images tile the domain."""
    params = params or dom.params
    a, b = params.a, params.b
    zero = Fraction(0)
    upper_boxes = dom.upper_boxes()
    lower_boxes = dom.lower_boxes()

    def carve(boxes: list[Box], lo: Bound, hi: Bound) -> list[Box]:
        out = []
        for bx in boxes:
            c = _clip_slab(bx, lo, hi)
            if c is not None:
                out.append(c)
        return out

    pieces = {
        "U1": (carve(upper_boxes, b, POS_INF), T_INV),
        "U2": (carve(upper_boxes, b - 1, zero), S),
        "U3": (carve(upper_boxes, zero, b), S),
        "L1": (carve(lower_boxes, NEG_INF, a), T),
        "L2": (carve(lower_boxes, zero, a + 1), S),
        "L3": (carve(lower_boxes, a, zero), S),
    }
    images: list[Box] = []
    for name, (boxes, m) in pieces.items():
        images.extend(_image_boxes(m, boxes))
    domain_boxes = upper_boxes + lower_boxes

    cells_of, cell_box = _fragment([domain_boxes, images])
    domain_cells: dict[tuple[int, int], int] = {}
    for bx in domain_boxes:
        for c in cells_of(bx):
            domain_cells[c] = domain_cells.get(c, 0) + 1
    if any(v > 1 for v in domain_cells.values()):
        raise ConstructionError("domain boxes overlap; staircase is malformed")
    image_cells: dict[tuple[int, int], int] = {}
    for bx in images:
        for c in cells_of(bx):
            image_cells[c] = image_cells.get(c, 0) + 1

    overlap = [c for c, n in image_cells.items() if n > 1 and c in domain_cells]
    uncovered = [c for c in domain_cells if c not in image_cells]
    escaped = [c for c in image_cells if c not in domain_cells]

    def total_measure(cells):
        tot = 0.0
        for c in cells:
            try:
                tot += invariant_box_measure(cell_box(c))
            except ValueError:
                tot += float("inf")
        return tot

    report = BijectivityReport(
        pieces={k: len(v[0]) for k, v in pieces.items()},
        overlap_cells=len(overlap),
        uncovered_cells=len(uncovered),
        escaped_cells=len(escaped),
        overlap_measure=total_measure(overlap),
        uncovered_measure=total_measure(uncovered),
        locking_segments=locking_segments(dom),
        ok=not overlap and not uncovered and not escaped,
    )
    return report


# -- oracle comparison and reduction scan -----------------------------------


@dataclass
class OracleComparison:
    inside_fraction: float
    boundary_gap: float
    n_points: int

    def to_json(self) -> dict:
        return {
            "inside_fraction": self.inside_fraction,
            "boundary_gap": self.boundary_gap,
            "n_points": self.n_points,
        }


def compare_with_oracle(
    dom: RectDomain,
    cloud: Cloud,
    tol: float = 1e-9,
    clip: float = 5.0,
    samples_per_step: int = 33,
) -> OracleComparison:
    """Fraction of oracle points inside the closed domain, and the worst
    distance from the (clipped) boundary steps to the nearest point."""
    pts = cloud.points
    if len(pts) == 0:
        raise ValueError("empty cloud")
    inside = dom.contains_array(pts[:, 0], pts[:, 1], tol)
    frac = float(inside.mean())

    from scipy.spatial import cKDTree

    tree = cKDTree(pts)
    gap = 0.0
    for s in dom.upper + dom.lower:
        y = as_float(s.y)
        if abs(y) > clip:
            continue
        lo = -clip if s.x_lo is NEG_INF else max(-clip, as_float(s.x_lo))
        hi = clip if s.x_hi is POS_INF else min(clip, as_float(s.x_hi))
        if hi <= lo:
            continue
        xs = np.linspace(lo, hi, samples_per_step)
        d, _ = tree.query(np.column_stack([xs, np.full_like(xs, y)]))
        # set distance: how close the cloud comes to this step anywhere
        gap = max(gap, float(d.min()))
    return OracleComparison(frac, gap, len(pts))


@dataclass
class ScanReport:
    coverage: float
    max_time: int
    n_points: int
    unresolved: int

    def to_json(self) -> dict:
        return {
            "coverage": self.coverage,
            "max_time": self.max_time,
            "n_points": self.n_points,
            "unresolved": self.unresolved,
        }


def reduction_scan(
    dom: RectDomain,
    grid: int,
    cap: int = 10_000,
    window: float = 20.0,
    diagonal_margin: float = 1e-3,
    tol: float = 1e-9,
) -> ScanReport:
    """Iterate the reduction map from a lattice of off-diagonal points and
    report the fraction reaching the domain within the cap."""
    if grid == 0:
        return ScanReport(float("nan"), 0, 0, 0)
    params = dom.params
    g = np.linspace(-window, window, grid)
    xs, ys = np.meshgrid(g, g)
    xs, ys = xs.ravel(), ys.ravel()
    keep = np.abs(xs - ys) > diagonal_margin
    xs, ys = xs[keep], ys[keep]
    n = len(xs)
    hit_time = np.full(n, -1, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    done = dom.contains_array(xs, ys, tol)
    hit_time[done] = 0
    active &= ~done
    t = 0
    while active.any() and t < cap:
        t += 1
        # x may legitimately pass through the point at infinity (IEEE
        # signed infinities realize the projective transit); only a y
        # stuck at infinity (rational termination) never resolves
        xs[active], ys[active] = F_step_array(xs[active], ys[active], params)
        done = np.zeros(n, dtype=bool)
        done[active] = dom.contains_array(xs[active], ys[active], tol)
        hit_time[done] = t
        active &= ~done
    resolved = hit_time >= 0
    coverage = float(resolved.mean())
    max_time = int(hit_time[resolved].max()) if resolved.any() else 0
    return ScanReport(coverage, max_time, n, int((~resolved).sum()))
