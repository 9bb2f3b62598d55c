"""The two-dimensional reduction map, its trapping region and a sampling
oracle for the attractor.

The map applies one generator to both coordinates, chosen by the second
coordinate: T below a, S on [a, b), T^-1 from b up (and at infinity).
Every off-diagonal point enters the trapping region in finite time; long
Monte Carlo runs of the map approximate the attractor and serve as an
independent cross-check for the constructed domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log
from typing import Optional

import numpy as np

from .mobius import Mobius, S, T, T_INV
from .params import Params
from .scalars import (
    NEG_INF,
    POS_INF,
    Bound,
    ExtReal,
    Infinity,
    as_float,
    cmp_bound,
)


def rho(y: ExtReal, params: Params) -> Mobius:
    """Generator applied at height y; rho(inf) = T^-1."""
    if isinstance(y, Infinity):
        return T_INV
    if params.cmp(y, params.a) < 0:
        return T
    if params.cmp(y, params.b) < 0:
        return S
    return T_INV


def F_step(p: tuple[ExtReal, ExtReal], params: Params) -> tuple[ExtReal, ExtReal]:
    """One reduction-map step; rejects diagonal input."""
    x, y = p
    if params.eq(x, y):
        raise ValueError("reduction map is undefined on the diagonal")
    g = rho(y, params)
    return g.apply(x), g.apply(y)


# -- boxes -------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box; sides may be the +-oo sentinels."""

    x_lo: Bound
    x_hi: Bound
    y_lo: Bound
    y_hi: Bound

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (
            _lo(self.x_lo) - tol <= x <= _hi(self.x_hi) + tol
            and _lo(self.y_lo) - tol <= y <= _hi(self.y_hi) + tol
        )

    def floats(self) -> tuple[float, float, float, float]:
        return _lo(self.x_lo), _hi(self.x_hi), _lo(self.y_lo), _hi(self.y_hi)


def _lo(v: Bound) -> float:
    if v is NEG_INF:
        return float("-inf")
    if v is POS_INF:  # pragma: no cover - malformed box
        return float("inf")
    return as_float(v)


def _hi(v: Bound) -> float:
    if v is POS_INF:
        return float("inf")
    if v is NEG_INF:  # pragma: no cover - malformed box
        return float("-inf")
    return as_float(v)


@dataclass
class TrapRegion:
    upper: list[Box]
    lower: list[Box]
    case_upper: str = ""
    case_lower: str = ""

    @property
    def boxes(self) -> list[Box]:
        return self.upper + self.lower

    def contains(self, x: ExtReal, y: ExtReal, tol: float = 0.0) -> bool:
        """Closed membership; the unsigned infinity lies in every box with
        an unbounded side on the matching axis."""

        def on_axis(v: ExtReal, lo: Bound, hi: Bound) -> bool:
            if isinstance(v, Infinity):
                return lo is NEG_INF or hi is POS_INF
            return _lo(lo) - tol <= as_float(v) <= _hi(hi) + tol

        return any(
            on_axis(x, b.x_lo, b.x_hi) and on_axis(y, b.y_lo, b.y_hi)
            for b in self.boxes
        )


def trapping_region(params: Params) -> TrapRegion:
    """The forward-invariant region every off-diagonal point enters.

    Case analysis on the parameters; the three degenerate pairs get their
    explicit regions (which there coincide with the attractor).
    """
    a, b = params.a, params.b
    one = Fraction(1)
    if params.is_a0:
        return TrapRegion(
            upper=[],
            lower=[
                Box(-one, Fraction(0), NEG_INF, -one),
                Box(Fraction(0), one, NEG_INF, Fraction(0)),
                Box(one, POS_INF, NEG_INF, one),
            ],
            case_upper="a=0",
            case_lower="a=0",
        )
    if params.is_b0:
        return TrapRegion(
            upper=[
                Box(NEG_INF, -one, -one, POS_INF),
                Box(-one, Fraction(0), Fraction(0), POS_INF),
                Box(Fraction(0), one, one, POS_INF),
            ],
            lower=[],
            case_upper="b=0",
            case_lower="b=0",
        )

    if params.cmp(b, 1) >= 0:
        upper = [
            Box(NEG_INF, -one, b - 1, POS_INF),
            Box(-one, Fraction(0), -1 / a, POS_INF),
        ]
        case_u = "b>=1"
    else:
        c1, c2 = -b / (b - 1), -1 / a
        corner = c1 if params.cmp(c1, c2) <= 0 else c2
        upper = [
            Box(NEG_INF, -one, b - 1, POS_INF),
            Box(-one, Fraction(0), corner, POS_INF),
            Box(Fraction(0), one, -1 / (b - 1), POS_INF),
        ]
        case_u = "0<b<1"

    if params.cmp(a, -1) <= 0:
        lower = [
            Box(Fraction(0), one, NEG_INF, -1 / b),
            Box(one, POS_INF, NEG_INF, a + 1),
        ]
        case_l = "a<=-1"
    else:
        c1, c2 = a / (a + 1), -1 / b
        corner = c1 if params.cmp(c1, c2) >= 0 else c2
        lower = [
            Box(-one, Fraction(0), NEG_INF, -1 / (a + 1)),
            Box(Fraction(0), one, NEG_INF, corner),
            Box(one, POS_INF, NEG_INF, a + 1),
        ]
        case_l = "a>-1"
    return TrapRegion(upper=upper, lower=lower, case_upper=case_u, case_lower=case_l)


@dataclass
class TrapResult:
    steps: Optional[int]
    final: tuple[ExtReal, ExtReal]

    @property
    def trapped(self) -> bool:
        return self.steps is not None


def time_to_trap(
    p: tuple[ExtReal, ExtReal], params: Params, cap: int = 10_000
) -> TrapResult:
    """Least n <= cap with F^n(p) in the trapping region."""
    if cap < 1:
        raise ValueError("cap >= 1")
    theta = trapping_region(params)
    cur = p
    tol = 0.0 if params.exact else params.eps
    for n in range(cap + 1):
        if theta.contains(cur[0], cur[1], tol):
            return TrapResult(n, cur)
        if n == cap:
            break
        cur = F_step(cur, params)
    return TrapResult(None, cur)


# -- vectorized float dynamics ------------------------------------------


def f_branches(params: Params) -> tuple[float, float]:
    return as_float(params.a), as_float(params.b)


def F_step_array(xs: np.ndarray, ys: np.ndarray, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """One reduction-map step on parallel coordinate arrays (floats)."""
    a, b = f_branches(params)
    below = ys < a
    mid = (~below) & (ys < b)
    up = ~(below | mid)
    nx, ny = xs.copy(), ys.copy()
    nx[below] += 1.0
    ny[below] += 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        nx[mid] = -1.0 / xs[mid]
        ny[mid] = -1.0 / ys[mid]
    nx[up] -= 1.0
    ny[up] -= 1.0
    return nx, ny


@dataclass
class Cloud:
    """Monte Carlo approximation of the attractor."""

    points: np.ndarray  # shape (n, 2)
    dropped_projective: int = 0
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.points)


def sample_attractor(
    params: Params,
    burn_in: int,
    n_points: int,
    seed: int,
    window: float = 20.0,
    diagonal_margin: float = 1e-3,
    n_chunks: int = 8,
) -> Cloud:
    """Iterate random starts burn_in times and keep the final points.

    Starts are uniform in [-window, window]^2 with |x - y| > margin.
    Chunks draw from independent streams spawned from the master seed, so
    the merged multiset does not depend on chunk evaluation order.
    """
    if burn_in < 1:
        raise ValueError("burn_in >= 1")
    if n_points == 0:
        return Cloud(np.empty((0, 2)), 0, seed)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [n_points // n_chunks] * n_chunks
    sizes[-1] += n_points - sum(sizes)
    outs = []
    dropped = 0
    for ss, size in zip(streams, sizes):
        if size == 0:
            continue
        rng = np.random.default_rng(ss)
        xs = rng.uniform(-window, window, size)
        ys = rng.uniform(-window, window, size)
        bad = np.abs(xs - ys) <= diagonal_margin
        while bad.any():
            xs[bad] = rng.uniform(-window, window, bad.sum())
            ys[bad] = rng.uniform(-window, window, bad.sum())
            bad = np.abs(xs - ys) <= diagonal_margin
        for _ in range(burn_in):
            xs, ys = F_step_array(xs, ys, params)
        ok = np.isfinite(xs) & np.isfinite(ys)
        dropped += int((~ok).sum())
        outs.append(np.column_stack([xs[ok], ys[ok]]))
    return Cloud(np.concatenate(outs), dropped, seed)


# -- the invariant measure du dw / (w - u)^2 ------------------------------


def invariant_box_measure(box: Box) -> float:
    """du dw/(w-u)^2 over an off-diagonal box, in closed form.

    For finite corners this is log((x2-y1)(x1-y2)/((x1-y1)(x2-y2))); a
    single unbounded side drops its (cancelling) terms, while a box
    unbounded toward the diagonal at both ends has infinite measure.
    """
    x1, x2, y1, y2 = box.floats()
    if not (x1 >= y2 or x2 <= y1):
        raise ValueError("box meets the diagonal")
    if (x2 == float("inf") and y1 == float("-inf")) or (
        x1 == float("-inf") and y2 == float("inf")
    ):
        return float("inf")
    val = 0.0
    for xc, sx in ((x2, 1.0), (x1, -1.0)):
        for yc, sy in ((y1, 1.0), (y2, -1.0)):
            if np.isinf(xc) or np.isinf(yc):
                continue  # log(x - y) terms at an unbounded side cancel
            val += sx * sy * log(abs(xc - yc))
    return val


def map_interval(m: Mobius, lo: Bound, hi: Bound) -> list[tuple[Bound, Bound]]:
    """Exact image of a (possibly unbounded) interval, split at the pole.

    A determinant-one map is increasing off its pole; the pole maps to
    -oo from above and +oo from below, and -oo/+oo map to a/c from above
    and below respectively.
    """
    if m.c == 0:
        # unit upper-triangular in PSL: a translation, preserves both ends
        def shift(v: Bound) -> Bound:
            return v if v is NEG_INF or v is POS_INF else m.apply(v)

        return [(shift(lo), shift(hi))]
    pole = Fraction(-m.d, m.c)
    spans = (
        [(lo, pole), (pole, hi)]
        if cmp_bound(lo, pole) < 0 and cmp_bound(pole, hi) < 0
        else [(lo, hi)]
    )
    lim = Fraction(m.a, m.c)
    out = []
    for u, v in spans:
        if u is NEG_INF:
            lo2: Bound = lim
        elif cmp_bound(u, pole) == 0:
            lo2 = NEG_INF
        else:
            lo2 = m.apply(u)
        if v is POS_INF:
            hi2: Bound = lim
        elif cmp_bound(v, pole) == 0:
            hi2 = POS_INF
        else:
            hi2 = m.apply(v)
        out.append((lo2, hi2))
    return out


def mobius_box_image(m: Mobius, box: Box) -> list[Box]:
    """Exact image of a box, split at the pole lines beforehand."""
    out = []
    for x_lo, x_hi in map_interval(m, box.x_lo, box.x_hi):
        for y_lo, y_hi in map_interval(m, box.y_lo, box.y_hi):
            out.append(Box(x_lo, x_hi, y_lo, y_hi))
    return out
