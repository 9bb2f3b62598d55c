"""Invariant measures and entropy for the Gauss-like first-return map.

Covers the parameter region where 1 <= -1/a <= b+1 and a-1 <= -1/b <= -1.
There the compactified natural-extension domain is a union of four boxes,
the two-dimensional invariant density is 1/(C (1+xy)^2) with
C = log[(1+b)(1-a)], its x-marginal is an explicit sum of four
1/(linear) terms, and the entropy of the one-dimensional map is
pi^2/(3 C) - checked independently through Rokhlin's formula
h = -2 int log|x| dmu, whose integrand has an integrable logarithmic
singularity at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .cf import digit_ab, f_hat_step
from .params import Params
from .scalars import as_float


@dataclass(frozen=True)
class HatBox:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    @property
    def area(self) -> float:
        return max(0.0, self.x_hi - self.x_lo) * max(0.0, self.y_hi - self.y_lo)


def simple_case_applies(params: Params) -> bool:
    """1 <= -1/a <= b+1 and a-1 <= -1/b <= -1 (false when a or b is 0)."""
    if params.is_a0 or params.is_b0:
        return False
    a, b = params.a, params.b
    sa = -1 / a
    sb = -1 / b
    return (
        params.cmp_num(sa, 1) >= 0
        and params.cmp_num(sa, b + 1) <= 0
        and params.cmp_num(sb, a - 1) >= 0
        and params.cmp_num(sb, -1) <= 0
    )


@dataclass
class HatDomain:
    """The four-box domain of the compactified natural extension."""

    params: Params
    boxes: list[HatBox]

    @property
    def norm_const(self) -> float:
        a, b = as_float(self.params.a), as_float(self.params.b)
        return math.log((1 + b) * (1 - a))

    def contains(self, x: float, y: float, tol: float = 1e-12) -> bool:
        return any(
            b.x_lo - tol <= x <= b.x_hi + tol and b.y_lo - tol <= y <= b.y_hi + tol
            for b in self.boxes
        )


def hat_domain(params: Params) -> HatDomain:
    if not simple_case_applies(params):
        raise ValueError("parameters outside the simple four-box case")
    a, b = as_float(params.a), as_float(params.b)
    boxes = [
        HatBox(a, -1 / b + 1, -1.0, 0.0),
        HatBox(-1 / b + 1, a + 1, -0.5, 0.0),
        HatBox(b - 1, -1 / a - 1, 0.0, 0.5),
        HatBox(-1 / a - 1, b, 0.0, 1.0),
    ]
    return HatDomain(params, [bx for bx in boxes if bx.area > 0])


def F_hat_step(p: tuple[float, float], params: Params) -> tuple[float, float]:
    """(x, y) -> (fhat(x), -1/(y - digit(-1/x))); the fixed point x = 0 is
    returned unchanged (termination convention, measure zero)."""
    x, y = p
    if params.cmp_num(x, params.a) < 0 or params.cmp_num(x, params.b) >= 0:
        raise ValueError(f"x = {x} outside [a, b)")
    if params.eq(x, 0):
        return (x, y)
    n = digit_ab(-1 / x, params)
    nx, _ = f_hat_step(x, params)
    return (nx, -1 / (y - n))


def nu_density(x: float, y: float, params: Params) -> float:
    dom = hat_domain(params)
    if not dom.contains(x, y):
        return 0.0
    return 1.0 / (dom.norm_const * (1.0 + x * y) ** 2)


def _mu_terms(params: Params) -> list[tuple[float, float, Callable[[float], float]]]:
    a, b = as_float(params.a), as_float(params.b)
    return [
        (a, -1 / b + 1, lambda x: 1.0 / (1.0 - x)),
        (-1 / b + 1, a + 1, lambda x: 1.0 / (2.0 - x)),
        (b - 1, -1 / a - 1, lambda x: 1.0 / (x + 2.0)),
        (-1 / a - 1, b, lambda x: 1.0 / (x + 1.0)),
    ]


def mu_density(x: float, params: Params) -> float:
    c = math.log((1 + as_float(params.b)) * (1 - as_float(params.a)))
    val = 0.0
    for lo, hi, w in _mu_terms(params):
        if lo <= x <= hi:
            val += w(x)
    return val / c


def _box_nu_integral(box: HatBox) -> float:
    """Closed form of the unnormalized mass of 1/(1+xy)^2 over a box."""
    x1, x2, y1, y2 = box.x_lo, box.x_hi, box.y_lo, box.y_hi
    return math.log(
        ((1 + x1 * y1) * (1 + x2 * y2)) / ((1 + x2 * y1) * (1 + x1 * y2))
    )


def nu_mass(params: Params) -> float:
    dom = hat_domain(params)
    return sum(_box_nu_integral(b) for b in dom.boxes) / dom.norm_const


def mu_mass(params: Params, tol: float = 1e-10) -> float:
    c = math.log((1 + as_float(params.b)) * (1 - as_float(params.a)))
    total = 0.0
    for lo, hi, w in _mu_terms(params):
        if hi > lo:
            v, _ = quad(w, lo, hi, epsabs=tol, epsrel=tol)
            total += v
    return total / c


def mu_cdf(x: float, params: Params) -> float:
    """Exact piecewise-log distribution function of the x-marginal."""
    c = math.log((1 + as_float(params.b)) * (1 - as_float(params.a)))
    anti = [
        lambda t: -math.log(1.0 - t),
        lambda t: -math.log(2.0 - t),
        lambda t: math.log(t + 2.0),
        lambda t: math.log(t + 1.0),
    ]
    total = 0.0
    for (lo, hi, _), F in zip(_mu_terms(params), anti):
        u = min(max(x, lo), hi)
        if u > lo:
            total += F(u) - F(lo)
    return total / c


def nu_y_cdf(y: float, params: Params) -> float:
    """Distribution function of the y-marginal of the 2D density."""
    dom = hat_domain(params)
    total = 0.0
    for b in dom.boxes:
        yy = min(max(y, b.y_lo), b.y_hi)
        if yy > b.y_lo:
            total += _box_nu_integral(HatBox(b.x_lo, b.x_hi, b.y_lo, yy))
    return total / dom.norm_const


# -- sampling and the invariance statistic --------------------------------


def sample_nu(params: Params, n: int, seed: int) -> np.ndarray:
    """Rejection-sample the invariant 2D density box by box."""
    dom = hat_domain(params)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    areas = np.array([b.area for b in dom.boxes])
    weights = areas / areas.sum()
    # the density 1/(1+xy)^2 is monotone along box edges, so its maximum
    # over the closed domain sits at a box corner
    dens_max = max(
        1.0 / (1.0 + xc * yc) ** 2
        for b in dom.boxes
        for xc in (b.x_lo, b.x_hi)
        for yc in (b.y_lo, b.y_hi)
    )
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        m = max(4096, 2 * (n - filled))
        picks = rng.choice(len(dom.boxes), size=m, p=weights)
        xs = np.empty(m)
        ys = np.empty(m)
        for i, b in enumerate(dom.boxes):
            sel = picks == i
            k = int(sel.sum())
            xs[sel] = rng.uniform(b.x_lo, b.x_hi, k)
            ys[sel] = rng.uniform(b.y_lo, b.y_hi, k)
        dens = 1.0 / (1.0 + xs * ys) ** 2
        accept = rng.uniform(0, 1, m) * dens_max <= dens
        take = min(n - filled, int(accept.sum()))
        out[filled : filled + take, 0] = xs[accept][:take]
        out[filled : filled + take, 1] = ys[accept][:take]
        filled += take
    return out


def _digit_array(xs: np.ndarray, params: Params) -> np.ndarray:
    """Vectorized generalized integer part of -1/x."""
    a, b = as_float(params.a), as_float(params.b)
    with np.errstate(divide="ignore"):
        ys = -1.0 / xs
    n = np.zeros(len(xs), dtype=np.int64)
    below = ys < a
    n[below] = np.floor(ys[below] - a)
    above = ys >= b
    n[above] = np.floor(ys[above] - b) + 1
    return n


def F_hat_array(xs: np.ndarray, ys: np.ndarray, params: Params) -> tuple[np.ndarray, np.ndarray]:
    n = _digit_array(xs, params)
    with np.errstate(divide="ignore", invalid="ignore"):
        nx = -1.0 / xs - n
        ny = -1.0 / (ys - n)
    keep = xs != 0.0
    nx[~keep] = 0.0
    ny[~keep] = ys[~keep]
    return nx, ny


def invariance_check(params: Params, n_points: int, seed: int) -> float:
    """KS-style sup discrepancy between the one-step pushforward of an
    invariant sample and the exact marginal distribution functions."""
    if n_points == 0:
        return float("nan")
    pts = sample_nu(params, n_points, seed)
    xs, ys = F_hat_array(pts[:, 0], pts[:, 1], params)

    xs_sorted = np.sort(xs)
    ref = np.array([mu_cdf(v, params) for v in _cdf_grid(xs_sorted)])
    emp = np.searchsorted(xs_sorted, _cdf_grid(xs_sorted), side="right") / len(xs_sorted)
    ks_x = float(np.abs(emp - ref).max())

    ys_sorted = np.sort(ys)
    ref_y = np.array([nu_y_cdf(v, params) for v in _cdf_grid(ys_sorted)])
    emp_y = np.searchsorted(ys_sorted, _cdf_grid(ys_sorted), side="right") / len(ys_sorted)
    ks_y = float(np.abs(emp_y - ref_y).max())
    return max(ks_x, ks_y)


def _cdf_grid(sorted_vals: np.ndarray, k: int = 512) -> np.ndarray:
    lo, hi = sorted_vals[0], sorted_vals[-1]
    return np.linspace(lo, hi, k)


# -- entropy ----------------------------------------------------------------


def _int_log_weight(lo: float, hi: float, w: Callable[[float], float], tol: float) -> float:
    """int_lo^hi log|x| w(x) dx with the log singularity at 0 split off.

    On the tip adjacent to 0 the integral of w(0) log|x| is analytic and
    the remainder (w(x) - w(0)) log|x| is continuous, so plain adaptive
    quadrature converges.
    """
    if hi <= lo:
        return 0.0

    def f(x: float) -> float:
        return math.log(abs(x)) * w(x)

    if lo >= 0 or hi <= 0:
        ends = sorted((abs(lo), abs(hi)))
        if ends[0] > 0:
            v, _ = quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=200)
            return v
        # one endpoint at 0: subtract w(0) log|x|
        w0 = w(0.0)
        e = ends[1]

        def g(x: float) -> float:
            return (w(x) - w0) * math.log(abs(x)) if x != 0 else 0.0

        v, _ = quad(g, lo, hi, epsabs=tol, epsrel=tol, limit=200)
        return v + w0 * e * (math.log(e) - 1.0)
    return _int_log_weight(lo, 0.0, w, tol) + _int_log_weight(0.0, hi, w, tol)


def rokhlin_integral(params: Params, tol: float = 1e-12) -> float:
    """I(a,b): the sum of the four log-weighted integrals (equals -pi^2/6)."""
    return sum(_int_log_weight(lo, hi, w, tol) for lo, hi, w in _mu_terms(params))


def entropy_rokhlin(params: Params, tol: float = 1e-12) -> float:
    c = math.log((1 + as_float(params.b)) * (1 - as_float(params.a)))
    return -2.0 * rokhlin_integral(params, tol) / c


def entropy_closed(params: Params) -> float:
    a, b = as_float(params.a), as_float(params.b)
    return math.pi**2 / (3.0 * math.log((1 - a) * (1 + b)))


def birkhoff_average(
    params: Params,
    observable: Callable[[np.ndarray], np.ndarray],
    n_steps: int,
    seed: int,
    x0: Optional[float] = None,
) -> float:
    """Time average of an observable along one first-return orbit."""
    rng = np.random.default_rng(seed)
    a, b = as_float(params.a), as_float(params.b)
    x = x0 if x0 is not None else rng.uniform(a, b)
    total = 0.0
    xs = np.empty(n_steps)
    for i in range(n_steps):
        xs[i] = x
        y = -1.0 / x
        n = digit_ab(y, params)
        x = y - n
        if x == 0 or not math.isfinite(x):
            x = rng.uniform(a, b)  # rational escape; restart (measure zero)
    return float(np.mean(observable(xs)))


def measures_report(params: Params, n_points: int = 1_000_000, seed: int = 7) -> dict:
    return {
        "C": math.log((1 + as_float(params.b)) * (1 - as_float(params.a))),
        "nu_mass": nu_mass(params),
        "mu_mass": mu_mass(params),
        "h_closed": entropy_closed(params),
        "h_rokhlin": entropy_rokhlin(params),
        "I_ab": rokhlin_integral(params),
        "ks_stat": invariance_check(params, n_points, seed),
    }
