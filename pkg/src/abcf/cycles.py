"""Orbits of the discontinuity points and their cycle structure.

Each endpoint carries two forward orbits: for a, the upper orbit starts
at -1/a and the lower at a+1; for b, the lower orbit starts at -1/b and
the upper at b-1.  When an orbit lands exactly on a or b it is rerouted
according to its own side: lower orbits take the branch from just below
(T at a, S at b), upper orbits the branch from just above (S at a,
T^-1 at b).  The two orbits of one endpoint either meet (a cycle, strong
when the composed word over the cycle acts as the identity), are both
eventually periodic without meeting, or remain unresolved at the cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

from .mobius import Mobius, S, T, T_INV
from .params import Params
from .scalars import ExtReal, Infinity, as_float, format_scalar, is_exact

SeedKind = Literal["a_lower", "a_upper", "b_lower", "b_upper"]

_SEEDS: dict[SeedKind, Mobius] = {
    "a_lower": T,
    "a_upper": S,
    "b_lower": S,
    "b_upper": T_INV,
}


def _step_generator(v: ExtReal, params: Params, lower: bool) -> tuple[Mobius, str]:
    """Generator applied by f at v with the rerouting convention, plus a
    hit marker ("a", "b" or "") when v sits exactly on an endpoint."""
    if isinstance(v, Infinity):
        return T_INV, ""  # inf >= b convention; fixes inf
    ca = params.cmp(v, params.a)
    if ca == 0:
        return (T if lower else S), "a"
    if ca < 0:
        return T, ""
    cb = params.cmp(v, params.b)
    if cb == 0:
        return (S if lower else T_INV), "b"
    if cb < 0:
        return S, ""
    return T_INV, ""


@dataclass
class OrbitRecord:
    """One truncated forward orbit: values, per-step generators, words.

    Transport words (seed map composed with the step generators) are
    built lazily: long unresolved orbits would otherwise accumulate
    quadratically many big matrix entries.
    """

    seed: SeedKind
    values: list[ExtReal]
    gens: list[Mobius] = field(default_factory=list)
    hit_events: list[tuple[int, str]] = field(default_factory=list)
    repeated_at: Optional[int] = None  # index whose value re-occurred
    _words: list[Mobius] = field(default_factory=list)

    @property
    def lower(self) -> bool:
        return self.seed.endswith("lower")

    def word_at(self, i: int) -> Mobius:
        while len(self._words) <= i:
            w = self.gens[len(self._words) - 1] @ self._words[-1]
            if len(w.word) > _WORD_TOKEN_LIMIT:
                w = Mobius(w.a, w.b, w.c, w.d)
            self._words.append(w)
        return self._words[i]

    def words_prefix(self, n: int) -> list[Mobius]:
        if n:
            self.word_at(n - 1)
        return self._words[:n]


def _value_key(v: ExtReal, params: Params):
    if isinstance(v, Infinity):
        return "inf"
    if is_exact(v):
        return v
    return round(as_float(v), 9)


#: generator-token history is kept only this long; beyond it the words
#: stay exact matrices with empty token tuples (avoids quadratic memory
#: on long unresolved orbits)
_WORD_TOKEN_LIMIT = 512


def orbit(params: Params, seed: SeedKind, cap: int = 100_000) -> OrbitRecord:
    """Iterate f from the seed, stopping at cap or at a state repeat."""
    if cap < 1:
        raise ValueError("cap >= 1")
    endpoint = params.a if seed.startswith("a") else params.b
    seed_map = _SEEDS[seed]
    rec = OrbitRecord(seed, [seed_map.apply(endpoint)], _words=[seed_map])
    seen = {_value_key(rec.values[0], params): 0}
    lower = rec.lower
    for _ in range(cap):
        v = rec.values[-1]
        g, hit = _step_generator(v, params, lower)
        if hit:
            rec.hit_events.append((len(rec.values) - 1, hit))
        nxt = g.apply(v)
        rec.gens.append(g)
        rec.values.append(nxt)
        k = _value_key(nxt, params)
        if k in seen:
            rec.repeated_at = seen[k]
            rec.values.pop()  # truncate at first repeat
            rec.gens.pop()
            return rec
        seen[k] = len(rec.values) - 1
    return rec


Classification = Literal["strong", "weak", "periodic_no_cycle", "undetermined"]


@dataclass
class CycleResult:
    which: Literal["a", "b"]
    classification: Classification
    end: Optional[ExtReal] = None
    upper_steps: Optional[int] = None  # m in the (m, k) of the cycle
    lower_steps: Optional[int] = None
    upper_side: list[ExtReal] = field(default_factory=list)
    lower_side: list[ExtReal] = field(default_factory=list)
    upper_words: list[Mobius] = field(default_factory=list)
    lower_words: list[Mobius] = field(default_factory=list)
    end_word_upper: Optional[Mobius] = None
    end_word_lower: Optional[Mobius] = None
    cycle_word: Optional[Mobius] = None
    approximate: bool = False
    upper_orbit: Optional[OrbitRecord] = None
    lower_orbit: Optional[OrbitRecord] = None

    @property
    def has_cycle(self) -> bool:
        return self.classification in ("strong", "weak")

    def to_json(self) -> dict:
        return {
            "which": self.which,
            "classification": self.classification,
            "end_value": None if self.end is None else format_scalar(self.end),
            "end_float": None if self.end is None else as_float(self.end),
            "side_lengths": [self.upper_steps, self.lower_steps],
            "word": self.cycle_word.word_str() if self.cycle_word else None,
            "approximate": self.approximate,
        }


def cycle_strength(upper_word: Mobius, lower_word: Mobius) -> Classification:
    """Strong iff the two transported words agree as transformations."""
    return "strong" if upper_word.psl_eq(lower_word) else "weak"


def detect_cycle(params: Params, which: Literal["a", "b"], cap: int = 100_000) -> CycleResult:
    """Advance the two orbits of one endpoint in lockstep until they meet,
    both close up without meeting, or the cap is reached."""
    if cap < 1:
        raise ValueError("cap >= 1")
    lo = orbit(params, f"{which}_lower", cap)
    up = orbit(params, f"{which}_upper", cap)

    lo_index = {_value_key(v, params): i for i, v in enumerate(lo.values)}
    meet: Optional[tuple[int, int]] = None  # (upper index, lower index)
    for j, v in enumerate(up.values):
        k = _value_key(v, params)
        if k in lo_index:
            i = lo_index[k]
            if meet is None or max(j, i) < max(meet):
                meet = (j, i)
    if meet is not None:
        j, i = meet
        end = up.values[j]
        upper_word, lower_word = up.word_at(j), lo.word_at(i)
        if params.exact:
            cls = cycle_strength(upper_word, lower_word)
        else:
            cls = "undetermined"
        return CycleResult(
            which,
            cls,
            end=end,
            upper_steps=j,
            lower_steps=i,
            upper_side=up.values[:j],
            lower_side=lo.values[:i],
            upper_words=up.words_prefix(j),
            lower_words=lo.words_prefix(i),
            end_word_upper=upper_word,
            end_word_lower=lower_word,
            cycle_word=lower_word.inverse() @ upper_word,
            approximate=not params.exact,
            upper_orbit=up,
            lower_orbit=lo,
        )
    if lo.repeated_at is not None and up.repeated_at is not None:
        return CycleResult(
            which,
            "periodic_no_cycle",
            upper_side=up.values,
            lower_side=lo.values,
            upper_words=up.words_prefix(len(up.values)),
            lower_words=lo.words_prefix(len(lo.values)),
            approximate=not params.exact,
            upper_orbit=up,
            lower_orbit=lo,
        )
    return CycleResult(
        which,
        "undetermined",
        approximate=not params.exact,
        upper_orbit=up,
        lower_orbit=lo,
    )


@dataclass
class TruncatedOrbits:
    """The level data (value, transport word) of the four truncated orbits."""

    la: list[tuple[ExtReal, Mobius]]
    ua: list[tuple[ExtReal, Mobius]]
    lb: list[tuple[ExtReal, Mobius]]
    ub: list[tuple[ExtReal, Mobius]]
    finite: bool
    cycle_a: CycleResult
    cycle_b: CycleResult

    def all_lower_values(self) -> list[ExtReal]:
        return [v for v, _ in self.la] + [v for v, _ in self.lb]

    def all_upper_values(self) -> list[ExtReal]:
        return [v for v, _ in self.ua] + [v for v, _ in self.ub]


def _truncate_side(
    res: CycleResult, side: Literal["upper", "lower"]
) -> list[tuple[ExtReal, Mobius]]:
    values = res.upper_side if side == "upper" else res.lower_side
    words = res.upper_words if side == "upper" else res.lower_words
    out = list(zip(values, words))
    if res.classification == "weak":
        end_word = res.end_word_upper if side == "upper" else res.end_word_lower
        out.append((res.end, end_word))  # weak cycles end at 0; keep it
    return out


def truncated_orbits(params: Params, cap: int = 100_000) -> TruncatedOrbits:
    """Cycle sides (plus 0 for weak cycles), or eventually periodic orbits
    truncated at the first repeat; finiteness fails when a cycle is
    unresolved at the cap."""
    ca = detect_cycle(params, "a", cap)
    cb = detect_cycle(params, "b", cap)
    finite = ca.classification != "undetermined" and cb.classification != "undetermined"

    def sides(res: CycleResult):
        if res.classification in ("strong", "weak"):
            return _truncate_side(res, "lower"), _truncate_side(res, "upper")
        if res.classification == "periodic_no_cycle":
            lo, up = res.lower_orbit, res.upper_orbit
            return (
                list(zip(lo.values, lo.words_prefix(len(lo.values)))),
                list(zip(up.values, up.words_prefix(len(up.values)))),
            )
        return [], []

    la, ua = sides(ca)
    lb, ub = sides(cb)
    return TruncatedOrbits(la=la, ua=ua, lb=lb, ub=ub, finite=finite, cycle_a=ca, cycle_b=cb)


@dataclass
class FinitenessReport:
    finite: bool
    failed_endpoint: Optional[str] = None
    digit_values: Optional[list[int]] = None

    def __bool__(self) -> bool:
        return self.finite


def finiteness_check(params: Params, cap: int = 100_000) -> FinitenessReport:
    """Finite iff all four truncated orbits resolve below the cap.

    For a suspect (unresolved) endpoint, reports the distinct digit values
    seen in its expansion; exceptional parameters show two consecutive
    values.
    """
    tro = truncated_orbits(params, cap)
    if tro.finite:
        return FinitenessReport(True)
    from .cf import expand

    failed = "a" if tro.cycle_a.classification == "undetermined" else "b"
    endpoint = params.a if failed == "a" else params.b
    seed = S.apply(endpoint)
    exp = expand(seed, params, max_digits=60)
    pattern = sorted(set(exp.digits[1:])) if len(exp.digits) > 1 else sorted(set(exp.digits))
    return FinitenessReport(False, failed_endpoint=failed, digit_values=pattern)
