"""Recursive construction of the exceptional parameters on b = a + 1.

Parameter triangles are indexed by digit sequences over {m, m+1}: each
prefix ending in m contributes a lower constraint on b (its base, where
the word maps b to b/(b+1)) and each prefix ending in m+1 an upper one
(its vertex, a periodic point of the word), and the triangle is the
surviving interval between the binding constraints.  Admissible
sequences are generated by the two-block substitution
A -> A..AB / B -> A..AB (first kind) or A -> AB..B / B -> AB..B (second
kind); every such sequence keeps all its triangles nonempty and nested,
and aperiodic substitution plans squeeze the bases to a single parameter
pair that violates the finiteness condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence

from .cf import evaluate_minus_cf
from .scalars import (
    Scalar,
    as_float,
    bounds,
    cmp_exact,
    format_scalar,
    midpoint_rational,
)

Case = Literal["case1", "case2"]


def vertex_value(seq: Sequence[int]) -> Scalar:
    """b with f^seq(b) = b: the value (0, overline(-seq))."""
    return evaluate_minus_cf([0], [-n for n in seq])


def base_value(seq: Sequence[int], m: int) -> Scalar:
    """b with f^seq(b) = b/(b+1): the value (0, -n1, overline(-n2.., -(m+1)))."""
    return evaluate_minus_cf([0, -seq[0]], [-n for n in seq[1:]] + [-(m + 1)])


@dataclass(frozen=True)
class TriangleRegion:
    m: int
    seq: tuple[int, ...]
    b_lo: Scalar  # horizontal base height
    b_hi: Scalar  # vertex height
    empty: bool

    @property
    def width(self) -> float:
        """Certified upper bound on b_hi - b_lo (0.0 once below float range)."""
        if self.empty:
            return 0.0
        lo = bounds(self.b_lo, 96)
        hi = bounds(self.b_hi, 96)
        return float(hi[1] - lo[0])

    def contains_b(self, b: Scalar) -> bool:
        return cmp_exact(self.b_lo, b) <= 0 and cmp_exact(b, self.b_hi) <= 0

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "seq": list(self.seq),
            "b_lo": format_scalar(self.b_lo),
            "b_hi": format_scalar(self.b_hi),
            "b_lo_float": as_float(self.b_lo),
            "b_hi_float": as_float(self.b_hi),
            "empty": self.empty,
        }


def triangle_region(m: int, seq: Sequence[int]) -> TriangleRegion:
    """The cumulative parameter triangle of a digit sequence.

    Every prefix ending in an m digit contributes a lower constraint on b
    (the base of its one-step region) and every prefix ending in m+1 an
    upper constraint (its vertex); the cumulative triangle's b-interval
    is [max of the bases, min of the vertices], empty when they cross.
    """
    if m < 3:
        raise ValueError("m >= 3")
    seq = tuple(seq)
    if not seq or seq[0] != m:
        raise ValueError(f"sequence must start with m = {m}")
    if any(n not in (m, m + 1) for n in seq):
        raise ValueError(f"digits must lie in {{{m}, {m + 1}}}")
    lo = None
    hi = None
    for i, n in enumerate(seq):
        if n == m:
            cand = base_value(seq[: i + 1], m)
            if lo is None or cmp_exact(cand, lo) > 0:
                lo = cand
        else:
            cand = vertex_value(seq[: i + 1])
            if hi is None or cmp_exact(cand, hi) < 0:
                hi = cand
    if hi is None:
        hi = vertex_value((m,))
    return TriangleRegion(m, seq, lo, hi, empty=cmp_exact(lo, hi) >= 0)


@dataclass(frozen=True)
class Block:
    seq: tuple[int, ...]
    role: Literal["A", "B"]
    gen: int

    def __len__(self) -> int:
        return len(self.seq)


@dataclass
class SubstitutionScheme:
    """State of the block substitution at one generation."""

    m: int
    A: Block
    B: Block
    sigma: Optional[tuple[int, ...]] = None
    case_tag: Optional[Case] = None  # how the current A was built
    gen: int = 0
    history: list[tuple[Case, int]] = field(default_factory=list)
    prev_A: Optional[Block] = None
    prev_B: Optional[Block] = None

    @staticmethod
    def initial(m: int) -> "SubstitutionScheme":
        if m < 3:
            raise ValueError("m >= 3")
        return SubstitutionScheme(
            m, Block((m,), "A", 0), Block((m + 1,), "B", 0)
        )

    def triangle(self) -> TriangleRegion:
        """Exact bounds of the generation's triangle in closed form:
        vertex (0, overline(A)), base (0, A, overline(B)) with the
        current blocks for first-kind generations and the previous ones
        for second-kind generations."""
        if self.gen == 0:
            lo = base_value(self.A.seq, self.m)
        elif self.case_tag == "case1":
            lo = -evaluate_minus_cf([0, *self.A.seq], list(self.B.seq))
        else:
            lo = -evaluate_minus_cf([0, *self.prev_A.seq], list(self.prev_B.seq))
        hi = vertex_value(self.A.seq)
        return TriangleRegion(
            self.m, self.A.seq, lo, hi, empty=cmp_exact(lo, hi) >= 0
        )


def substitution_step(
    scheme: SubstitutionScheme, next_case: Case, multiplicity: int
) -> SubstitutionScheme:
    """Generation n -> n+1 blocks and the new starting block sigma."""
    if next_case == "case1" and multiplicity < 2:
        raise ValueError("first-kind steps need multiplicity >= 2")
    if next_case == "case2" and multiplicity < 1:
        raise ValueError("second-kind steps need multiplicity >= 1")
    A, B, m = scheme.A, scheme.B, scheme.m
    if next_case == "case1":
        newA = Block(A.seq * multiplicity + B.seq, "A", scheme.gen + 1)
        newB = Block(A.seq * (multiplicity - 1) + B.seq, "B", scheme.gen + 1)
    else:
        newA = Block(A.seq + B.seq * multiplicity, "A", scheme.gen + 1)
        newB = Block(A.seq + B.seq * (multiplicity + 1), "B", scheme.gen + 1)

    if scheme.gen == 0:
        sigma = (m,) * multiplicity if next_case == "case1" else (m,)
    elif scheme.case_tag == "case1":
        sigma = (
            A.seq * (multiplicity - 1) + scheme.sigma
            if next_case == "case1"
            else scheme.sigma
        )
    else:
        sigma = (
            A.seq * multiplicity + scheme.sigma
            if next_case == "case1"
            else A.seq + scheme.sigma
        )

    return SubstitutionScheme(
        m=m,
        A=newA,
        B=newB,
        sigma=sigma,
        case_tag=next_case,
        gen=scheme.gen + 1,
        history=scheme.history + [(next_case, multiplicity)],
        prev_A=A,
        prev_B=B,
    )


def run_plan(m: int, plan: Sequence[tuple[Case, int]], depth: Optional[int] = None) -> list[SubstitutionScheme]:
    """Schemes of generations 0..depth (inclusive) along a plan."""
    if depth is None:
        depth = len(plan)
    if depth > len(plan):
        raise ValueError("plan exhausted")
    out = [SubstitutionScheme.initial(m)]
    for case, mult in plan[:depth]:
        out.append(substitution_step(out[-1], case, mult))
    return out


def admissible_prefix(
    m: int,
    plan: Sequence[tuple[Case, int]],
    depth: int,
    check_prefixes: bool = False,
) -> tuple[int, ...]:
    """Digit prefix A^(depth) of the sequence encoded by a plan.

    With check_prefixes, asserts that the triangle of every prefix of the
    emitted digits is nonempty (they nest, so this certifies the chain).
    """
    schemes = run_plan(m, plan, depth)
    prefix = schemes[-1].A.seq
    if check_prefixes:
        for j in range(1, len(prefix) + 1):
            if triangle_region(m, prefix[:j]).empty:
                raise AssertionError(f"empty prefix triangle at {prefix[:j]}")
    return prefix


def base_length(scheme: SubstitutionScheme) -> Scalar:
    """Length of the lower base of the generation's triangle.

    First-kind generations use the current blocks, second-kind ones the
    previous generation's blocks.
    """
    if scheme.gen == 0:
        A, B = scheme.A.seq, scheme.B.seq
    elif scheme.case_tag == "case1":
        A, B = scheme.A.seq, scheme.B.seq
    else:
        A, B = scheme.prev_A.seq, scheme.prev_B.seq
    right = evaluate_minus_cf([0], list(B))
    left = evaluate_minus_cf([0, *A], list(B))
    return right - left


def sigma_word_check(scheme: SubstitutionScheme) -> bool:
    """f^sigma(b_lo) == b_lo/(b_lo + 1), exactly."""
    if scheme.sigma is None:
        return True
    from .mobius import minus_cf_matrix

    tri = scheme.triangle()
    if tri.empty:
        return False
    b = tri.b_lo
    # f^sigma = T^{s_k} S ... T^{s_1} S: reversed digit order vs the CF matrix
    word = minus_cf_matrix(list(reversed(scheme.sigma)))
    lhs = word.apply(b)
    rhs = b / (b + 1)
    return cmp_exact(lhs, rhs) == 0


@dataclass
class Enclosure:
    m: int
    b_lo: Scalar
    b_hi: Scalar
    b_mid: Fraction
    width: float
    base_len: float
    digits_prefix: tuple[int, ...]
    generations: int

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "b_lo": as_float(self.b_lo),
            "b_hi": as_float(self.b_hi),
            "b": str(self.b_mid),
            "b_float": float(self.b_mid),
            "width": self.width,
            "base_length": self.base_len,
            "digits_prefix": list(self.digits_prefix[:64]),
            "generations": self.generations,
        }


def exceptional_b(
    m: int,
    plan: Sequence[tuple[Case, int]],
    target_width: float,
) -> Enclosure:
    """Shrink the triangle bases below target_width along a plan.

    Returns the midpoint of the final enclosure as a rational b; the pair
    (b - 1, b) then shadows the aperiodic digit pattern and fails the
    finiteness check at caps shorter than the shadowing length.
    """
    scheme = SubstitutionScheme.initial(m)
    for case, mult in plan:
        scheme = substitution_step(scheme, case, mult)
        tri = scheme.triangle()
        if tri.empty:
            raise AssertionError(f"plan produced an empty triangle at gen {scheme.gen}")
        L = base_length(scheme)
        L_f = float(bounds(L, 96)[1])
        if L_f < target_width:
            mid = midpoint_rational(tri.b_lo, tri.b_hi)
            return Enclosure(
                m,
                tri.b_lo,
                tri.b_hi,
                mid,
                tri.width,
                L_f,
                scheme.A.seq,
                scheme.gen,
            )
    raise ValueError(f"target width {target_width} not reached within the plan")


def parse_plan(text: str) -> tuple[int, list[tuple[Case, int]]]:
    """Parse "m=3;1x2,1x2,2x1" into (m, [(case1,2),(case1,2),(case2,1)])."""
    head, _, rest = text.partition(";")
    if not head.startswith("m="):
        raise ValueError(f"plan must start with m=<int>: {text!r}")
    m = int(head[2:])
    plan: list[tuple[Case, int]] = []
    if rest:
        for item in rest.split(","):
            kind, _, mult = item.partition("x")
            if kind not in ("1", "2"):
                raise ValueError(f"bad case tag in {item!r}")
            plan.append(("case1" if kind == "1" else "case2", int(mult)))
    return m, plan
