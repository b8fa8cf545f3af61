"""Numeric label codes for counting labelled paths, and their decoders.

Vertex labels become forward-encoding weights, so the counting engine returns
for each ``(u, v, l)`` a sum of per-path code products. Two schemes:

* exact: pairwise irrational-ratio codes such as ``(1, e, pi)``; the value is
  split into per-labelling multiplicities by bounded search.
* power: codes ``1, a, a^2, ...``; a labelling ``c`` maps to class
  ``sum_i i * c_i`` and the value is read off as base-``a`` digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Sequence

from .counting import Domain, WeightAssignment
from .graph import Graph, LabelAlphabet

FLOAT_MANTISSA_BITS = 52


class DecodeError(ValueError):
    pass


class NoSolution(DecodeError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class AmbiguousDecode(DecodeError):
    def __init__(self, msg, solutions):
        super().__init__(msg)
        self.solutions = solutions


class DecodeBudgetExceeded(DecodeError):
    pass


class PrecisionError(DecodeError):
    pass


class DigitOverflow(DecodeError):
    """Some class multiplicity reached the base and carried into the next digit."""


def _irrational_codes(k: int) -> tuple[float, ...]:
    base = [1.0, math.e, math.pi]
    p = 2
    while len(base) < k:
        if all(p % q for q in range(2, int(p**0.5) + 1)):
            base.append(math.sqrt(p))
        p += 1
    return tuple(base[:k])


@dataclass(frozen=True)
class CodeScheme:
    kind: str  # "exact" or "power"
    k: int
    codes: tuple
    base: int | None = None

    @classmethod
    def exact(cls, k: int, codes: Sequence[float] | None = None) -> "CodeScheme":
        codes = tuple(float(c) for c in codes) if codes is not None else _irrational_codes(k)
        if len(codes) != k:
            raise ValueError(f"{len(codes)} codes for {k} labels")
        if len(set(codes)) != k or min(codes) <= 0:
            raise ValueError("exact codes must be distinct and positive")
        return cls("exact", k, codes)

    @classmethod
    def power(cls, k: int, base: int) -> "CodeScheme":
        if base < 2:
            raise ValueError("power base must be >= 2")
        return cls("power", k, tuple(base**i for i in range(k)), base)

    def max_class(self, coded_length: int) -> int:
        return (self.k - 1) * coded_length


def class_value(labelling: Sequence[int]) -> int:
    return sum(i * c for i, c in enumerate(labelling))


def labellings_of_length(k: int, length: int) -> list[tuple[int, ...]]:
    """All multiplicity vectors of ``k`` labels summing to ``length``."""
    out = []
    for combo in combinations_with_replacement(range(k), length):
        c = [0] * k
        for i in combo:
            c[i] += 1
        out.append(tuple(c))
    return out


def make_weight_assignment(
    graph: Graph, scheme: CodeScheme, domain: Domain, alphabet: LabelAlphabet | None = None
) -> WeightAssignment:
    """Give every vertex the code of its (compact) label."""
    if alphabet is not None and alphabet.k != scheme.k:
        raise ValueError(f"scheme has k={scheme.k}, alphabet has k={alphabet.k}")
    if scheme.kind == "exact" and domain is not Domain.FLOAT64:
        raise ValueError("the exact scheme needs the float domain")
    bad = [lab for lab in graph.labels if not 0 <= lab < scheme.k]
    if bad:
        raise ValueError(f"label {bad[0]} outside [0, {scheme.k})")
    if domain is Domain.FLOAT64:
        codes = [float(c) for c in scheme.codes]
    else:
        codes = [int(c) for c in scheme.codes]
    return WeightAssignment.from_codes(graph, codes, domain)


def strip_start_code(value, start_label: int, scheme: CodeScheme):
    """Divide out the start vertex's code, leaving the internal-vertex product."""
    s = scheme.codes[start_label]
    if isinstance(value, float) or isinstance(s, float):
        return value / s
    q, r = divmod(int(value), int(s))
    if r:
        raise DecodeError(f"value {value} not divisible by start code {s}")
    return q


@dataclass
class DecodedCounts:
    counts: dict
    residual: float = 0.0
    kind: str = "power"

    def __eq__(self, other):
        if isinstance(other, DecodedCounts):
            return self.counts == other.counts
        return NotImplemented


def decode_power(
    value, base: int, max_class: int, tolerance: float = 0.1, total: int | None = None
) -> DecodedCounts:
    """Base-``base`` digits of ``value`` as ``{class: multiplicity}``.

    Float input must be an integer up to ``tolerance`` (absolute) and below
    2**53. A nonzero digit above ``max_class``, or a digit sum different from
    ``total`` (the plain path count, when given), means some multiplicity
    reached ``base`` and carried.
    """
    residual = 0.0
    if isinstance(value, float):
        if not math.isfinite(value) or abs(value) >= 2.0**53:
            raise PrecisionError(f"value {value!r} exceeds float integer precision")
        r = round(value)
        residual = abs(value - r)
        if residual > tolerance:
            raise PrecisionError(f"value {value!r} is not an integer (residual {residual:.3g})")
        value = int(r)
    value = int(value)
    if value < 0:
        raise DecodeError(f"negative coded value {value}")
    counts = {}
    c = 0
    while value:
        value, digit = divmod(value, base)
        if digit:
            if c > max_class:
                raise DigitOverflow(f"nonzero digit at class {c} > max class {max_class}")
            counts[c] = digit
        c += 1
    if total is not None and sum(counts.values()) != total:
        raise DigitOverflow(f"digits sum to {sum(counts.values())}, expected {total} paths")
    return DecodedCounts(counts, residual, "power")


def decode_exact(
    value: float,
    scheme: CodeScheme,
    coded_length: int,
    tolerance: float = 1e-6,
    total: int | None = None,
    node_budget: int | None = 2_000_000,
) -> DecodedCounts:
    """Solve ``value = sum_c m(c) prod_i s_i^c_i`` for nonnegative integers ``m``.

    Candidates are all labellings of ``coded_length``, tried in descending code
    order; each multiplicity is bounded by ``floor(remaining / code)`` and tried
    largest first. ``tolerance`` is relative to ``max(1, |value|)``. ``total``,
    when known (the plain path count), is imposed as ``sum_c m(c) = total``.
    The whole tree is searched so a second solution is reported as ambiguity.
    """
    if coded_length < 0:
        raise ValueError("coded_length must be >= 0")
    tol = tolerance * max(1.0, abs(value))
    cands = labellings_of_length(scheme.k, coded_length)
    codes = [math.prod(s**c for s, c in zip(scheme.codes, lab)) for lab in cands]
    order = sorted(range(len(cands)), key=lambda i: -codes[i])
    cands = [cands[i] for i in order]
    codes = [codes[i] for i in order]
    ncand = len(cands)
    if abs(value) <= tol and not total:
        return DecodedCounts({}, abs(value), "exact")
    if value < -tol:
        raise NoSolution(f"negative coded value {value}", abs(value))

    solutions: list[dict] = []
    best_residual = [math.inf]
    chosen = [0] * ncand
    nodes = 0

    def search(i: int, rem: float, left: int | None) -> None:
        nonlocal nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise DecodeBudgetExceeded(f"exact decode exceeded {node_budget} nodes")
        code = codes[i]
        if i == ncand - 1:
            m = round(rem / code)
            if m < 0 or (left is not None and m != left):
                return
            res = abs(rem - m * code)
            best_residual[0] = min(best_residual[0], res)
            if res <= tol:
                chosen[i] = m
                solutions.append({cands[j]: chosen[j] for j in range(ncand) if chosen[j]})
                if len(solutions) > 1:
                    raise AmbiguousDecode("coding collision", list(solutions))
            return
        nxt, last = codes[i + 1], codes[-1]
        hi = math.floor((rem + tol) / code)
        if left is not None:
            hi = min(hi, left)
        for m in range(hi, -1, -1):
            r = rem - m * code
            if left is None:
                # remainder must be ~0 or representable by the smaller codes
                if r > tol and r < last - tol:
                    continue
            else:
                lft = left - m
                if r < lft * last - tol:
                    continue
                if r > lft * nxt + tol:
                    break
            chosen[i] = m
            search(i + 1, r, None if left is None else left - m)
            chosen[i] = 0

    search(0, float(value), total)
    if not solutions:
        raise NoSolution(
            f"no labelling counts reproduce {value!r} (best residual {best_residual[0]:.3g})",
            best_residual[0],
        )
    sol = solutions[0]
    residual = abs(value - sum(m * codes[cands.index(c)] for c, m in sol.items()))
    return DecodedCounts(sol, residual, "exact")


@dataclass(frozen=True)
class BudgetReport:
    bits: float
    fits: bool
    max_count_per_class: int
    domain: Domain

    @property
    def feasible(self) -> bool:
        return self.fits or self.domain is not Domain.FLOAT64


def precision_budget(k: int, coded_length: int, base: int, domain: Domain = Domain.FLOAT64) -> BudgetReport:
    """Bits needed by the largest power code, ``(k - 1) * coded_length * log2(base)``.

    Float runs need this strictly below 52; exact integer domains always fit.
    """
    if k < 1 or base < 2:
        raise ValueError("need k >= 1 and base >= 2")
    bits = (k - 1) * coded_length * math.log2(base)
    fits = bits < FLOAT_MANTISSA_BITS if domain is Domain.FLOAT64 else True
    return BudgetReport(bits, fits, base - 1, domain)


def default_power_base(k: int, coded_length: int, domain: Domain, max_count: int = 0) -> int:
    """Largest power of two within the float budget.

    Exact domains use 64, doubled until it exceeds ``max_count`` (the largest
    plain path count to be encoded) so no class multiplicity can carry.
    """
    if domain is not Domain.FLOAT64:
        a = 64
        while a <= max_count:
            a *= 2
        return a
    per = (k - 1) * coded_length
    if per == 0:
        return 64
    bits = (FLOAT_MANTISSA_BITS - 1) // per
    if bits < 1:
        raise PrecisionError(
            f"no power base fits {FLOAT_MANTISSA_BITS} bits for k={k}, coded length {coded_length}"
        )
    return 2**bits
