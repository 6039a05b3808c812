"""Plausibility regions: set representation, threshold extraction, JSON wire format.

A region is a finite union of disjoint intervals over the parameter support.
Extraction finds the superlevel set {psi : curve(psi) > alpha} of a
plausibility curve, using bracketing bisection outward from the mode for
curves declared unimodal and delegating to a closed form when the curve
carries one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import SearchError

__all__ = [
    "Piece",
    "Region",
    "SearchConfig",
    "PlausibilityCurve",
    "extract_region",
]

_INF = math.inf


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for region extraction: endpoint tolerance (in parameter units),
    bracket doublings allowed, and the grid used for the mode sanity scan."""

    tol: float = 1e-9
    max_expand: int = 60
    grid: int = 512

    def __post_init__(self):
        if not (self.tol > 0.0):
            raise ValueError("tol must be positive")
        if self.max_expand < 1:
            raise ValueError("max_expand must be at least 1")
        if self.grid < 8:
            raise ValueError("grid must be at least 8")


DEFAULT_SEARCH = SearchConfig()


@dataclass(frozen=True)
class Piece:
    """One interval of a region; lo/hi may be +-inf, open flags track
    whether the endpoint itself is excluded."""

    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("piece endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError("piece must have lo <= hi")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise ValueError("a degenerate piece must be closed on both sides")
        if math.isinf(self.lo) and not self.lo_open:
            raise ValueError("an infinite endpoint must be open")
        if math.isinf(self.hi) and not self.hi_open:
            raise ValueError("an infinite endpoint must be open")

    def contains(self, x: float) -> bool:
        above = x > self.lo or (x == self.lo and not self.lo_open)
        below = x < self.hi or (x == self.hi and not self.hi_open)
        return above and below

    def contains_interval(self, lo: float, hi: float) -> bool:
        """Whether the closed interval [lo, hi] sits inside this piece."""
        above = lo > self.lo or (lo == self.lo and not self.lo_open)
        below = hi < self.hi or (hi == self.hi and not self.hi_open)
        return above and below

    def intersects_interval(self, lo: float, hi: float) -> bool:
        """Whether the closed interval [lo, hi] meets this piece."""
        if hi < self.lo or (hi == self.lo and self.lo_open):
            return False
        if lo > self.hi or (lo == self.hi and self.hi_open):
            return False
        return True

    def length(self) -> float:
        return self.hi - self.lo

    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def _classify(pieces: tuple[Piece, ...]) -> str:
    if len(pieces) == 0:
        return "empty"
    if len(pieces) == 1:
        p = pieces[0]
        if math.isinf(p.lo) and math.isinf(p.hi):
            return "whole_line"
        return "interval"
    if (
        len(pieces) == 2
        and math.isinf(pieces[0].lo)
        and math.isfinite(pieces[0].hi)
        and math.isfinite(pieces[1].lo)
        and math.isinf(pieces[1].hi)
    ):
        return "two_rays"
    return "union"


@dataclass(frozen=True)
class Region:
    """A finite union of disjoint intervals, sorted by lower endpoint, with
    its shape recorded explicitly."""

    pieces: tuple[Piece, ...]
    shape: str = field(default="", compare=False)

    def __post_init__(self):
        pieces = tuple(self.pieces)
        for a, b in zip(pieces, pieces[1:]):
            if b.lo < a.hi or (b.lo == a.hi and not (a.hi_open or b.lo_open)):
                raise ValueError("region pieces must be disjoint and sorted")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "shape", _classify(pieces))

    @staticmethod
    def empty() -> "Region":
        return Region(())

    @staticmethod
    def interval(lo: float, hi: float, lo_open: bool = True, hi_open: bool = True) -> "Region":
        return Region((Piece(lo, hi, lo_open, hi_open),))

    def contains(self, x: float) -> bool:
        return any(p.contains(x) for p in self.pieces)

    def contains_interval(self, lo: float, hi: float) -> bool:
        # A connected interval fits in the union iff it fits in one piece.
        return any(p.contains_interval(lo, hi) for p in self.pieces)

    def intersects_interval(self, lo: float, hi: float) -> bool:
        return any(p.intersects_interval(lo, hi) for p in self.pieces)

    def is_bounded(self) -> bool:
        return all(p.is_bounded() for p in self.pieces)

    def total_length(self) -> float:
        return sum(p.length() for p in self.pieces)

    def complement(self, support_lo: float = -_INF, support_hi: float = _INF,
                   lo_closed: bool = False, hi_closed: bool = False) -> "Region":
        """Complement within [support_lo, support_hi]; endpoint openness flips."""
        out: list[Piece] = []
        cursor = support_lo
        cursor_open = not lo_closed
        for p in self.pieces:
            if p.lo > cursor or (p.lo == cursor and p.lo_open and not cursor_open):
                out.append(Piece(cursor, p.lo, cursor_open, not p.lo_open))
            cursor = p.hi
            cursor_open = not p.hi_open
        if cursor < support_hi or (cursor == support_hi and not cursor_open and hi_closed):
            if cursor == support_hi:
                out.append(Piece(cursor, cursor, False, False))
            else:
                out.append(Piece(cursor, support_hi, cursor_open, not hi_closed))
        return Region(tuple(out))

    def to_json_dict(self) -> dict:
        def enc(v: float) -> float | str:
            if v == _INF:
                return "+inf"
            if v == -_INF:
                return "-inf"
            return v

        return {
            "shape": self.shape,
            "pieces": [
                {"lo": enc(p.lo), "hi": enc(p.hi), "lo_open": p.lo_open, "hi_open": p.hi_open}
                for p in self.pieces
            ],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "Region":
        def dec(v) -> float:
            if v == "+inf":
                return _INF
            if v == "-inf":
                return -_INF
            return float(v)

        pieces = tuple(
            Piece(dec(p["lo"]), dec(p["hi"]), bool(p["lo_open"]), bool(p["hi_open"]))
            for p in obj["pieces"]
        )
        return Region(pieces)


@dataclass(frozen=True)
class PlausibilityCurve:
    """A scalar map psi -> marginal plausibility in [0, 1] over a support
    interval.

    mode is any point where the curve attains its maximum (used to seed the
    outward search); region_fn, when present, is a closed-form region
    extractor that takes precedence over the generic search (used by curves
    that are not unimodal, like the ratio-of-means curve).
    """

    fn: Callable[[float], float]
    support: tuple[float, float] = (-_INF, _INF)
    lo_closed: bool = False
    hi_closed: bool = False
    mode: float | None = None
    region_fn: Callable[[float], Region] | None = None
    label: str = ""

    def __call__(self, psi: float) -> float:
        return float(self.fn(psi))


def _bisect_crossing(fn, alpha: float, inside: float, outside: float, tol: float) -> float:
    """Boundary of {fn > alpha} between a point inside and a point outside."""
    lo, hi = inside, outside
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fn(mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _search_right(curve: PlausibilityCurve, alpha: float, start: float,
                  cfg: SearchConfig) -> tuple[float, bool]:
    """Rightmost boundary of the superlevel set.  Returns (endpoint, at_support)."""
    _, hi = curve.support
    prev = start
    if math.isinf(hi):
        step = max(1.0, 0.25 * (1.0 + abs(start)))
        for _ in range(cfg.max_expand):
            cand = prev + step
            val = curve(cand)
            if math.isnan(val):
                raise SearchError("curve evaluated to NaN during bracketing",
                                  bracket=(prev, cand))
            if val <= alpha:
                return _bisect_crossing(curve, alpha, prev, cand, cfg.tol), False
            prev = cand
            step *= 2.0
        # Curve stayed above alpha out to the last probe: the region runs to
        # the end of the support (constant and plateau curves land here).
        return hi, True
    for _ in range(cfg.max_expand):
        cand = hi - 0.5 * (hi - prev)
        if cand <= prev:
            break
        val = curve(cand)
        if math.isnan(val):
            raise SearchError("curve evaluated to NaN during bracketing",
                              bracket=(prev, cand))
        if val <= alpha:
            return _bisect_crossing(curve, alpha, prev, cand, cfg.tol), False
        prev = cand
    if curve.hi_closed:
        val = curve(hi)
        if not math.isnan(val) and val <= alpha:
            return _bisect_crossing(curve, alpha, prev, hi, cfg.tol), False
    return hi, True


def _search_left(curve: PlausibilityCurve, alpha: float, start: float,
                 cfg: SearchConfig) -> tuple[float, bool]:
    lo, _ = curve.support
    prev = start
    if math.isinf(lo):
        step = max(1.0, 0.25 * (1.0 + abs(start)))
        for _ in range(cfg.max_expand):
            cand = prev - step
            val = curve(cand)
            if math.isnan(val):
                raise SearchError("curve evaluated to NaN during bracketing",
                                  bracket=(cand, prev))
            if val <= alpha:
                return _bisect_crossing(curve, alpha, prev, cand, cfg.tol), False
            prev = cand
            step *= 2.0
        return lo, True
    for _ in range(cfg.max_expand):
        cand = lo + 0.5 * (prev - lo)
        if cand >= prev:
            break
        val = curve(cand)
        if math.isnan(val):
            raise SearchError("curve evaluated to NaN during bracketing",
                              bracket=(cand, prev))
        if val <= alpha:
            return _bisect_crossing(curve, alpha, prev, cand, cfg.tol), False
        prev = cand
    if curve.lo_closed:
        val = curve(lo)
        if not math.isnan(val) and val <= alpha:
            return _bisect_crossing(curve, alpha, prev, lo, cfg.tol), False
    return lo, True


def _find_inside_point(curve: PlausibilityCurve, alpha: float, cfg: SearchConfig) -> float | None:
    """A point with curve value above alpha, trying the mode first and then
    a grid scan over a finite window of the support."""
    if curve.mode is not None and curve(curve.mode) > alpha:
        return curve.mode
    lo, hi = curve.support
    a = lo if math.isfinite(lo) else (min(hi, 0.0) - 100.0 if math.isfinite(hi) else -100.0)
    b = hi if math.isfinite(hi) else (max(lo, 0.0) + 100.0 if math.isfinite(lo) else 100.0)
    span = b - a
    for k in range(1, cfg.grid):
        point = a + span * k / cfg.grid
        if curve(point) > alpha:
            return point
    return None


def extract_region(curve: PlausibilityCurve, alpha: float,
                   search: SearchConfig | None = None) -> Region:
    """Superlevel set {psi : curve(psi) > alpha} as a Region.

    Curves carrying a closed-form region_fn are delegated to it; everything
    else is treated as unimodal, and the two threshold crossings are located
    by bracketing bisection outward from the mode to search.tol.
    Endpoints produced by a crossing are open (the threshold itself is
    excluded); endpoints at a closed support boundary are closed.
    """
    cfg = search or DEFAULT_SEARCH
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if curve.region_fn is not None:
        return curve.region_fn(alpha)
    inside = _find_inside_point(curve, alpha, cfg)
    if inside is None:
        return Region.empty()
    right, right_at_support = _search_right(curve, alpha, inside, cfg)
    left, left_at_support = _search_left(curve, alpha, inside, cfg)
    lo_open = not curve.lo_closed if left_at_support else True
    hi_open = not curve.hi_closed if right_at_support else True
    if left == right:
        return Region((Piece(left, right, False, False),))
    return Region((Piece(left, right, lo_open, hi_open),))
