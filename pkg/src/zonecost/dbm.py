"""Difference bound matrices over clock valuations.

A zone is a conjunction of constraints ``a - b <= m`` / ``a - b < m`` where
``a`` and ``b`` range over the clocks plus the constant reference clock 0.
Zones are kept in canonical (shortest-path closed) form at all times, which
makes emptiness, inclusion and facet extraction entrywise operations.

Bounds are encoded as single integers ``2*value + (0 if strict else 1)`` so
that the natural integer order coincides with the bound order
``(m,<) < (m,<=) < (m+1,<)`` and bound addition stays branch-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

INF_VALUE = 1 << 60
INF = INF_VALUE << 1  # encoded +oo, conventionally strict

NEG_INF = float("-inf")
POS_INF = float("inf")


class EmptyZoneError(ValueError):
    """Raised when an operation requires a non-empty zone."""


class UnboundedZoneError(ValueError):
    """Raised when an operation requires a bounded zone."""


def encode(value: int, strict: bool) -> int:
    return (value << 1) | (0 if strict else 1)


def bound_value(enc: int) -> int:
    return enc >> 1


def bound_is_strict(enc: int) -> bool:
    return not (enc & 1)


def bound_add(a: int, b: int) -> int:
    if a >= INF or b >= INF:
        return INF
    return (((a >> 1) + (b >> 1)) << 1) | (a & b & 1)


LE_ZERO = encode(0, False)


@dataclass(frozen=True)
class Bound:
    """A single difference bound: value plus strictness (+oo is strict)."""

    value: int | float
    strict: bool

    @staticmethod
    def from_encoded(enc: int) -> "Bound":
        if enc >= INF:
            return Bound(POS_INF, True)
        return Bound(bound_value(enc), bound_is_strict(enc))

    @property
    def is_infinite(self) -> bool:
        return self.value == POS_INF

    def encoded(self) -> int:
        if self.is_infinite:
            return INF
        return encode(int(self.value), self.strict)


@dataclass(frozen=True)
class Facet:
    """A boundary zone obtained by turning one tight constraint into an equality.

    ``pivot`` is ``(other, value)`` with ``other`` a clock name or None for the
    reference clock: the facet satisfies ``axis = value`` (other None) or
    ``axis - other = value``.
    """

    zone: "Zone"
    axis: str
    kind: str  # "lower" | "upper"
    pivot: tuple[str | None, int]


class Zone:
    """A canonical DBM over an ordered clock set (reference clock at index 0)."""

    __slots__ = ("clocks", "m", "_empty", "_index", "_hash")

    def __init__(self, clocks: Sequence[str], m: Sequence[int], *, canonical: bool = False):
        self.clocks = tuple(clocks)
        n = len(self.clocks) + 1
        mat = list(m)
        if len(mat) != n * n:
            raise ValueError("matrix size does not match clock count")
        self._index = {c: i + 1 for i, c in enumerate(self.clocks)}
        self._hash = None
        if canonical:
            self.m = tuple(mat)
            self._empty = False
            return
        empty = _close(mat, n)
        if empty:
            mat = _empty_matrix(n)
        self.m = tuple(mat)
        self._empty = empty

    # -- construction -----------------------------------------------------

    @staticmethod
    def universal(clocks: Sequence[str]) -> "Zone":
        n = len(clocks) + 1
        mat = [INF] * (n * n)
        for i in range(n):
            mat[i * n + i] = LE_ZERO
            mat[0 * n + i] = LE_ZERO  # clocks are nonnegative
        return Zone(clocks, mat, canonical=True)

    @staticmethod
    def origin(clocks: Sequence[str]) -> "Zone":
        n = len(clocks) + 1
        mat = [LE_ZERO] * (n * n)
        return Zone(clocks, mat, canonical=True)

    @staticmethod
    def from_constraints(
        clocks: Sequence[str],
        constraints: Iterable[tuple[str | None, str | None, int, bool]],
    ) -> "Zone":
        """Build a zone from constraints ``a - b (<|<=) value`` (None = reference)."""
        z = Zone.universal(clocks)
        mat = list(z.m)
        n = len(z.clocks) + 1
        for a, b, value, strict in constraints:
            i = 0 if a is None else z._index[a]
            j = 0 if b is None else z._index[b]
            enc = encode(value, strict)
            if enc < mat[i * n + j]:
                mat[i * n + j] = enc
        return Zone(clocks, mat)

    # -- basic accessors ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.clocks)

    def idx(self, clock: str) -> int:
        return self._index[clock]

    def bound(self, a: str | None, b: str | None) -> Bound:
        n = len(self.clocks) + 1
        i = 0 if a is None else self._index[a]
        j = 0 if b is None else self._index[b]
        return Bound.from_encoded(self.m[i * n + j])

    def entry(self, i: int, j: int) -> int:
        return self.m[i * (len(self.clocks) + 1) + j]

    @property
    def is_empty(self) -> bool:
        return self._empty

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Zone)
            and self.clocks == other.clocks
            and self._empty == other._empty
            and self.m == other.m
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.clocks, self.m, self._empty))
        return self._hash

    def __repr__(self) -> str:
        if self._empty:
            return f"Zone(empty over {self.clocks})"
        parts = []
        n = len(self.clocks) + 1
        names = ("0",) + self.clocks
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                e = self.m[i * n + j]
                if e >= INF:
                    continue
                op = "<" if bound_is_strict(e) else "<="
                parts.append(f"{names[i]}-{names[j]}{op}{bound_value(e)}")
        return "Zone(" + " & ".join(parts) + ")"

    # -- operations --------------------------------------------------------

    def canonicalize(self) -> "Zone":
        """Shortest-path closure; idempotent on already-canonical zones."""
        if self._empty:
            return self
        return Zone(self.clocks, self.m)

    def intersect(self, constraints: Iterable[tuple[str | None, str | None, int, bool]]) -> "Zone":
        """Conjoin difference constraints ``a - b (<|<=) value`` and re-canonicalize."""
        if self._empty:
            return self
        n = len(self.clocks) + 1
        mat = list(self.m)
        dirty = False
        for a, b, value, strict in constraints:
            i = 0 if a is None else self._index[a]
            j = 0 if b is None else self._index[b]
            enc = encode(value, strict)
            if enc < mat[i * n + j]:
                mat[i * n + j] = enc
                dirty = True
        if not dirty:
            return self
        return Zone(self.clocks, mat)

    def intersect_zone(self, other: "Zone") -> "Zone":
        if self.clocks != other.clocks:
            raise ValueError("clock sets differ")
        if self._empty or other._empty:
            return self if self._empty else other
        mat = [min(a, b) for a, b in zip(self.m, other.m)]
        return Zone(self.clocks, mat)

    def up(self) -> "Zone":
        """Delay closure: drop individual upper bounds (stays canonical)."""
        if self._empty:
            return self
        n = len(self.clocks) + 1
        mat = list(self.m)
        for i in range(1, n):
            mat[i * n + 0] = INF
        return Zone(self.clocks, mat, canonical=True)

    def reset(self, resets: Sequence[str]) -> "Zone":
        """Set the given clocks to 0 (image, not precondition)."""
        if self._empty or not resets:
            return self
        n = len(self.clocks) + 1
        mat = list(self.m)
        for clock in resets:
            x = self._index[clock]
            for j in range(n):
                mat[x * n + j] = mat[0 * n + j]
                mat[j * n + x] = mat[j * n + 0]
            mat[x * n + x] = LE_ZERO
        return Zone(self.clocks, mat, canonical=True)

    def project(self, keep: Sequence[str]) -> "Zone":
        """Existentially eliminate all clocks outside ``keep``."""
        keep_t = tuple(c for c in self.clocks if c in set(keep))
        if set(keep) - set(self.clocks):
            raise ValueError("projection clocks must be a subset")
        if self._empty:
            return Zone.empty(keep_t)
        n = len(self.clocks) + 1
        sel = [0] + [self._index[c] for c in keep_t]
        mat = [self.m[i * n + j] for i in sel for j in sel]
        return Zone(keep_t, mat, canonical=True)

    def closure(self) -> "Zone":
        """Weaken every strict bound; the topological closure for non-empty zones."""
        if self._empty:
            return self
        mat = [e if e >= INF else (e | 1) for e in self.m]
        return Zone(self.clocks, mat, canonical=True)

    def scale(self, factor: int) -> "Zone":
        """The zone of ``factor * v`` for ``v`` in the zone (integer factor >= 1)."""
        if factor < 1:
            raise ValueError("scale factor must be positive")
        if self._empty or factor == 1:
            return self
        mat = [
            e if e >= INF else encode(bound_value(e) * factor, bound_is_strict(e))
            for e in self.m
        ]
        return Zone(self.clocks, mat, canonical=True)

    @staticmethod
    def empty(clocks: Sequence[str]) -> "Zone":
        n = len(clocks) + 1
        z = Zone.__new__(Zone)
        z.clocks = tuple(clocks)
        z._index = {c: i + 1 for i, c in enumerate(z.clocks)}
        z._hash = None
        z.m = tuple(_empty_matrix(n))
        z._empty = True
        return z

    def subset(self, other: "Zone") -> bool:
        """Entrywise comparison of canonical forms."""
        if self.clocks != other.clocks:
            raise ValueError("clock sets differ")
        if self._empty:
            return True
        if other._empty:
            return False
        return all(a <= b for a, b in zip(self.m, other.m))

    def contains(self, v: Mapping[str, Fraction | int]) -> bool:
        """Exact membership test of a rational valuation."""
        if self._empty:
            return False
        n = len(self.clocks) + 1
        vals = [Fraction(0)] + [Fraction(v[c]) for c in self.clocks]
        for i in range(n):
            for j in range(n):
                e = self.m[i * n + j]
                if e >= INF:
                    continue
                d = vals[i] - vals[j]
                if bound_is_strict(e):
                    if not d < bound_value(e):
                        return False
                elif not d <= bound_value(e):
                    return False
        return True

    def sample_point(self) -> dict[str, Fraction]:
        """Some rational valuation inside the zone (strict bounds respected)."""
        if self._empty:
            raise EmptyZoneError("cannot sample an empty zone")
        n = len(self.clocks) + 1
        vals: list[Fraction | None] = [Fraction(0)] + [None] * len(self.clocks)
        for i in range(1, n):
            lo, lo_strict = Fraction(0), False
            hi, hi_strict = None, False
            for j in range(n):
                if vals[j] is None:
                    continue
                e_up = self.m[i * n + j]  # v_i - v_j <= e_up
                if e_up < INF:
                    cand = vals[j] + bound_value(e_up)
                    if hi is None or cand < hi or (cand == hi and bound_is_strict(e_up)):
                        hi, hi_strict = cand, bound_is_strict(e_up)
                e_lo = self.m[j * n + i]  # v_j - v_i <= e_lo
                if e_lo < INF:
                    cand = vals[j] - bound_value(e_lo)
                    if cand > lo or (cand == lo and bound_is_strict(e_lo)):
                        lo, lo_strict = cand, bound_is_strict(e_lo)
            if hi is None:
                vals[i] = lo + 1
            elif lo == hi:
                vals[i] = lo
            else:
                vals[i] = (lo + hi) / 2
        return {c: vals[self._index[c]] for c in self.clocks}

    # -- facets --------------------------------------------------------------

    def facets(self, axis: str, kind: str) -> list[Facet]:
        """Simple facets of closure(self) w.r.t. ``axis``.

        Lower facets come from tight bounds ``axis >= n`` / ``axis - y >= m``,
        upper facets from ``axis <= n`` / ``axis - y <= m``.  One facet per
        finite canonical entry; every returned facet zone is non-empty.
        """
        if kind not in ("lower", "upper"):
            raise ValueError("kind must be 'lower' or 'upper'")
        if self._empty:
            raise EmptyZoneError("facets of an empty zone")
        closed = self.closure()
        n = len(self.clocks) + 1
        x = self._index[axis]
        out: list[Facet] = []
        others: list[tuple[str | None, int]] = [(None, 0)] + [
            (c, self._index[c]) for c in self.clocks if c != axis
        ]
        for other, j in others:
            if kind == "lower":
                e = closed.m[j * n + x]  # v_j - v_x <= m  <=>  x - j >= -m
                if e >= INF:
                    continue
                pivot_value = -bound_value(e)
                extra = [(axis, other, pivot_value, False)]
            else:
                e = closed.m[x * n + j]  # v_x - v_j <= m
                if e >= INF:
                    continue
                pivot_value = bound_value(e)
                extra = [(other, axis, -pivot_value, False)]
            fz = closed.intersect(extra)
            if fz.is_empty:  # cannot happen on canonical closed zones
                continue
            out.append(Facet(zone=fz, axis=axis, kind=kind, pivot=(other, pivot_value)))
        return out

    # -- recession cone -------------------------------------------------------

    def recession_directions(self) -> tuple[tuple[str, ...], tuple[tuple[str, str], ...]]:
        """Generator description of the cone of unbounded directions.

        Returns ``(C, R)``: the clocks unbounded above, and the pairs
        ``(x, y)`` with a finite difference bound forcing ``alpha_x <= alpha_y``.
        Every recession direction is a nonnegative combination supported on C
        respecting R.
        """
        if self._empty:
            return ((), ())
        n = len(self.clocks) + 1
        cone = tuple(c for c in self.clocks if self.m[self._index[c] * n + 0] >= INF)
        cset = set(cone)
        rel = []
        for x in cone:
            for y in cone:
                if x != y and self.m[self._index[x] * n + self._index[y]] < INF:
                    rel.append((x, y))
        assert all(x in cset and y in cset for x, y in rel)
        return cone, tuple(rel)

    # -- vertices --------------------------------------------------------------

    def vertices(self) -> list[dict[str, int]]:
        """All vertices of the closure polyhedron (requires a bounded closure)."""
        if self._empty:
            raise EmptyZoneError("vertices of an empty zone")
        n = len(self.clocks) + 1
        for i in range(1, n):
            if self.m[i * n + 0] >= INF:
                raise UnboundedZoneError("vertex enumeration needs a bounded zone")
        closed = self.closure()
        found: set[tuple[int, ...]] = set()
        seen: set[frozenset[tuple[int, int]]] = set()

        def grow(values: dict[int, int]) -> None:
            key = frozenset(values.items())
            if key in seen:
                return
            seen.add(key)
            if len(values) == n:
                point = tuple(values[i] for i in range(1, n))
                val = {c: point[k] for k, c in enumerate(self.clocks)}
                if closed.contains(val):
                    found.add(point)
                return
            # attach any unassigned node through any tight edge; a vertex is
            # pinned by a spanning tree of tight constraints rooted at 0
            for i in range(n):
                if i in values:
                    continue
                for j in list(values):
                    e = closed.m[i * n + j]
                    if e < INF:
                        values[i] = values[j] + bound_value(e)
                        grow(values)
                        del values[i]
                    e = closed.m[j * n + i]
                    if e < INF:
                        values[i] = values[j] - bound_value(e)
                        grow(values)
                        del values[i]

        grow({0: 0})
        return [
            {c: p[k] for k, c in enumerate(self.clocks)} for p in sorted(found)
        ]


def _close(mat: list[int], n: int) -> bool:
    """Floyd-Warshall closure in place; returns True when inconsistent."""
    for i in range(n):
        ii = mat[i * n + i]
        if ii < LE_ZERO:
            return True
        mat[i * n + i] = LE_ZERO
    for k in range(n):
        kn = k * n
        for i in range(n):
            ik = mat[i * n + k]
            if ik >= INF:
                continue
            row = i * n
            for j in range(n):
                d = bound_add(ik, mat[kn + j])
                if d < mat[row + j]:
                    mat[row + j] = d
    for i in range(n):
        if mat[i * n + i] < LE_ZERO:
            return True
    return False


def _empty_matrix(n: int) -> list[int]:
    mat = [encode(-1, False)] * (n * n)
    return mat


# -- affine optimization over zones ------------------------------------------


def _cone_unbounded(
    zone: Zone, coeffs: Mapping[str, Fraction], *, positive: bool
) -> bool:
    """True iff some recession direction d has coeffs . d > 0 (or < 0)."""
    cone, rel = zone.recession_directions()
    if not cone:
        return False
    succ: dict[str, set[str]] = {c: set() for c in cone}
    for x, y in rel:
        succ[x].add(y)
    cone_list = list(cone)
    for r in range(1, len(cone_list) + 1):
        for combo in itertools.combinations(cone_list, r):
            u = set(combo)
            if any(not succ[x] <= u for x in u):
                continue  # not closed under alpha_x <= alpha_y
            s = sum(coeffs.get(x, Fraction(0)) for x in u)
            if (positive and s > 0) or (not positive and s < 0):
                return True
    return False


def sup_affine(
    zone: Zone, coeffs: Mapping[str, Fraction], const: Fraction = Fraction(0)
) -> tuple[Fraction | float, dict[str, int] | None]:
    """Supremum of an affine function over the closure of a non-empty zone.

    Returns ``(value, witness)``; the witness is an integral point of the
    closure attaining the supremum, or None when the supremum is +oo.
    """
    if zone.is_empty:
        raise EmptyZoneError("sup over an empty zone")
    if _cone_unbounded(zone, coeffs, positive=True):
        return POS_INF, None
    value, point = _sup_bounded(zone.closure(), dict(coeffs), const)
    return value, point


def inf_affine(
    zone: Zone, coeffs: Mapping[str, Fraction], const: Fraction = Fraction(0)
) -> tuple[Fraction | float, dict[str, int] | None]:
    """Infimum counterpart of :func:`sup_affine`; -oo when unbounded below."""
    neg = {c: -v for c, v in coeffs.items()}
    value, point = sup_affine(zone, neg, -const)
    if value == POS_INF:
        return NEG_INF, None
    return -value, point


def _sup_bounded(
    zone: Zone, coeffs: dict[str, Fraction], const: Fraction
) -> tuple[Fraction, dict[str, int]]:
    # Facet recursion: eliminate one clock per level; the function restricted
    # to a facet is affine over the remaining clocks.
    if not zone.clocks:
        return const, {}
    x = zone.clocks[-1]
    cx = coeffs.get(x, Fraction(0))
    kind = "upper" if cx > 0 else "lower"
    best: Fraction | None = None
    best_point: dict[str, int] | None = None
    for facet in zone.facets(x, kind):
        other, pivot = facet.pivot
        sub_coeffs = {c: v for c, v in coeffs.items() if c != x}
        sub_const = const + cx * pivot
        if other is not None:
            sub_coeffs[other] = sub_coeffs.get(other, Fraction(0)) + cx
        sub_zone = facet.zone.project([c for c in zone.clocks if c != x])
        val, point = _sup_bounded(sub_zone, sub_coeffs, sub_const)
        if best is None or val > best:
            lifted = dict(point)
            lifted[x] = pivot if other is None else point[other] + pivot
            best, best_point = val, lifted
    assert best is not None and best_point is not None
    return best, best_point
