"""Limit frequencies of the tile size classes.

The class counts of successive subdivisions obey a linear recursion whose
matrix has the tallies ``c_i`` (maps with exponent ``i``) in its first
column and a shifted identity above the diagonal.  Power iteration on it
gives the limit frequencies; `empirical_densities` counts them in a window.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .pairs import GeneratingPair
from .tiling import WindowTiling


class NoConvergence(RuntimeError):
    pass


class TooFewTiles(ValueError):
    pass


MIN_TILES = 100


@dataclass(frozen=True)
class SubdivisionMatrix:
    counts: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]

    @property
    def M(self) -> int:
        return len(self.counts)

    def apply(self, v) -> list[float]:
        return [sum(a * x for a, x in zip(row, v)) for row in self.matrix]


def build_matrix(pair: GeneratingPair) -> SubdivisionMatrix:
    M = max(pair.exponents)
    tally = Counter(pair.exponents)
    c = tuple(tally[i] for i in range(1, M + 1))
    rows = []
    for i in range(M):
        row = [0] * M
        row[0] = c[i]
        if i + 1 < M:
            row[i + 1] = 1
        rows.append(tuple(row))
    return SubdivisionMatrix(c, tuple(rows))


def limit_densities(
    sm: SubdivisionMatrix, tol: float = 1e-13, max_iter: int = 10_000
) -> tuple[float, ...]:
    """Normalized limit of ``C^n c``, iterating ``v <- C v / sum(C v)`` from ``v = c``."""
    total = sum(sm.counts)
    v = [x / total for x in sm.counts]
    for _ in range(max_iter):
        w = sm.apply(v)
        norm = sum(w)
        w = [x / norm for x in w]
        if max(abs(a - b) for a, b in zip(v, w)) < tol:
            return tuple(w)
        v = w
    raise NoConvergence(f"power iteration did not settle in {max_iter} steps")


def dominant_eigenvalue(sm: SubdivisionMatrix, d) -> float:
    """Growth factor ``sum(C d) / sum(d)`` for a limit vector ``d``."""
    return sum(sm.apply(d)) / sum(d)


def empirical_densities(tiling: WindowTiling, M: int, min_tiles: int = MIN_TILES) -> tuple[float, ...]:
    """Fraction of each class among the tiles whose centroid lies in the window."""
    classes = [t.size_class for t in tiling.tiles if tiling.window.holds_point(t.shape.centroid)]
    if len(classes) < min_tiles:
        raise TooFewTiles(f"{len(classes)} tiles in the window, need at least {min_tiles}")
    tally = Counter(classes)
    return tuple(tally[i] / len(classes) for i in range(M))
