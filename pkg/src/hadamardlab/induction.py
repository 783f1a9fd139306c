"""Induction of a lattice action to an L2 space over a fundamental domain.

The ambient group is the real line, the lattice is the integer subgroup,
and the fundamental domain [0, 1) is discretized into N equal cells, so
every acting element lives on the grid (1/N)Z and the return cocycle is
exact integer arithmetic: the cell value j/N returns to the domain under
the lattice element -(j // N).

The lattice acts on an arbitrary target space through a designated
generator isometry; the induced action on maps permutes cells and applies
generator powers on the wrapped ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import ConstructionError, DomainError
from .l2 import FiniteMeasureSpace, L2Map, barycenter_map, l2_distance, l2_space
from .metric_core import Point, distance
from .spaces.base import Isometry, ModelSpace
from .spaces.product import ProductSpace


class LatticeScenario:
    """Integer lattice inside the line, acting on a target space.

    ``generator`` is the isometry by which the lattice element 1 acts on
    the target; word length of the element n is |n|.
    """

    def __init__(self, grid_size: int, target: ModelSpace, generator: Isometry,
                 word_cap: int = 64):
        if grid_size < 1:
            raise ConstructionError("grid_size must be positive")
        if generator.space is not target:
            raise ConstructionError("generator must act on the target space")
        self.grid_size = int(grid_size)
        self.target = target
        self.generator = generator
        self.word_cap = int(word_cap)
        self.base = FiniteMeasureSpace.uniform(self.grid_size)
        self._powers: dict[int, Isometry] = {
            0: target.make_isometry(target._identity_payload(), check=False),
            1: generator,
            -1: generator.inverse(),
        }
        for j in range(self.grid_size):
            if self.chi(j) != 0:
                raise ConstructionError("cocycle is nonzero on a domain cell")
        if self.chi(-1) != 1 or self.chi(self.grid_size) != -1:
            raise ConstructionError("cocycle normalisation failed off the domain")

    def chi(self, j: int) -> int:
        """Lattice element returning the grid value j/N into [0, 1)."""
        return -(j // self.grid_size)

    def word_length(self, n: int) -> int:
        return abs(int(n))

    def gamma_power(self, n: int, cell=None) -> Isometry:
        n = int(n)
        if abs(n) > self.word_cap:
            where = f" at cell {cell}" if cell is not None else ""
            raise DomainError(
                f"cocycle value {n}{where} exceeds the word cap {self.word_cap}"
            )
        if n not in self._powers:
            step = self._powers[1] if n > 0 else self._powers[-1]
            closest = max(k for k in self._powers if abs(k) <= abs(n)
                          and np.sign(k) in (0, np.sign(n)))
            iso = self._powers[closest]
            for _ in range(abs(n) - abs(closest)):
                iso = step.compose(iso)
            self._powers[n] = iso
        return self._powers[n]

    def grid_index(self, h) -> int:
        """Grid index of a real element; off-grid values are rejected."""
        k = float(h) * self.grid_size
        if abs(k - round(k)) > 1e-9:
            raise DomainError(f"{h!r} is not on the grid of size {self.grid_size}")
        return int(round(k))


@dataclass(frozen=True)
class InducedAction:
    """The scenario's action on maps over the domain cells."""

    scenario: LatticeScenario
    space: ProductSpace = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "space", l2_space(self.scenario.base, self.scenario.target))

    def cell_routing(self, h) -> tuple[list[int], list[int]]:
        """Source cell and twist exponent per output cell for the element h."""
        sc = self.scenario
        k = sc.grid_index(h)
        n = sc.grid_size
        sources, twists = [], []
        for j in range(n):
            sources.append((j - k) % n)
            twists.append(-((j - k) // n))
        return sources, twists

    def isometry(self, h) -> Isometry:
        """The induced element as an isometry of the L2 product space."""
        sources, twists = self.cell_routing(h)
        parts = [self.scenario.gamma_power(t, cell=j) for j, t in enumerate(twists)]
        return self.space.make_isometry(
            ("perm", sources, [p.payload for p in parts]))


def induced_act(action: InducedAction, h, f: L2Map) -> L2Map:
    """Apply a grid element to a map: permute cells, twist wrapped ones."""
    sc = action.scenario
    if f.base != sc.base or f.target.space_id != sc.target.space_id:
        raise DomainError("map does not live over the scenario's domain")
    sources, twists = action.cell_routing(h)
    values = [sc.gamma_power(t, cell=j)(f.values[s])
              for j, (s, t) in enumerate(zip(sources, twists))]
    return L2Map(f.base, f.target, values)


def square_integrability_estimate(scenario: LatticeScenario, g_samples) -> list[float]:
    """Weighted second moment of the return word length, per sampled element.

    For each g the estimate is the average over domain cells h of the
    squared word length of the lattice element returning g^{-1} h to the
    domain; zero exactly at g = 0 by the cocycle normalisation.
    """
    out = []
    n = scenario.grid_size
    for g in g_samples:
        k = scenario.grid_index(g)
        total = 0.0
        for j in range(n):
            chi = scenario.chi(j - k)
            ell = scenario.word_length(chi)
            if ell > scenario.word_cap:
                raise DomainError(
                    f"cocycle value {chi} at cell {j} exceeds the word cap "
                    f"{scenario.word_cap}"
                )
            total += ell ** 2
        out.append(total / n)
    return out


@dataclass(frozen=True)
class TransferChainReport:
    """Numeric inequality chain behind the evanescence transfer argument.

    For each ladder map f and lattice element m: the lattice displacement
    of the barycentre equals the barycentre displacement under the
    pointwise-acting element (equivariance gap), which the barycentre
    contraction bounds by the L2 displacement of f itself.  Bounded L2
    displacements along a ladder therefore force bounded lattice
    displacements of the barycentres.
    """

    lattice_elements: tuple
    bar_displacements: tuple   # d(gamma^m bar f, bar f) per (m, ladder index)
    l2_displacements: tuple    # l2 distance of the acted map per (m, ladder index)
    equivariance_gaps: tuple
    l2_spread: tuple           # l2 distance of each ladder map from the first
    contraction_ok: bool


def induction_transfer_chain(action: InducedAction, ladder: Sequence[L2Map],
                             lattice_elements: Sequence[int],
                             tol: float = 1e-6) -> TransferChainReport:
    sc = action.scenario
    if not ladder:
        raise DomainError("ladder must be nonempty")
    bars = [barycenter_map(f) for f in ladder]
    bar_disp, l2_disp, gaps = [], [], []
    ok = True
    for m in lattice_elements:
        m = int(m)
        gm = sc.gamma_power(m)
        row_bar, row_l2, row_gap = [], [], []
        for f, bar in zip(ladder, bars):
            acted = induced_act(action, m, f)
            lhs = distance(sc.target, gm(bar), bar)
            mid = distance(sc.target, barycenter_map(acted), bar)
            rhs = l2_distance(acted, f)
            row_bar.append(lhs)
            row_l2.append(rhs)
            row_gap.append(abs(lhs - mid))
            if mid > rhs + tol:
                ok = False
        bar_disp.append(tuple(row_bar))
        l2_disp.append(tuple(row_l2))
        gaps.append(tuple(row_gap))
    spread = tuple(l2_distance(f, ladder[0]) for f in ladder)
    return TransferChainReport(
        lattice_elements=tuple(int(m) for m in lattice_elements),
        bar_displacements=tuple(bar_disp), l2_displacements=tuple(l2_disp),
        equivariance_gaps=tuple(gaps), l2_spread=spread, contraction_ok=ok)
