"""Joint jump measure of a pair of counting processes and its compensator.

A pair (X, H) with unit jumps decomposes into three counting processes with
pairwise disjoint jumps: X-only jumps, H-only jumps, joint jumps.  The jump
measure places one marked event per (atom, time) where anything jumps; its
compensator is carried in predictable density form, one increment process per
mark, so that integrating against it is a plain double sum.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import FiltrationMismatch, NotPredictable
from .calculus import compensator, quadratic_covariation
from .finite_space import (
    AdaptedProcess,
    Filtration,
    PointProcess,
    as_point_process,
    is_predictable,
)


class Mark(enum.Enum):
    """Event labels: which of the two components jumped."""

    X_ONLY = (1, 0)
    H_ONLY = (0, 1)
    JOINT = (1, 1)


MARKS: tuple[Mark, ...] = (Mark.X_ONLY, Mark.H_ONLY, Mark.JOINT)
_MARK_INDEX = {m: i for i, m in enumerate(MARKS)}


@dataclass(frozen=True, eq=False)
class MarkedMeasure:
    """Marked events per atom, or the predictable density form of their compensator.

    Event form: ``events[atom]`` is a tuple of (time >= 1, Mark), at most one
    per time.  Density form: ``densities[k, atom, t]`` is the predictable
    per-step mass of mark ``MARKS[k]`` (column 0 is zero).
    """

    filtration: Filtration
    events: tuple | None
    densities: np.ndarray | None
    is_predictable_density: bool

    def indicator_increments(self, mark: Mark) -> np.ndarray:
        """Per-step mass of one mark as an (atom, time) matrix."""
        k = _MARK_INDEX[mark]
        if self.is_predictable_density:
            return self.densities[k]
        n = self.filtration.space.n_atoms
        out = np.zeros((n, self.filtration.horizon + 1))
        for atom, evs in enumerate(self.events):
            for t, m in evs:
                if m is mark:
                    out[atom, t] = 1.0
        return out

    def mass(self) -> AdaptedProcess:
        """Cumulative total mass over all marks."""
        step = sum(self.indicator_increments(m) for m in MARKS)
        return AdaptedProcess(self.filtration, np.cumsum(step, axis=1))


def joint_decomposition(
    x: PointProcess, h: PointProcess
) -> tuple[PointProcess, PointProcess, PointProcess]:
    """Split (X, H) into X-only, H-only and joint counting processes.

    The three parts are counting processes with pairwise no common jumps and
    satisfy part1 + part3 = X, part2 + part3 = H.
    """
    x = as_point_process(x)
    h = as_point_process(h)
    if x.filtration.partitions != h.filtration.partitions:
        raise FiltrationMismatch("pair must share one filtration")
    y3 = as_point_process(quadratic_covariation(x, h))
    y1 = PointProcess(x.filtration, x.values - y3.values)
    y2 = PointProcess(x.filtration, h.values - y3.values)
    return y1, y2, y3


def jump_measure(x: PointProcess, h: PointProcess) -> MarkedMeasure:
    """Event list of the pair: one marked event wherever (dX, dH) != (0, 0)."""
    x = as_point_process(x)
    h = as_point_process(h)
    if x.filtration.partitions != h.filtration.partitions:
        raise FiltrationMismatch("pair must share one filtration")
    dx = x.increments()
    dh = h.increments()
    events = []
    for atom in range(x.space.n_atoms):
        evs = []
        for t in range(1, x.horizon + 1):
            jump = (int(dx[atom, t]), int(dh[atom, t]))
            if jump != (0, 0):
                evs.append((t, Mark(jump)))
        events.append(tuple(evs))
    return MarkedMeasure(
        filtration=x.filtration,
        events=tuple(events),
        densities=None,
        is_predictable_density=False,
    )


def compensator_measure(mu: MarkedMeasure) -> MarkedMeasure:
    """Predictable compensator of an event-form measure, in density form.

    Each mark's event-count process is compensated in the measure's own
    filtration; the per-step predictable masses are stacked per mark.
    """
    if mu.is_predictable_density:
        raise ValueError("input is already in density form")
    filt = mu.filtration
    n = filt.space.n_atoms
    dens = np.zeros((len(MARKS), n, filt.horizon + 1))
    for k, mark in enumerate(MARKS):
        counts = PointProcess(filt, np.cumsum(mu.indicator_increments(mark), axis=1))
        dens[k] = compensator(counts).compensator.increments()
    dens.setflags(write=False)
    return MarkedMeasure(
        filtration=filt, events=None, densities=dens, is_predictable_density=True
    )


@dataclass(frozen=True, eq=False)
class PredictableFunction:
    """One predictable process per mark, stacked as values[mark, atom, time]."""

    filtration: Filtration
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        n = self.filtration.space.n_atoms
        shape = (len(MARKS), n, self.filtration.horizon + 1)
        if vals.shape != shape:
            raise ValueError(f"values must have shape {shape}, got {vals.shape}")
        for k, mark in enumerate(MARKS):
            if not is_predictable(AdaptedProcess(self.filtration, vals[k])):
                raise NotPredictable(f"component {mark.value} is not predictable")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_components(cls, filtration: Filtration, w10, w01, w11) -> "PredictableFunction":
        return cls(filtration, np.stack([np.asarray(c, dtype=float) for c in (w10, w01, w11)]))

    @classmethod
    def constant(cls, filtration: Filtration, value: float = 1.0) -> "PredictableFunction":
        n = filtration.space.n_atoms
        return cls(filtration, np.full((len(MARKS), n, filtration.horizon + 1), float(value)))

    @classmethod
    def indicator(cls, filtration: Filtration, marks) -> "PredictableFunction":
        """Constant 1 on the given marks, 0 elsewhere."""
        n = filtration.space.n_atoms
        vals = np.zeros((len(MARKS), n, filtration.horizon + 1))
        for m in marks:
            vals[_MARK_INDEX[m]] = 1.0
        return cls(filtration, vals)

    def component(self, mark: Mark) -> AdaptedProcess:
        return AdaptedProcess(self.filtration, self.values[_MARK_INDEX[mark]])


def integrate(w: PredictableFunction, m: MarkedMeasure) -> AdaptedProcess:
    """(W * m)_t: sum of W over events up to t, or the density double sum."""
    if w.filtration.partitions != m.filtration.partitions:
        raise FiltrationMismatch("function and measure on different filtrations")
    step = np.zeros((m.filtration.space.n_atoms, m.filtration.horizon + 1))
    for k, mark in enumerate(MARKS):
        step += w.values[k] * m.indicator_increments(mark)
    return AdaptedProcess(m.filtration, np.cumsum(step, axis=1))


def fundamental_martingales(
    x: PointProcess, h: PointProcess
) -> tuple[AdaptedProcess, AdaptedProcess, AdaptedProcess]:
    """Compensated versions of the three disjoint counting parts of (X, H)."""
    y1, y2, y3 = joint_decomposition(x, h)
    return (
        compensator(y1).martingale_part,
        compensator(y2).martingale_part,
        compensator(y3).martingale_part,
    )
