"""
Energy ledger of a discrete evolution: per-step energies, work integrals of
the boundary loading with the field frozen on each interval, and the error
term of the discrete energy estimate.
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..fespace.boundary import BoundaryDeformation
from ..fespace.field import DiscreteField
from ..model.energies import (
    EnergyModel,
    body_work,
    bulk_energy,
    derivative_actions,
    surface_work,
)
from ..model.quadrature import time_nodes

THETA_SAMPLES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class WorkIntegrals:
    W_work: float = 0.0
    Fdot: float = 0.0
    F_work: float = 0.0
    Gdot: float = 0.0
    G_work: float = 0.0

    @property
    def rhs(self) -> float:
        """Net work entering the energy estimate."""
        return self.W_work - self.Fdot - self.F_work - self.Gdot - self.G_work

    def __add__(self, other: "WorkIntegrals") -> "WorkIntegrals":
        return WorkIntegrals(*(a + b for a, b in zip(asdict(self).values(), asdict(other).values())))


def interval_work(u: DiscreteField, model: EnergyModel, boundary: BoundaryDeformation,
                  s: float, t: float) -> WorkIntegrals:
    """The five work integrals over [s, t] with u frozen; 3-point Gauss in time."""
    if t <= s:
        return WorkIntegrals()
    static = boundary.is_static()
    if static and not model.has_forces:
        return WorkIntegrals()
    mesh = u.adaptive.base
    taus, weights = time_nodes(s, t)
    totals = np.zeros(5)
    for tau, w in zip(taus, weights):
        rate = boundary.rate_interpolant(mesh, tau).to_discrete(u.adaptive)
        actions = derivative_actions(tau, u, rate, model)
        totals += w * np.array([actions.W_pair, actions.F_rate, actions.F_pair, actions.G_rate, actions.G_pair])
    return WorkIntegrals(*totals.tolist())


def step_remainders(u: DiscreteField, increment: DiscreteField, model: EnergyModel, t: float,
                    work: WorkIntegrals) -> Sequence[float]:
    """
    Exact remainders of the bulk, body and surface terms when u is moved by
    the boundary increment, given the interval's work integrals.
    """
    moved = u + increment
    actions = derivative_actions(t, u, increment, model)
    rem_w = bulk_energy(moved, model) - bulk_energy(u, model) - actions.W_pair
    rem_f = body_work(t, moved, model) - body_work(t, u, model) - work.F_work
    rem_g = surface_work(t, moved, model) - surface_work(t, u, model) - work.G_work
    return rem_w, rem_f, rem_g


def sampled_remainder(u: DiscreteField, increment: DiscreteField, model: EnergyModel, t: float,
                      thetas: Iterable[float] = THETA_SAMPLES) -> float:
    """max over theta of the derivative differences along the increment, per term, summed."""
    base = derivative_actions(t, u, increment, model)
    worst = np.zeros(3)
    for theta in thetas:
        shifted = derivative_actions(t, u + increment * theta, increment, model)
        worst = np.maximum(worst, np.abs([
            shifted.W_pair - base.W_pair,
            shifted.F_pair - base.F_pair,
            shifted.G_pair - base.G_pair,
        ]))
    return float(worst.sum())


@dataclass
class LedgerRow:
    step: int
    t: float
    bulk: float
    body: float
    traction: float
    surface: float
    total: float
    W_work: float = 0.0
    Fdot: float = 0.0
    F_work: float = 0.0
    Gdot: float = 0.0
    G_work: float = 0.0
    e_term: float = 0.0
    e_cumulative: float = 0.0
    e_term_sampled: float = 0.0
    crack_length: float = 0.0
    comparison_slack: float = float("nan")
    step_objective: float = 0.0
    g_competitor: float = 0.0
    grad_p: float = 0.0
    u_q: float = 0.0

    @property
    def elastic(self) -> float:
        return self.bulk - self.body - self.traction

    @property
    def work(self) -> WorkIntegrals:
        return WorkIntegrals(self.W_work, self.Fdot, self.F_work, self.Gdot, self.G_work)


COLUMNS = [f.name for f in fields(LedgerRow)]


@dataclass
class EvolutionLedger:
    rows: List[LedgerRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i: int) -> LedgerRow:
        return self.rows[i]

    def append(self, row: LedgerRow) -> None:
        self.rows.append(row)

    @property
    def last(self) -> Optional[LedgerRow]:
        return self.rows[-1] if self.rows else None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.rows], columns=COLUMNS)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "EvolutionLedger":
        rows = []
        for record in frame.to_dict(orient="records"):
            values = {k: record[k] for k in COLUMNS if k in record}
            values['step'] = int(values['step'])
            rows.append(LedgerRow(**values))
        return cls(rows)

    def consistency_error(self) -> float:
        """Largest relative mismatch of total = bulk - body - traction + surface."""
        worst = 0.0
        for r in self.rows:
            recomputed = r.bulk - r.body - r.traction + r.surface
            worst = max(worst, abs(recomputed - r.total) / (1.0 + abs(r.total)))
        return worst


__all__ = [
    'THETA_SAMPLES',
    'WorkIntegrals',
    'interval_work',
    'step_remainders',
    'sampled_remainder',
    'LedgerRow',
    'COLUMNS',
    'EvolutionLedger',
]
