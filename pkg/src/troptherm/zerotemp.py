"""Zero-temperature limits: beta sweeps, rate functions, limit diagnostics.

Everything here compares positive-temperature spectral data, rescaled by
1/beta, against the tropical objects it converges to. Scalings are fixed
once per run: scaled log u is pinned to 0 at the reference state (the
lowest-index Aubry state), scaled log m has sup 0, and the normalized
potential is divided by beta arc by arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import TransitionSystem
from .ergodic_opt import ErgodicReport, ergodic_report
from .maxplus_linalg import DEFAULT_TOL
from .thermo import SpectralData, log_moment, normalized_potential, spectral_data
from .tropical_core import NEG_INF, TropValue, TropVector, t_add, t_mul, vec_scale
from .tropical_measures import Density

DEFAULT_GRID = (10.0, 100.0, 1000.0)
DIVERGENCE_FLOOR = -10.0


class MultiClassError(ValueError):
    """Several critical classes: no single zero-temperature selection."""

    def __init__(self, classes: List[Tuple[int, ...]]):
        self.classes = classes
        super().__init__(
            f"{len(classes)} critical classes {classes}: "
            "the zero-temperature limit is not a single point"
        )


@dataclass
class SweepRecord:
    """Rescaled spectral data at one inverse temperature."""

    beta: float
    pressure_over_beta: float
    scaled_log_u: np.ndarray
    scaled_log_m: np.ndarray
    scaled_g: np.ndarray
    ref_state: int
    spectral: SpectralData


@dataclass
class RateFunction:
    """Large-deviation rate I = -(v + b), entries in [0, +inf].

    v is the calibrated subaction and b the eigen-density, jointly
    normalized so that sup b = 0 and sup(v + b) = 0; the minimum of I
    is then 0 and is attained on the support of the maximizing measure.
    """

    values: np.ndarray
    eigenfunction: TropVector
    density: Density

    def to_json(self) -> dict:
        return {
            "values": [("+inf" if math.isinf(x) else x) for x in self.values],
            "eigenfunction": self.eigenfunction.to_json(),
            "density": self.density.to_json(),
        }


@dataclass
class DiagnosticsRow:
    beta: float
    d_u: float
    d_b: float
    d_g: float
    d_D: float


@dataclass
class LimitDiagnostics:
    rows: List[DiagnosticsRow]
    ref_state: int
    divergence_ok: bool


def _check_grid(grid: Sequence[float]) -> Tuple[float, ...]:
    grid = tuple(float(b) for b in grid)
    if not grid:
        raise ValueError("empty beta grid")
    if any(b <= 0 for b in grid):
        raise ValueError("beta grid entries must be positive")
    if any(b1 >= b2 for b1, b2 in zip(grid, grid[1:])):
        raise ValueError("beta grid must be strictly increasing")
    return grid


def sweep_record(
    sys: TransitionSystem,
    beta: float,
    ref: int,
    start_log_u: Optional[np.ndarray] = None,
    start_log_m: Optional[np.ndarray] = None,
) -> SweepRecord:
    """One rescaled spectral record, pinned to the given reference state."""
    data = spectral_data(sys, beta, start_log_u=start_log_u, start_log_m=start_log_m)
    slu = data.log_u / beta
    slu = slu - slu[ref]
    slm = data.log_m / beta
    slm = slm - slm.max()
    g = normalized_potential(sys, data) / beta
    return SweepRecord(
        beta=beta,
        pressure_over_beta=data.pressure / beta,
        scaled_log_u=slu,
        scaled_log_m=slm,
        scaled_g=g,
        ref_state=ref,
        spectral=data,
    )


def beta_sweep(
    sys: TransitionSystem,
    grid: Sequence[float] = DEFAULT_GRID,
    report: Optional[ErgodicReport] = None,
) -> List[SweepRecord]:
    """Spectral data across an increasing beta grid, rescaled by 1/beta.

    Consecutive grid points warm-start the power iteration from the
    previous rescaled eigenvectors.
    """
    grid = _check_grid(grid)
    if report is None:
        report = ergodic_report(sys)
    ref = min(report.mane.aubry)
    records: List[SweepRecord] = []
    start_u: Optional[np.ndarray] = None
    start_m: Optional[np.ndarray] = None
    for beta in grid:
        rec = sweep_record(sys, beta, ref, start_log_u=start_u, start_log_m=start_m)
        records.append(rec)
        start_u, start_m = rec.scaled_log_u * beta, rec.scaled_log_m * beta
    return records


def rate_function(
    sys: TransitionSystem,
    report: Optional[ErgodicReport] = None,
    tol: float = DEFAULT_TOL,
) -> RateFunction:
    if report is None:
        report = ergodic_report(sys, tol=tol)
    if not report.uniquely_calibrated:
        raise MultiClassError(report.mane.critical_classes)
    b0 = report.eigen_density_basis[0]
    shift = b0.values.sup()
    b_al = vec_scale(TropValue(-shift.finite), b0.values)
    v0 = report.eigenfunction_basis[0]
    pair_sup = NEG_INF
    for vx, bx in zip(v0, b_al):
        pair_sup = t_add(pair_sup, t_mul(vx, bx))
    v_al = vec_scale(TropValue(-pair_sup.finite), v0)
    values = np.empty(sys.n)
    for x in range(sys.n):
        prod = t_mul(v_al[x], b_al[x])
        # + 0.0 turns the -0.0 produced by negating a zero into 0.0
        values[x] = math.inf if prod.is_neg_inf else -prod.finite + 0.0
    return RateFunction(values=values, eigenfunction=v_al, density=Density(b_al))


def ldp_residual(
    sys: TransitionSystem,
    f: Sequence[float],
    beta: float,
    rate: Optional[RateFunction] = None,
    spectral: Optional[SpectralData] = None,
) -> float:
    """|(1/beta) log integral of e^{beta f} d mu_beta  -  sup_x (f - I)(x)|.

    The moment is taken against the log-space equilibrium state; linear
    masses underflow at the betas where the comparison is interesting.
    """
    f = np.asarray(f, dtype=float)
    if len(f) != sys.n:
        raise ValueError(f"length mismatch: system {sys.n}, observable {len(f)}")
    if not np.all(np.isfinite(f)):
        raise ValueError("observable must be finite")
    if rate is None:
        rate = rate_function(sys)
    if spectral is None:
        spectral = spectral_data(sys, beta)
    moment = log_moment(spectral.log_mu, f, beta, measure_is_log=True)
    sup_term = float(np.max(f - rate.values))
    return abs(moment - sup_term)


def limit_diagnostics(
    sys: TransitionSystem,
    records: Sequence[SweepRecord],
    report: Optional[ErgodicReport] = None,
    floor: float = DIVERGENCE_FLOOR,
) -> LimitDiagnostics:
    """Distances from rescaled spectral data to its tropical limit.

    d_u: sup distance from scaled log u to the calibrated subaction.
    d_b: sup distance from scaled log m to the eigen-density, over the
         states where the density is finite.
    d_g: sup distance, over arcs, from the scaled normalized potential to
         the calibrated arc weight  w - Q + v(source) - v(target).
    d_D: residual of the exact limit identity for b-hat = v + b: sup over
         states y of |max over arcs y -> x of (b-hat(x) + scaled_g) - b-hat(y)|.

    States where the density is -inf are checked for divergence instead
    of distance: scaled log m must decrease strictly along the grid and
    end below the floor.
    """
    if not records:
        raise ValueError("empty sweep")
    if report is None:
        report = ergodic_report(sys)
    if not report.uniquely_calibrated:
        raise MultiClassError(report.mane.critical_classes)
    ref = min(report.mane.aubry)
    for rec in records:
        if rec.ref_state != ref:
            raise ValueError(
                f"sweep reference state {rec.ref_state} does not match the report's {ref}"
            )

    v0 = report.eigenfunction_basis[0]
    v_f = np.array([x.to_float() - v0[ref].finite for x in v0])
    b0 = report.eigen_density_basis[0]
    b_sup = b0.values.sup().finite
    b_f = np.array([x.to_float() - b_sup for x in b0.values])
    finite_b = np.isfinite(b_f)

    arc_src = np.fromiter((a[0] for a in sys.arcs), dtype=int, count=len(sys.arcs))
    arc_tgt = np.fromiter((a[1] for a in sys.arcs), dtype=int, count=len(sys.arcs))
    arc_w = np.fromiter((a[2] for a in sys.arcs), dtype=float, count=len(sys.arcs))
    a_hat = arc_w - report.Q + v_f[arc_src] - v_f[arc_tgt]
    bhat = v_f + b_f

    rows: List[DiagnosticsRow] = []
    for rec in records:
        d_u = float(np.max(np.abs(rec.scaled_log_u - v_f)))
        d_b = float(np.max(np.abs(rec.scaled_log_m[finite_b] - b_f[finite_b])))
        d_g = float(np.max(np.abs(rec.scaled_g - a_hat)))
        d_d = 0.0
        for y in range(sys.n):
            if not np.isfinite(bhat[y]):
                continue
            mask = arc_src == y
            if not np.any(mask):
                continue
            best = float(np.max(bhat[arc_tgt[mask]] + rec.scaled_g[mask]))
            d_d = max(d_d, abs(best - bhat[y]))
        rows.append(DiagnosticsRow(beta=rec.beta, d_u=d_u, d_b=d_b, d_g=d_g, d_D=d_d))

    divergence_ok = True
    for x in np.nonzero(~finite_b)[0]:
        series = [rec.scaled_log_m[x] for rec in records]
        decreasing = all(s2 < s1 for s1, s2 in zip(series, series[1:]))
        if not (decreasing and series[-1] < floor):
            divergence_ok = False
    return LimitDiagnostics(rows=rows, ref_state=ref, divergence_ok=divergence_ok)
