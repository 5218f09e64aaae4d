"""Amplitude dynamics q**2 qddot = mu, q(0) = 1.

The conserved quantity is E = qdot**2/2 + mu/q, whose initial value
e_eff = qdot0**2/2 + mu classifies the motion: positive means asymptotically
linear expansion, zero splits into self-similar expansion, the stationary
state q = 1, or collapse according to the sign of qdot0, and negative means
finite-time collapse with local rate (T - t)**(2/3).

Closed forms are used exactly when mu = 0 (free linear motion) and when
e_eff = 0 (q = (1 + 1.5 qdot0 t)**(2/3)); everything else integrates with
classical RK4 under an energy-drift watchdog.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotCollapsing, OutOfRange, StepSizeTooLarge
from .radial import moment_integral
from .shooting import SolutionProfile

E_EFF_ZERO_TOL = 1e-14
Q_MIN_STOP = 1e-6
DEFAULT_ENERGY_TOL = 1e-6

REGIME_LINEAR = "linear-expanding"
REGIME_SELF_SIMILAR = "self-similar-expanding"
REGIME_STATIONARY = "stationary"
REGIME_COLLAPSING = "collapsing"


def e_effective(mu: float, qdot0: float) -> float:
    return 0.5 * qdot0 * qdot0 + mu


def classify(mu: float, qdot0: float) -> str:
    """Regime tag from the sign of e_eff, with sign(qdot0) breaking the tie
    at e_eff = 0 (decided with absolute tolerance 1e-14)."""
    e = e_effective(mu, qdot0)
    if abs(e) <= E_EFF_ZERO_TOL:
        if qdot0 > 0:
            return REGIME_SELF_SIMILAR
        if qdot0 < 0:
            return REGIME_COLLAPSING
        return REGIME_STATIONARY
    return REGIME_LINEAR if e > 0 else REGIME_COLLAPSING


@dataclass
class TemporalSolution:
    mu: float
    qdot0: float
    e_eff: float
    regime: str
    t: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    energy_drift: np.ndarray
    max_energy_drift: float
    stopped_early: bool
    closed_form: str | None


def _sample_times(t_end: float, dt: float) -> np.ndarray:
    n = int(math.floor(t_end / dt + 1e-12))
    times = dt * np.arange(n + 1)
    if times[-1] < t_end - 1e-12 * max(1.0, t_end):
        times = np.append(times, t_end)
    return times


def _rk4_step(mu: float, q: float, qd: float, dt: float) -> tuple[float, float]:
    def acc(qv: float) -> float:
        return mu / (qv * qv)

    k1q, k1v = qd, acc(q)
    q2 = q + 0.5 * dt * k1q
    k2q, k2v = qd + 0.5 * dt * k1v, acc(q2)
    q3 = q + 0.5 * dt * k2q
    k3q, k3v = qd + 0.5 * dt * k2v, acc(q3)
    q4 = q + dt * k3q
    k4q, k4v = qd + dt * k3v, acc(q4)
    return (
        q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        qd + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )


def evolve_q(
    mu: float,
    qdot0: float,
    t_end: float,
    dt: float,
    q_min_stop: float = Q_MIN_STOP,
    energy_tol: float = DEFAULT_ENERGY_TOL,
    force_rk4: bool = False,
) -> TemporalSolution:
    """Sample q(t), qdot(t) on t = 0, dt, 2 dt, ..., t_end.

    Integration stops early (recorded, not an error) once q would drop below
    q_min_stop; the ODE is singular at q = 0.  StepSizeTooLarge is raised if
    the energy invariant drifts by more than energy_tol * (1 + |e_eff|).
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("t_end and dt must be positive")
    e_eff = e_effective(mu, qdot0)
    regime = classify(mu, qdot0)
    times = _sample_times(t_end, dt)

    closed_form = None
    if not force_rk4:
        if mu == 0.0:
            closed_form = "linear"
        elif abs(e_eff) <= E_EFF_ZERO_TOL:
            closed_form = "self-similar"

    stopped = False
    if closed_form == "linear":
        q = 1.0 + qdot0 * times
        qd = np.full_like(times, qdot0)
        keep = q >= q_min_stop
        stopped = not np.all(keep)
        times, q, qd = times[keep], q[keep], qd[keep]
    elif closed_form == "self-similar":
        base = 1.0 + 1.5 * qdot0 * times
        keep = base >= q_min_stop ** 1.5
        stopped = not np.all(keep)
        times, base = times[keep], base[keep]
        q = base ** (2.0 / 3.0)
        qd = qdot0 * base ** (-1.0 / 3.0)
    else:
        ts = [0.0]
        qs = [1.0]
        qds = [qdot0]
        qc, qdc = 1.0, qdot0
        for j in range(1, len(times)):
            step = times[j] - times[j - 1]
            # Near collapse the contraction timescale q/|qdot| shrinks below
            # any fixed dt; stop while the step still resolves it rather than
            # integrate into the q = 0 singularity.
            if qdc < 0 and step > 0.05 * qc / -qdc:
                stopped = True
                break
            qn, qdn = _rk4_step(mu, qc, qdc, step)
            if qn < q_min_stop:
                stopped = True
                break
            qc, qdc = qn, qdn
            ts.append(times[j])
            qs.append(qc)
            qds.append(qdc)
        times = np.array(ts)
        q = np.array(qs)
        qd = np.array(qds)

    drift = 0.5 * qd * qd + mu / q - e_eff
    max_drift = float(np.max(np.abs(drift))) if drift.size else 0.0
    if max_drift > energy_tol * (1.0 + abs(e_eff)):
        raise StepSizeTooLarge(
            f"energy drift {max_drift:.3e} exceeds "
            f"{energy_tol:g} * (1 + |e_eff|); reduce dt"
        )
    return TemporalSolution(
        mu=mu,
        qdot0=qdot0,
        e_eff=e_eff,
        regime=regime,
        t=times,
        q=q,
        qdot=qd,
        energy_drift=drift,
        max_energy_drift=max_drift,
        stopped_early=stopped,
        closed_form=closed_form,
    )


@dataclass
class CollapseEstimate:
    """Collapse time from threshold extrapolation plus the local rate fit."""

    time: float
    exponent: float
    prefactor: float
    threshold_times: dict[float, float]


def collapse_time(
    mu: float,
    qdot0: float,
    dt: float = 1e-3,
    thresholds: tuple[float, ...] = (1e-2, 1e-3, 1e-4),
) -> CollapseEstimate:
    """Estimate the collapse time T and the local exponent in q ~ c (T-t)**a.

    First-passage times at the thresholds follow T - t_k proportional to
    eps_k**(3/2) for the 2/3 rate, so the geometric extrapolation below is
    exact in the limit; the exponent is then fit over the last threshold
    decade of the trajectory.
    """
    if classify(mu, qdot0) != REGIME_COLLAPSING:
        raise NotCollapsing(f"(mu={mu:g}, qdot0={qdot0:g}) does not collapse")
    thresholds = tuple(sorted(thresholds, reverse=True))

    e_eff = e_effective(mu, qdot0)
    fit_lo, fit_hi = thresholds[-1], thresholds[-1] * 10.0

    if abs(e_eff) <= E_EFF_ZERO_TOL:
        # q = (1 + 1.5 qdot0 t)**(2/3) exactly; qdot0 < 0 here.
        passage = {eps: (eps**1.5 - 1.0) / (1.5 * qdot0) for eps in thresholds}
        qs_fit = np.geomspace(fit_lo, fit_hi, 40)
        ts_fit = (qs_fit**1.5 - 1.0) / (1.5 * qdot0)
    else:
        passage = {}
        pending = list(thresholds)
        t, q, qd = 0.0, 1.0, qdot0
        traj_t, traj_q = [0.0], [1.0]
        max_steps = 20_000_000
        for _ in range(max_steps):
            step = dt if qd >= 0 else min(dt, 0.02 * q / abs(qd))
            qn, qdn = _rk4_step(mu, q, qd, step)
            while qn <= 0.0:
                step *= 0.5
                qn, qdn = _rk4_step(mu, q, qd, step)
            while pending and qn < pending[0]:
                eps = pending.pop(0)
                # Bisect the sub-step for the crossing time.
                lo_s, hi_s = 0.0, step
                for _ in range(80):
                    mid = 0.5 * (lo_s + hi_s)
                    qm, _ = _rk4_step(mu, q, qd, mid)
                    if qm > eps:
                        lo_s = mid
                    else:
                        hi_s = mid
                passage[eps] = t + 0.5 * (lo_s + hi_s)
            t, q, qd = t + step, qn, qdn
            traj_t.append(t)
            traj_q.append(q)
            if not pending:
                break
        else:
            raise StepSizeTooLarge("collapse integration did not reach thresholds")
        traj_t = np.array(traj_t)
        traj_q = np.array(traj_q)
        sel = (traj_q >= fit_lo) & (traj_q <= fit_hi)
        ts_fit = traj_t[sel]
        qs_fit = traj_q[sel]

    rho = (thresholds[-2] / thresholds[-1]) ** 1.5
    t_prev, t_last = passage[thresholds[-2]], passage[thresholds[-1]]
    big_t = t_last + (t_last - t_prev) / (rho - 1.0)

    logs = np.log(big_t - ts_fit)
    logq = np.log(qs_fit)
    slope, intercept = np.polyfit(logs, logq, 1)
    return CollapseEstimate(
        time=float(big_t),
        exponent=float(slope),
        prefactor=float(math.exp(intercept)),
        threshold_times=passage,
    )


@dataclass
class MotionSnapshot:
    t: float
    q: float
    qdot: float
    phi: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    mass: float


def _amplitude_at(temporal: TemporalSolution, t: float) -> tuple[float, float]:
    if temporal.closed_form == "linear":
        return 1.0 + temporal.qdot0 * t, temporal.qdot0
    if temporal.closed_form == "self-similar":
        base = 1.0 + 1.5 * temporal.qdot0 * t
        return base ** (2.0 / 3.0), temporal.qdot0 * base ** (-1.0 / 3.0)
    ts = temporal.t
    j = int(np.searchsorted(ts, t, side="right")) - 1
    if j >= len(ts) - 1:
        return float(temporal.q[-1]), float(temporal.qdot[-1])
    # Cubic Hermite on (q, qdot) over the bracketing interval.
    h = ts[j + 1] - ts[j]
    s = (t - ts[j]) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    q = (
        h00 * temporal.q[j]
        + h10 * h * temporal.qdot[j]
        + h01 * temporal.q[j + 1]
        + h11 * h * temporal.qdot[j + 1]
    )
    d00 = 6 * s * (s - 1)
    d10 = (1 - s) * (1 - 3 * s)
    d01 = -d00
    d11 = s * (3 * s - 2)
    qd = (
        d00 * temporal.q[j] / h
        + d10 * temporal.qdot[j]
        + d01 * temporal.q[j + 1] / h
        + d11 * temporal.qdot[j + 1]
    )
    return float(q), float(qd)


def assemble_motion(
    profile: SolutionProfile, temporal: TemporalSolution, t: float
) -> MotionSnapshot:
    """Radial fields of the motion phi(t, R) = q(t) f(R) at one time.

    The density comes from mass conservation through the deformation
    determinant, rho = brho / (q**3 f' lambda**2); the total mass equals
    (4 pi/3) brho independent of t.
    """
    tiny = 1e-12 * max(1.0, abs(float(temporal.t[-1])))
    if t < temporal.t[0] - tiny or t > temporal.t[-1] + tiny:
        raise OutOfRange(
            f"t = {t:g} outside computed samples [{temporal.t[0]:g}, {temporal.t[-1]:g}]"
        )
    q, qd = _amplitude_at(temporal, float(t))
    if q <= 0:
        raise OutOfRange(f"q(t) = {q:g} not positive at t = {t:g}")

    phi = q * profile.f
    u = qd * profile.f
    rho = profile.brho0 / (q**3 * profile.fprime * profile.lam**2)
    # Total mass in reference coordinates: 4 pi q^3 int rho lambda^2 f' R^2 dR.
    integrand = rho * profile.lam**2 * profile.fprime
    mass = 4.0 * math.pi * q**3 * float(moment_integral(profile.grid, integrand, 2)[-1])
    return MotionSnapshot(t=float(t), q=q, qdot=qd, phi=phi, u=u, rho=rho, mass=mass)
