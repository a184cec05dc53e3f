"""Schrodinger evolution under piecewise-constant schedules, plus the
progress-measure bookkeeping that verifies the lower bound empirically.

Propagation inside each segment is exact (Hermitian spectral decomposition,
no ODE stepper), so unitarity holds to machine precision and any slack in
the derivative-bound checks comes from sampling, not integration error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adversary import AdversaryMatrix, SpectralReport, gamma_sub
from .boolfn import BooleanFunction
from .errors import IntegrationError, ValidationError
from .oracle import (
    QUERY_UNIT,
    DriverSchedule,
    HamiltonianOracle,
    assemble,
    uniform_query_state,
)

DEFAULT_SAMPLES_PER_UNIT = 200


@dataclass(frozen=True)
class Trajectory:
    input: int
    times: np.ndarray
    states: np.ndarray  # shape (samples, dim)
    oracle: HamiltonianOracle
    norm_drift_max: float


@dataclass(frozen=True)
class ProgressTrace:
    times: np.ndarray
    w: np.ndarray  # complex progress measure per sample
    w_abs: np.ndarray
    pair_inner: dict  # (x, y) -> complex inner products per sample
    beta: dict  # x -> array (n_bits, samples) of query amplitudes
    dw_estimate: np.ndarray
    norm_drift: np.ndarray
    gamma: AdversaryMatrix
    report: SpectralReport

    @property
    def w0(self) -> complex:
        return complex(self.w[0])


@dataclass(frozen=True)
class DerivativeVerdict:
    measured_max_slope: float
    cap: float
    tolerance: float
    slope_within_cap: bool
    analytic_bound_ok: bool
    max_analytic_excess: float

    @property
    def passed(self) -> bool:
        return self.slope_within_cap and self.analytic_bound_ok

    def to_dict(self) -> dict:
        return {
            "measured_max_slope": self.measured_max_slope,
            "cap": self.cap,
            "tolerance": self.tolerance,
            "slope_within_cap": self.slope_within_cap,
            "analytic_bound_ok": self.analytic_bound_ok,
            "max_analytic_excess": self.max_analytic_excess,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class DistinguishabilityVerdict:
    epsilon: float
    eps_prime: float
    overlaps: dict  # (x, y) -> |<psi_x(T)|psi_y(T)>|
    failures: tuple
    passed: bool

    def to_dict(self) -> dict:
        worst = max(self.overlaps.items(), key=lambda kv: kv[1]) if self.overlaps else None
        return {
            "epsilon": self.epsilon,
            "eps_prime": self.eps_prime,
            "pairs_checked": len(self.overlaps),
            "overlaps": {f"{x},{y}": v for (x, y), v in sorted(self.overlaps.items())},
            "failures": [f"{x},{y}" for x, y in self.failures],
            "worst_pair": f"{worst[0][0]},{worst[0][1]}" if worst else None,
            "worst_overlap": worst[1] if worst else None,
            "passed": self.passed,
        }


def propagator(h: np.ndarray, duration: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, by spectral decomposition."""
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals * duration)) @ evecs.conj().T


def segment_sample_counts(schedule: DriverSchedule, samples_per_unit: float = DEFAULT_SAMPLES_PER_UNIT) -> list[int]:
    """Per-segment sample counts at a density given per query unit."""
    return [
        max(1, int(round(samples_per_unit * seg.duration / QUERY_UNIT)))
        for seg in schedule.segments
    ]


def _resolve_counts(schedule, samples_per_segment) -> list[int]:
    n = len(schedule.segments)
    if samples_per_segment is None:
        return segment_sample_counts(schedule)
    if isinstance(samples_per_segment, (int, np.integer)):
        counts = [int(samples_per_segment)] * n
    else:
        counts = [int(c) for c in samples_per_segment]
        if len(counts) != n:
            raise ValidationError(f"expected {n} per-segment sample counts, got {len(counts)}")
    if any(c < 1 for c in counts):
        raise ValidationError("samples_per_segment must be >= 1")
    return counts


def evolve(
    oracle: HamiltonianOracle,
    x: int,
    schedule: DriverSchedule,
    initial_state: np.ndarray | None = None,
    samples_per_segment=None,
) -> Trajectory:
    """Integrate i d/dt psi = (g H_Q(x) + H_D) psi across the schedule.

    Each constant segment is propagated by its exact unitary; states are
    sampled at equal subdivisions of the segment. Aborts if the state norm
    drifts by more than 1e-6.
    """
    if schedule.dim != oracle.dim:
        raise ValidationError(f"schedule dim {schedule.dim} != oracle dim {oracle.dim}")
    if initial_state is None:
        initial_state = uniform_query_state(oracle.n_bits, oracle.workspace)
    psi0 = np.asarray(initial_state, dtype=complex).reshape(-1)
    if psi0.shape != (oracle.dim,):
        raise ValidationError(f"initial state has dimension {psi0.shape}, need {oracle.dim}")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValidationError("initial state is not unit norm")
    counts = _resolve_counts(schedule, samples_per_segment)

    h_q = assemble(oracle, x)
    times = [0.0]
    states = [psi0]
    drift_max = 0.0
    t_start = 0.0
    psi_seg = psi0
    for seg, n_samples in zip(schedule.segments, counts):
        h = seg.g * h_q + seg.h_driver
        if np.max(np.abs(h - h.conj().T)) > 1e-10:
            raise IntegrationError(f"non-Hermitian segment operator at t={t_start}")
        evals, evecs = np.linalg.eigh(h)
        coeff = evecs.conj().T @ psi_seg
        for k in range(1, n_samples + 1):
            tau = seg.duration * k / n_samples
            psi = evecs @ (np.exp(-1j * evals * tau) * coeff)
            drift = abs(np.linalg.norm(psi) - 1.0)
            drift_max = max(drift_max, drift)
            if drift > 1e-6:
                raise IntegrationError(
                    f"norm drift {drift:.3e} beyond 1e-6 at t={t_start + tau} (input {x})"
                )
            times.append(t_start + tau)
            states.append(psi)
        psi_seg = states[-1]
        t_start += seg.duration

    times_arr = np.array(times)
    states_arr = np.array(states)
    times_arr.flags.writeable = False
    states_arr.flags.writeable = False
    return Trajectory(
        input=x, times=times_arr, states=states_arr, oracle=oracle, norm_drift_max=drift_max
    )


def schedule_unitary(oracle: HamiltonianOracle, x: int, schedule: DriverSchedule) -> np.ndarray:
    """Full propagator of the schedule on input x (later segments leftmost)."""
    u = np.eye(oracle.dim, dtype=complex)
    h_q = assemble(oracle, x)
    for seg in schedule.segments:
        u = propagator(seg.g * h_q + seg.h_driver, seg.duration) @ u
    return u


def _as_trajectory_map(trajectories) -> dict[int, Trajectory]:
    if isinstance(trajectories, dict):
        return dict(trajectories)
    return {traj.input: traj for traj in trajectories}


def _check_shared_grid(trajs: dict[int, Trajectory]):
    ref = next(iter(trajs.values()))
    for traj in trajs.values():
        if traj.times.shape != ref.times.shape or not np.allclose(
            traj.times, ref.times, rtol=0.0, atol=1e-12
        ):
            raise ValidationError("mismatched time grids across trajectories")
        if np.max(np.abs(traj.states[0] - ref.states[0])) > 1e-9:
            raise ValidationError("trajectories do not share the initial state")


def _slopes(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Centered finite-difference slope at interior samples, one-sided at ends."""
    n = len(times)
    out = np.zeros(n)
    if n < 2:
        return out
    out[0] = (values[1] - values[0]) / (times[1] - times[0])
    out[-1] = (values[-1] - values[-2]) / (times[-1] - times[-2])
    if n > 2:
        out[1:-1] = (values[2:] - values[:-2]) / (times[2:] - times[:-2])
    return out


def progress_trace(
    G: AdversaryMatrix, report: SpectralReport, trajectories
) -> ProgressTrace:
    """Progress measure, per-pair inner products, and query amplitudes.

    The sum runs over Gamma-supported pairs only (pairs with zero weight
    cannot contribute), and w(0) is checked against delta^T Gamma delta.
    """
    trajs = _as_trajectory_map(trajectories)
    if not trajs:
        raise ValidationError("no trajectories supplied")
    _check_shared_grid(trajs)

    pairs = G.supported_pairs()
    needed = {x for pair in pairs for x in pair}
    missing = sorted(needed - set(trajs))
    if missing:
        raise ValidationError(f"missing trajectories for inputs {missing}")

    ref = next(iter(trajs.values()))
    times = ref.times
    n_samples = len(times)
    delta = report.delta

    pair_inner: dict[tuple[int, int], np.ndarray] = {}
    w = np.zeros(n_samples, dtype=complex)
    for x, y in pairs:
        inner = np.sum(trajs[x].states.conj() * trajs[y].states, axis=1)
        pair_inner[(x, y)] = inner
        w += G.gamma[x, y] * delta[x] * delta[y] * (inner + inner.conj())

    w0_err = abs(w[0] - report.w0)
    if w0_err > 1e-9:
        raise ValidationError(
            f"w(0) = {w[0]} differs from delta^T Gamma delta = {report.w0} by {w0_err:.3e};"
            " report does not match the weight matrix"
        )

    oracle = ref.oracle
    projectors = [blk.projector for blk in oracle.blocks]
    beta = {}
    for x, traj in sorted(trajs.items()):
        b = np.empty((oracle.n_bits, n_samples))
        for j, p in enumerate(projectors):
            b[j] = np.linalg.norm(traj.states @ p.T, axis=1)
        beta[x] = b

    w_abs = np.abs(w)
    norm_drift = np.max(
        np.abs(
            np.stack([np.linalg.norm(t.states, axis=1) for t in trajs.values()]) - 1.0
        ),
        axis=0,
    )
    return ProgressTrace(
        times=times,
        w=w,
        w_abs=w_abs,
        pair_inner=pair_inner,
        beta=beta,
        dw_estimate=_slopes(times, w_abs),
        norm_drift=norm_drift,
        gamma=G,
        report=report,
    )


def check_derivative_bound(
    trace: ProgressTrace, report: SpectralReport | None = None
) -> DerivativeVerdict:
    """Compare the measured slope of |w| with the cap 2 max_j lambda(Gamma_j).

    Also evaluates the tighter per-sample bound 2 sum_j a_j^T Gamma_j a_j
    with a_j[x] = delta[x] * beta_{x,j} and checks the measured slope stays
    under it up to a sampling allowance.
    """
    if report is None:
        report = trace.report
    times = trace.times
    if len(times) < 2:
        raise ValidationError("derivative bound needs at least 2 samples")
    cap = report.cap
    tolerance = cap * (1.0 + 1e-6) + 1e-8

    if len(times) == 2:
        slopes = np.array([(trace.w_abs[1] - trace.w_abs[0]) / (times[1] - times[0])])
        slope_at = np.array([0])
    else:
        slopes = (trace.w_abs[2:] - trace.w_abs[:-2]) / (times[2:] - times[:-2])
        slope_at = np.arange(1, len(times) - 1)
    measured = float(np.max(np.abs(slopes))) if len(slopes) else 0.0
    slope_within_cap = measured <= tolerance

    # per-sample analytic bound over the inputs we have amplitudes for
    inputs = sorted(trace.beta)
    delta_sub = report.delta[inputs]
    n_bits = trace.gamma.n_bits
    subs = [gamma_sub(trace.gamma, j)[np.ix_(inputs, inputs)] for j in range(1, n_bits + 1)]
    betas = np.stack([trace.beta[x] for x in inputs])  # (inputs, bits, samples)
    analytic = np.zeros(len(times))
    for j in range(n_bits):
        a_j = delta_sub[:, None] * betas[:, j, :]  # (inputs, samples)
        analytic += 2.0 * np.einsum("is,ik,ks->s", a_j, subs[j], a_j)

    dt_max = float(np.max(np.diff(times)))
    # first-order allowance for the bound varying across one sample interval
    analytic_tol = 1e-8 + cap * 1e-6 + 2.0 * cap * dt_max
    excess = 0.0
    for slope, i in zip(np.abs(slopes), slope_at):
        local = np.max(analytic[max(0, i - 1): i + 2])
        excess = max(excess, float(slope - local))
    analytic_ok = excess <= analytic_tol

    return DerivativeVerdict(
        measured_max_slope=measured,
        cap=cap,
        tolerance=tolerance,
        slope_within_cap=bool(slope_within_cap),
        analytic_bound_ok=bool(analytic_ok),
        max_analytic_excess=excess,
    )


def output_condition(epsilon: float) -> float:
    """Largest final overlap that still allows error probability epsilon."""
    if not 0.0 <= epsilon <= 0.5:
        raise ValidationError(f"epsilon must lie in [0, 1/2], got {epsilon}")
    return 2.0 * np.sqrt(epsilon * (1.0 - epsilon))


def check_final_distinguishability(
    trajectories, f: BooleanFunction, epsilon: float, pairs=None
) -> DistinguishabilityVerdict:
    """Check |<psi_x(T)|psi_y(T)>| <= 2 sqrt(eps(1-eps)) on output-differing pairs.

    By default every differing-output pair among the supplied trajectories
    is checked; pass an explicit pair list (e.g. Gamma-supported pairs) to
    restrict to a promise set.
    """
    trajs = _as_trajectory_map(trajectories)
    eps_prime = output_condition(epsilon)
    if pairs is None:
        keys = sorted(trajs)
        pairs = [
            (x, y)
            for i, x in enumerate(keys)
            for y in keys[i + 1:]
            if f.table[x] != f.table[y]
        ]
    overlaps = {}
    failures = []
    for x, y in pairs:
        if f.table[x] == f.table[y]:
            continue  # the condition only constrains differing outputs
        val = float(abs(np.vdot(trajs[x].states[-1], trajs[y].states[-1])))
        overlaps[(x, y)] = val
        if val > eps_prime + 1e-9:
            failures.append((x, y))
    return DistinguishabilityVerdict(
        epsilon=float(epsilon),
        eps_prime=float(eps_prime),
        overlaps=overlaps,
        failures=tuple(failures),
        passed=not failures,
    )


@dataclass(frozen=True)
class FggMeasure:
    times: np.ndarray
    direct: np.ndarray  # ||psi_x - psi_y||^2 per sample
    from_inner: np.ndarray  # 2 - 2 Re<psi_x|psi_y> per sample


def fgg_measure(traj_x: Trajectory, traj_y: Trajectory) -> FggMeasure:
    """Squared state distance, computed directly and via the inner product."""
    if traj_x.times.shape != traj_y.times.shape or not np.allclose(
        traj_x.times, traj_y.times, rtol=0.0, atol=1e-12
    ):
        raise ValidationError("mismatched time grids")
    diff = traj_x.states - traj_y.states
    direct = np.sum(np.abs(diff) ** 2, axis=1)
    inner = np.sum(traj_x.states.conj() * traj_y.states, axis=1)
    return FggMeasure(
        times=traj_x.times, direct=direct, from_inner=2.0 - 2.0 * inner.real
    )


# ---------------------------------------------------------------------------
# delimited export
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def trace_to_csv(trace: ProgressTrace, path: str):
    """Write t, |w|, Re w, Im w, slope estimate, and norm drift per sample."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,abs_w,re_w,im_w,dw_estimate,norm_drift_max\n")
        for i, t in enumerate(trace.times):
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        t,
                        trace.w_abs[i],
                        trace.w[i].real,
                        trace.w[i].imag,
                        trace.dw_estimate[i],
                        trace.norm_drift[i],
                    )
                )
                + "\n"
            )


def pair_inner_to_csv(trace: ProgressTrace, path: str):
    """Wide per-pair inner-product table keyed by (x, y)."""
    pairs = sorted(trace.pair_inner)
    with open(path, "w", encoding="utf-8") as fh:
        header = ["t"]
        for x, y in pairs:
            header += [f"re_{x}_{y}", f"im_{x}_{y}"]
        fh.write(",".join(header) + "\n")
        for i, t in enumerate(trace.times):
            row = [_fmt(t)]
            for pair in pairs:
                z = trace.pair_inner[pair][i]
                row += [_fmt(z.real), _fmt(z.imag)]
            fh.write(",".join(row) + "\n")
