"""Hamiltonian oracles, driver schedules, and query-program compilation.

The input enters the dynamics through H_Q(x) = sum_j H_j^{(x_j)}, where
each block acts inside its own orthogonal subspace V_j and is stored with
operator norm at most 1. Time is measured at that unit rate, so one
discrete phase query corresponds to a segment of duration pi: a "query
unit". Compiled schedules carry raw durations; QUERY_UNIT converts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .boolfn import bit_of
from .errors import ValidationError

QUERY_UNIT = np.pi  # raw duration of one discrete query at unit oracle rate

QUERY = "query"  # program marker for an oracle call

_ATOL = 1e-12


def _hermitian(m: np.ndarray, what: str, atol: float = _ATOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be a square matrix")
    if np.max(np.abs(m - m.conj().T)) > atol:
        raise ValidationError(f"{what} is not Hermitian within {atol}")
    return m


def operator_norm(h: np.ndarray) -> float:
    """Spectral norm of a Hermitian operator."""
    return float(np.max(np.abs(np.linalg.eigvalsh(h)))) if h.any() else 0.0


@dataclass(frozen=True)
class OracleBlock:
    """Per-index block: projector P_j onto V_j plus the two operators H_j^{(b)}."""

    index: int
    projector: np.ndarray
    h0: np.ndarray
    h1: np.ndarray

    def __post_init__(self):
        p = _hermitian(self.projector, f"projector P_{self.index}")
        if np.max(np.abs(p @ p - p)) > _ATOL:
            raise ValidationError(f"P_{self.index} is not idempotent within {_ATOL}")
        for name, h in (("h0", self.h0), ("h1", self.h1)):
            h = _hermitian(h, f"block {self.index} {name}")
            if np.max(np.abs(p @ h @ p - h)) > _ATOL:
                raise ValidationError(
                    f"block {self.index} {name} is not confined to V_{self.index}"
                )
            if operator_norm(h) > 1.0 + _ATOL:
                raise ValidationError(f"block {self.index} {name} exceeds norm 1")
        object.__setattr__(self, "projector", _freeze(p))
        object.__setattr__(self, "h0", _freeze(np.asarray(self.h0, dtype=complex)))
        object.__setattr__(self, "h1", _freeze(np.asarray(self.h1, dtype=complex)))

    def operator(self, bit: int) -> np.ndarray:
        return self.h1 if bit else self.h0


def _freeze(m: np.ndarray) -> np.ndarray:
    m = m.copy()
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class HamiltonianOracle:
    n_bits: int
    dim: int
    blocks: tuple[OracleBlock, ...]
    workspace: int = 1

    def __post_init__(self):
        if len(self.blocks) != self.n_bits:
            raise ValidationError(f"need {self.n_bits} blocks, got {len(self.blocks)}")
        for b in self.blocks:
            if b.projector.shape != (self.dim, self.dim):
                raise ValidationError(f"block {b.index} dimension != {self.dim}")
        for a in self.blocks:
            for b in self.blocks:
                if a.index != b.index and np.max(np.abs(a.projector @ b.projector)) > _ATOL:
                    raise ValidationError(
                        f"subspaces V_{a.index} and V_{b.index} are not orthogonal"
                    )


def assemble(oracle: HamiltonianOracle, x: int) -> np.ndarray:
    """H_Q(x) = sum_j H_j^{(x_j)} for the input index x."""
    if not 0 <= x < 2 ** oracle.n_bits:
        raise ValidationError(f"input index {x} out of range for N={oracle.n_bits}")
    h = np.zeros((oracle.dim, oracle.dim), dtype=complex)
    for block in oracle.blocks:
        h += block.operator(bit_of(x, block.index, oracle.n_bits))
    return h


def standard_query_oracle(n_bits: int, workspace: int = 1) -> HamiltonianOracle:
    """Phase-query oracle on basis |j,k>, j = 1..N, k = 0..K-1.

    Block j projects onto span{|j,k>}; h0 = 0 and h1 = P_j, so evolving
    for one query unit (duration pi, g = 1) multiplies every |j,k> with
    x_j = 1 by -1, reproducing the discrete phase oracle exactly.
    """
    if n_bits < 1 or workspace < 1:
        raise ValidationError("n_bits and workspace must be >= 1")
    dim = n_bits * workspace
    blocks = []
    for j in range(1, n_bits + 1):
        p = np.zeros((dim, dim), dtype=complex)
        for k in range(workspace):
            idx = (j - 1) * workspace + k
            p[idx, idx] = 1.0
        blocks.append(OracleBlock(index=j, projector=p, h0=np.zeros_like(p), h1=p))
    return HamiltonianOracle(n_bits=n_bits, dim=dim, blocks=tuple(blocks), workspace=workspace)


def uniform_query_state(n_bits: int, workspace: int = 1) -> np.ndarray:
    """Uniform superposition over the index states |j, k=0>."""
    dim = n_bits * workspace
    psi = np.zeros(dim, dtype=complex)
    psi[[(j - 1) * workspace for j in range(1, n_bits + 1)]] = 1.0 / np.sqrt(n_bits)
    return psi


@dataclass(frozen=True)
class Segment:
    duration: float
    g: float
    h_driver: np.ndarray

    def __post_init__(self):
        if not self.duration > 0:
            raise ValidationError(f"segment duration must be > 0, got {self.duration}")
        if abs(self.g) > 1.0:
            raise ValidationError(f"|g| must be <= 1, got {self.g}")
        object.__setattr__(self, "h_driver", _freeze(_hermitian(self.h_driver, "h_driver")))


@dataclass(frozen=True)
class DriverSchedule:
    dim: int
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for seg in self.segments:
            if seg.h_driver.shape != (self.dim, self.dim):
                raise ValidationError("segment driver dimension mismatch")

    @property
    def total_time(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    @property
    def query_units(self) -> float:
        return self.total_time / QUERY_UNIT


def unitary_log_generator(u: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Hermitian H with exp(-i * QUERY_UNIT * H) = U, eigenphases in (-pi, pi].

    Schur on the (normal) unitary gives an orthonormal eigenbasis, which
    keeps the round trip exact to machine precision even for degenerate
    eigenvalues.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError("unitary must be a square matrix")
    dim = u.shape[0]
    if np.max(np.abs(u.conj().T @ u - np.eye(dim))) > atol:
        raise ValidationError(f"matrix is not unitary within {atol}")
    t, z = schur(u, output="complex")
    phases = np.angle(np.diagonal(t))
    h = z @ np.diag(-phases / QUERY_UNIT) @ z.conj().T
    return (h + h.conj().T) / 2.0


def _program_items(program) -> list:
    items = list(program)
    if not items:
        raise ValidationError("empty program")
    return items


def compile_discrete(program, oracle: HamiltonianOracle) -> DriverSchedule:
    """Compile an alternating unitaries/queries program into a schedule.

    Every item becomes one segment of duration QUERY_UNIT (one query unit):
    queries run the oracle at g = 1 with no driver; a unitary U becomes a
    driver-only segment whose generator is the principal logarithm of U.
    """
    segments = []
    for item in _program_items(program):
        if isinstance(item, str):
            if item != QUERY:
                raise ValidationError(f"unknown program item {item!r}")
            segments.append(
                Segment(QUERY_UNIT, 1.0, np.zeros((oracle.dim, oracle.dim)))
            )
        else:
            u = np.asarray(item, dtype=complex)
            if u.shape != (oracle.dim, oracle.dim):
                raise ValidationError(
                    f"unitary shape {u.shape} does not match oracle dim {oracle.dim}"
                )
            segments.append(Segment(QUERY_UNIT, 0.0, unitary_log_generator(u)))
    return DriverSchedule(dim=oracle.dim, segments=tuple(segments))


def compile_fractional(program, m: int, oracle: HamiltonianOracle) -> DriverSchedule:
    """As compile_discrete, but each query is split into m equal sub-segments.

    The sub-segments compose to the discrete query exactly; m = 1 gives the
    discrete schedule verbatim.
    """
    if m < 1:
        raise ValidationError(f"fractional order m must be >= 1, got {m}")
    segments = []
    for item in _program_items(program):
        if isinstance(item, str) and item == QUERY:
            zero = np.zeros((oracle.dim, oracle.dim))
            segments.extend(Segment(QUERY_UNIT / m, 1.0, zero) for _ in range(m))
        else:
            segments.extend(compile_discrete([item], oracle).segments)
    return DriverSchedule(dim=oracle.dim, segments=tuple(segments))


# ---------------------------------------------------------------------------
# JSON wire formats
# ---------------------------------------------------------------------------

def _complex_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _pairs_to_complex(rows) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed complex matrix: {exc}") from exc


def schedule_to_json(schedule: DriverSchedule) -> dict:
    return {
        "dim": schedule.dim,
        "segments": [
            {
                "duration": float(seg.duration),
                "g": float(seg.g),
                "h_driver": _complex_to_pairs(seg.h_driver),
            }
            for seg in schedule.segments
        ],
    }


def schedule_from_json(doc: dict) -> DriverSchedule:
    try:
        dim = int(doc["dim"])
        raw = doc["segments"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed schedule document: {exc}") from exc
    segments = tuple(
        Segment(float(s["duration"]), float(s["g"]), _pairs_to_complex(s["h_driver"]))
        for s in raw
    )
    return DriverSchedule(dim=dim, segments=segments)


def program_to_json(program) -> list:
    doc = []
    for item in _program_items(program):
        if isinstance(item, str):
            doc.append({"type": "query"})
        else:
            doc.append({"type": "unitary", "matrix": _complex_to_pairs(item)})
    return doc


def program_from_json(doc) -> list:
    program = []
    for item in doc:
        kind = item.get("type")
        if kind == "query":
            program.append(QUERY)
        elif kind == "unitary":
            program.append(_pairs_to_complex(item["matrix"]))
        else:
            raise ValidationError(f"unknown program item type {kind!r}")
    return program


def load_schedule(path: str) -> DriverSchedule:
    with open(path, "r", encoding="utf-8") as fh:
        return schedule_from_json(json.load(fh))


def load_program(path: str) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        return program_from_json(json.load(fh))
