"""Spectral adversary matrices and the lower-bound quantities derived from them.

A weight matrix Gamma is symmetric, 2^N x 2^N, and zero on every pair of
inputs with equal output. Its spectral norm lambda(Gamma), the per-bit
restrictions Gamma_j, and the ratio lambda(Gamma) / max_j lambda(Gamma_j)
give the query lower bound; the ratio also fixes the minimum evolution
time once an allowed error is chosen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .boolfn import BooleanFunction, hamming_distance
from .errors import DegenerateMatrixError, ValidationError


class Mode(str, Enum):
    NONNEGATIVE = "nonnegative"
    GENERAL = "general"


RULE_MIN_HAMMING = "min-hamming"
RULE_ALL_DIFFERING = "all-differing"
RULE_CUSTOM = "custom"


@dataclass(frozen=True)
class AdversaryMatrix:
    f: BooleanFunction
    mode: Mode
    gamma: np.ndarray

    @property
    def n_bits(self) -> int:
        return self.f.n_bits

    def supported_pairs(self) -> list[tuple[int, int]]:
        """Upper-triangle pairs (x, y), x < y, carrying nonzero weight."""
        xs, ys = np.nonzero(np.triu(self.gamma, k=1))
        return [(int(x), int(y)) for x, y in zip(xs, ys)]


@dataclass(frozen=True)
class SpectralReport:
    lambda_gamma: float
    delta: np.ndarray
    lambda_gamma_j: tuple[float, ...]
    bound_ratio: float
    w0: float

    @property
    def cap(self) -> float:
        """Derivative cap 2 * max_j lambda(Gamma_j) on the progress measure."""
        return 2.0 * max(self.lambda_gamma_j)


def _bit_column(n_bits: int, j: int) -> np.ndarray:
    xs = np.arange(2 ** n_bits)
    return (xs >> (n_bits - j)) & 1


def bit_disagreement_mask(n_bits: int, j: int) -> np.ndarray:
    """Boolean matrix, True where inputs x and y differ in bit j."""
    bj = _bit_column(n_bits, j)
    return bj[:, None] != bj[None, :]


def validate(gamma: np.ndarray, f: BooleanFunction, mode: Mode = Mode.NONNEGATIVE) -> AdversaryMatrix:
    """Check a candidate weight matrix and wrap it; rejects rather than repairs."""
    mode = Mode(mode)
    gamma = np.asarray(gamma, dtype=float)
    size = f.n_inputs
    if gamma.shape != (size, size):
        raise ValidationError(f"gamma shape {gamma.shape} != ({size}, {size}) for N={f.n_bits}")
    if not np.array_equal(gamma, gamma.T):
        raise ValidationError("gamma is not exactly symmetric")
    table = np.asarray(f.table)
    same_output = table[:, None] == table[None, :]
    if np.any(gamma[same_output] != 0.0):
        x, y = next(zip(*np.nonzero(same_output & (gamma != 0.0))))
        raise ValidationError(
            f"gamma[{x},{y}] is nonzero but f({x}) == f({y})"
        )
    if mode is Mode.NONNEGATIVE and np.any(gamma < 0.0):
        x, y = next(zip(*np.nonzero(gamma < 0.0)))
        raise ValidationError(f"gamma[{x},{y}] < 0 in nonnegative mode")
    gamma = gamma.copy()
    gamma.flags.writeable = False
    return AdversaryMatrix(f=f, mode=mode, gamma=gamma)


def gamma_sub(G: AdversaryMatrix, j: int) -> np.ndarray:
    """Gamma restricted to pairs whose bit j disagrees (zero elsewhere)."""
    if not 1 <= j <= G.n_bits:
        raise ValidationError(f"bit index {j} out of range 1..{G.n_bits}")
    return np.where(bit_disagreement_mask(G.n_bits, j), G.gamma, 0.0)


def _spectral_norm(sym: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(sym)))) if sym.any() else 0.0


def _principal(sym: np.ndarray) -> tuple[float, np.ndarray]:
    """Eigenvalue of largest magnitude and its unit eigenvector, sign-fixed.

    Magnitude ties (e.g. the +-lambda pairs of bipartite weight graphs)
    resolve to the positive end, which for nonnegative matrices is the
    Perron value and keeps w0 = +lambda(Gamma).
    """
    evals, evecs = np.linalg.eigh(sym)
    scale = max(abs(evals[0]), abs(evals[-1]))
    if evals[-1] >= abs(evals[0]) - 1e-12 * scale:
        idx = len(evals) - 1
    else:
        idx = 0
    mu = float(evals[idx])
    vec = evecs[:, idx].copy()
    # deterministic sign: first meaningfully nonzero component positive
    scale = np.max(np.abs(vec))
    lead = np.nonzero(np.abs(vec) > 1e-12 * scale)[0]
    if lead.size and vec[lead[0]] < 0:
        vec = -vec
    return mu, vec


def spectral_report(G: AdversaryMatrix) -> SpectralReport:
    """lambda(Gamma), principal eigenvector, per-bit norms, and the bound ratio."""
    if not G.gamma.any():
        raise DegenerateMatrixError("gamma is identically zero; bound undefined")
    mu, delta = _principal(G.gamma)
    lam = abs(mu)
    lam_j = tuple(_spectral_norm(gamma_sub(G, j)) for j in range(1, G.n_bits + 1))
    delta = delta.copy()
    delta.flags.writeable = False
    return SpectralReport(
        lambda_gamma=lam,
        delta=delta,
        lambda_gamma_j=lam_j,
        bound_ratio=lam / max(lam_j),
        w0=mu,
    )


def min_time_bound(report: SpectralReport, epsilon: float) -> float:
    """Minimum evolution time implied by the bound ratio at error epsilon.

    Integrating the derivative cap from w(0) = lambda(Gamma) down to the
    output condition 2*sqrt(eps*(1-eps)) * w(0) gives
    T >= (1 - 2*sqrt(eps*(1-eps))) * ratio / 2, in the same time units as
    the dynamics (unit oracle rate; one discrete query lasts pi).
    """
    if not 0.0 <= epsilon < 0.5:
        raise ValidationError(f"epsilon must lie in [0, 1/2), got {epsilon}")
    eps_prime = 2.0 * np.sqrt(epsilon * (1.0 - epsilon))
    return (1.0 - eps_prime) * report.bound_ratio / 2.0


def differing_pairs(f: BooleanFunction) -> list[tuple[int, int]]:
    """All pairs (x, y), x < y, with f(x) != f(y)."""
    return [
        (x, y)
        for x in range(f.n_inputs)
        for y in range(x + 1, f.n_inputs)
        if f.table[x] != f.table[y]
    ]


def build_uniform_gamma(
    f: BooleanFunction,
    rule: str = RULE_MIN_HAMMING,
    weights: list[tuple[int, int, float]] | None = None,
    mode: Mode = Mode.NONNEGATIVE,
) -> AdversaryMatrix:
    """Convenience constructors for common weight matrices.

    min-hamming: weight 1 on every output-differing pair at minimum Hamming
    distance; all-differing: weight 1 on every output-differing pair;
    custom: install explicit (x, y, weight) entries, then validate.
    """
    size = f.n_inputs
    gamma = np.zeros((size, size))
    if rule == RULE_CUSTOM:
        if not weights:
            raise ValidationError("custom rule requires explicit pair weights")
        for x, y, w in weights:
            gamma[x, y] = w
            gamma[y, x] = w
        return validate(gamma, f, mode)
    pairs = differing_pairs(f)
    if not pairs:
        raise DegenerateMatrixError(f"{f.name}: constant function admits no weight matrix")
    if rule == RULE_MIN_HAMMING:
        dmin = min(hamming_distance(x, y) for x, y in pairs)
        pairs = [(x, y) for x, y in pairs if hamming_distance(x, y) == dmin]
    elif rule != RULE_ALL_DIFFERING:
        raise ValidationError(f"unknown gamma rule {rule!r}")
    for x, y in pairs:
        gamma[x, y] = 1.0
        gamma[y, x] = 1.0
    return validate(gamma, f, mode)


class _RatioObjective:
    """bound_ratio as a function of the weight vector over differing pairs."""

    def __init__(self, f: BooleanFunction, pairs: list[tuple[int, int]]):
        self.size = f.n_inputs
        self.xs = np.array([p[0] for p in pairs])
        self.ys = np.array([p[1] for p in pairs])
        self.masks = [bit_disagreement_mask(f.n_bits, j) for j in range(1, f.n_bits + 1)]

    def assemble(self, w: np.ndarray) -> np.ndarray:
        gamma = np.zeros((self.size, self.size))
        gamma[self.xs, self.ys] = w
        gamma[self.ys, self.xs] = w
        return gamma

    def __call__(self, w: np.ndarray) -> float:
        if not np.any(w):
            return -np.inf
        gamma = self.assemble(w)
        lam = _spectral_norm(gamma)
        lam_j = max(_spectral_norm(np.where(m, gamma, 0.0)) for m in self.masks)
        return lam / lam_j


def optimize_weights(
    f: BooleanFunction,
    mode: Mode = Mode.NONNEGATIVE,
    iterations: int = 200,
    step: float = 0.05,
    seed: int = 0,
) -> AdversaryMatrix:
    """Projected finite-difference ascent on the bound ratio over pair weights.

    Starts from the min-Hamming construction, follows a normalized
    finite-difference gradient, clips negative weights in nonnegative mode,
    and returns the best iterate seen. Deterministic for a fixed seed.
    """
    if iterations < 1:
        raise ValidationError("iterations must be >= 1")
    if step <= 0:
        raise ValidationError("step must be > 0")
    mode = Mode(mode)
    pairs = differing_pairs(f)
    if not pairs:
        raise DegenerateMatrixError(f"{f.name}: constant function admits no weight matrix")
    objective = _RatioObjective(f, pairs)
    rng = np.random.default_rng(seed)

    dmin = min(hamming_distance(x, y) for x, y in pairs)
    w = np.array([1.0 if hamming_distance(x, y) == dmin else 0.0 for x, y in pairs])

    def project(v: np.ndarray) -> np.ndarray:
        v = np.clip(v, 0.0, None) if mode is Mode.NONNEGATIVE else v.copy()
        peak = np.max(np.abs(v))
        return v / peak if peak > 1e3 else v

    best_w, best_r = w.copy(), objective(w)
    h = 1e-4
    for _ in range(iterations):
        grad = np.zeros_like(w)
        for p in range(len(pairs)):
            up = w.copy()
            up[p] += h
            down = w.copy()
            down[p] -= h
            if mode is Mode.NONNEGATIVE and down[p] < 0.0:
                grad[p] = (objective(up) - objective(w)) / h
            else:
                grad[p] = (objective(up) - objective(down)) / (2 * h)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < 1e-10:
            w = project(w + step * 0.1 * rng.standard_normal(len(pairs)))
        else:
            w = project(w + step * grad / gnorm)
        r = objective(w)
        if r > best_r:
            best_r, best_w = r, w.copy()
    return validate(objective.assemble(best_w), f, mode)


def sign_conjugate(G: AdversaryMatrix, flip_inputs: list[int]) -> AdversaryMatrix:
    """Negate the rows and columns of the given inputs (a diag(+-1) conjugation).

    Leaves every spectral quantity unchanged; the result generally needs
    general mode since entries change sign.
    """
    d = np.ones(G.f.n_inputs)
    d[list(flip_inputs)] = -1.0
    return validate(d[:, None] * G.gamma * d[None, :], G.f, Mode.GENERAL)


def gamma_to_json(G: AdversaryMatrix) -> dict:
    entries = [[x, y, float(G.gamma[x, y])] for x, y in G.supported_pairs()]
    return {"n_bits": G.n_bits, "mode": G.mode.value, "entries": entries}


def gamma_from_json(doc: dict, f: BooleanFunction) -> AdversaryMatrix:
    """Rebuild a weight matrix from its upper-triangle entry list."""
    try:
        n_bits = int(doc["n_bits"])
        mode = Mode(doc["mode"])
        entries = doc["entries"]
    except (KeyError, ValueError, TypeError) as exc:
        raise ValidationError(f"malformed gamma document: {exc}") from exc
    if n_bits != f.n_bits:
        raise ValidationError(f"gamma document is for N={n_bits}, function has N={f.n_bits}")
    gamma = np.zeros((f.n_inputs, f.n_inputs))
    seen: dict[tuple[int, int], float] = {}
    for entry in entries:
        x, y, w = int(entry[0]), int(entry[1]), float(entry[2])
        if x == y:
            raise ValidationError(f"diagonal entry [{x},{y}] not allowed")
        key = (min(x, y), max(x, y))
        if key in seen and seen[key] != w:
            raise ValidationError(f"conflicting weights for pair {key}")
        seen[key] = w
        gamma[key[0], key[1]] = w
        gamma[key[1], key[0]] = w
    return validate(gamma, f, mode)


def load_gamma(path: str, f: BooleanFunction) -> AdversaryMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return gamma_from_json(json.load(fh), f)


def report_to_json(report: SpectralReport) -> dict:
    return {
        "lambda_gamma": report.lambda_gamma,
        "delta": [float(v) for v in report.delta],
        "lambda_gamma_j": list(report.lambda_gamma_j),
        "bound_ratio": report.bound_ratio,
        "w0": report.w0,
    }
