"""Built-in reference schedules used by the verification harness.

grover-or4         one exact Grover iteration on the 4-input OR (the
                   marked-input promise set is exactly the star-weighted
                   pairs, where a single iteration succeeds with
                   probability 1).
parity-2-discrete  two-query discrete parity: prepare, query, Hadamard
                   decode, query, finish. The second query only adds a
                   per-class global phase, so the final states stay exact
                   basis states.
driver-only-null   a single input-independent segment (g = 0, DFT driver);
                   nothing can be learned, the progress measure is frozen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import dft

from .boolfn import BooleanFunction, make_named
from .errors import ValidationError
from .oracle import (
    QUERY,
    DriverSchedule,
    HamiltonianOracle,
    compile_discrete,
    compile_fractional,
    standard_query_oracle,
)

CASE_STUDY_NAMES = ("grover-or4", "parity-2-discrete", "driver-only-null")


@dataclass(frozen=True)
class CaseStudy:
    name: str
    f: BooleanFunction
    oracle: HamiltonianOracle
    program: tuple

    def schedule(self, fractional_m: int = 1) -> DriverSchedule:
        if fractional_m == 1:
            return compile_discrete(self.program, self.oracle)
        return compile_fractional(self.program, fractional_m, self.oracle)


def grover_diffusion(dim: int) -> np.ndarray:
    u = np.full(dim, 1.0 / np.sqrt(dim))
    return 2.0 * np.outer(u, u) - np.eye(dim)


def get_case_study(name: str) -> CaseStudy:
    if name == "grover-or4":
        f = make_named("OR", 4)
        oracle = standard_query_oracle(4)
        program = (np.eye(4), QUERY, grover_diffusion(4))
    elif name == "parity-2-discrete":
        f = make_named("PARITY", 2)
        oracle = standard_query_oracle(2)
        hadamard = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        program = (np.eye(2), QUERY, hadamard, QUERY, np.eye(2))
    elif name == "driver-only-null":
        f = make_named("OR", 4)
        oracle = standard_query_oracle(4)
        program = (dft(4) / 2.0,)
    else:
        raise ValidationError(
            f"unknown case study {name!r}; expected one of {CASE_STUDY_NAMES}"
        )
    return CaseStudy(name=name, f=f, oracle=oracle, program=program)
