"""Boolean functions on N bits, addressed by integer input index.

Convention used throughout the toolkit: an input index x in [0, 2^N)
encodes the bit string x_1 x_2 ... x_N with x_1 as the most significant
bit, so index 0 is the all-zeros input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ValidationError

FAMILIES = ("OR", "AND", "PARITY", "MAJORITY", "CONSTANT0")


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of f: {0,1}^N -> {0,1}, immutable once built."""

    n_bits: int
    table: tuple[int, ...]
    name: str = "custom"

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValidationError(f"n_bits must be >= 1, got {self.n_bits}")
        if len(self.table) != 2 ** self.n_bits:
            raise ValidationError(
                f"table length {len(self.table)} != 2^{self.n_bits}"
            )
        if any(v not in (0, 1) for v in self.table):
            raise ValidationError("truth table entries must be 0 or 1")

    @property
    def n_inputs(self) -> int:
        return 2 ** self.n_bits

    def value(self, x: int) -> int:
        return evaluate(self, x)

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1


def bit_of(x: int, j: int, n_bits: int) -> int:
    """Bit x_j of input index x, with j in 1..N and x_1 the MSB."""
    if not 1 <= j <= n_bits:
        raise ValidationError(f"bit index {j} out of range 1..{n_bits}")
    return (x >> (n_bits - j)) & 1


def make_named(family: str, n_bits: int) -> BooleanFunction:
    """Build one of the named test families on n_bits inputs."""
    fam = family.upper().replace("-", "").replace("_", "")
    if n_bits < 1:
        raise ValidationError(f"n_bits must be >= 1, got {n_bits}")
    size = 2 ** n_bits
    if fam == "OR":
        table = tuple(1 if x else 0 for x in range(size))
    elif fam == "AND":
        table = tuple(1 if x == size - 1 else 0 for x in range(size))
    elif fam == "PARITY":
        table = tuple(x.bit_count() % 2 for x in range(size))
    elif fam == "MAJORITY":
        if n_bits % 2 == 0:
            raise ValidationError("MAJORITY requires odd n_bits")
        table = tuple(1 if x.bit_count() > n_bits // 2 else 0 for x in range(size))
    elif fam == "CONSTANT0":
        table = tuple(0 for _ in range(size))
    else:
        raise ValidationError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return BooleanFunction(n_bits, table, name=f"{fam.lower()}_{n_bits}")


def evaluate(f: BooleanFunction, x: int) -> int:
    """f(x) for an input index x."""
    if not 0 <= x < f.n_inputs:
        raise ValidationError(f"input index {x} out of range for N={f.n_bits}")
    return f.table[x]


def differing_indices(x: int, y: int, n_bits: int) -> list[int]:
    """Sorted bit positions j (1-based, MSB first) where x and y disagree."""
    limit = 2 ** n_bits
    if not 0 <= x < limit or not 0 <= y < limit:
        raise ValidationError(f"input index out of range for N={n_bits}")
    diff = x ^ y
    return [j for j in range(1, n_bits + 1) if (diff >> (n_bits - j)) & 1]


def hamming_distance(x: int, y: int) -> int:
    return (x ^ y).bit_count()


def from_json(doc: dict) -> BooleanFunction:
    """Build a function from {"n_bits": N, "table": [0|1, ...]}."""
    try:
        n_bits = int(doc["n_bits"])
        table = tuple(int(v) for v in doc["table"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed truth-table document: {exc}") from exc
    return BooleanFunction(n_bits, table)


def load_function(path: str) -> BooleanFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(json.load(fh))
