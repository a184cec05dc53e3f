import json

import numpy as np
import pytest

from advbound.boolfn import (
    BooleanFunction,
    bit_of,
    differing_indices,
    evaluate,
    from_json,
    hamming_distance,
    load_function,
    make_named,
)
from advbound.errors import ValidationError


def test_named_tables_match_definitions():
    assert make_named("PARITY", 2).table == (0, 1, 1, 0)
    assert make_named("OR", 2).table == (0, 1, 1, 1)
    assert make_named("CONSTANT0", 3).table == (0,) * 8
    assert make_named("AND", 2).table == (0, 0, 0, 1)
    maj = make_named("MAJORITY", 3)
    assert maj.table == tuple(1 if bin(x).count("1") >= 2 else 0 for x in range(8))


def test_family_errors():
    with pytest.raises(ValidationError):
        make_named("MAJORITY", 4)  # needs odd n_bits
    with pytest.raises(ValidationError):
        make_named("XOR3", 2)
    with pytest.raises(ValidationError):
        make_named("OR", 0)


def test_evaluate_examples():
    assert evaluate(make_named("PARITY", 2), 0b01) == 1
    assert evaluate(make_named("OR", 4), 0b0000) == 0
    assert evaluate(make_named("MAJORITY", 3), 0b110) == 1


def test_evaluate_range_check():
    f = make_named("OR", 2)
    with pytest.raises(ValidationError):
        evaluate(f, 4)
    with pytest.raises(ValidationError):
        evaluate(f, -1)


def test_bit_order_msb_first():
    # x_1 is the most significant bit of the index
    assert bit_of(0b100, 1, 3) == 1
    assert bit_of(0b100, 2, 3) == 0
    assert bit_of(0b001, 3, 3) == 1


def test_differing_indices_examples():
    assert differing_indices(0b00, 0b11, 2) == [1, 2]
    assert differing_indices(0b0101, 0b0100, 4) == [4]
    assert differing_indices(9, 9, 4) == []


def test_differing_indices_range_check():
    with pytest.raises(ValidationError):
        differing_indices(0, 4, 2)


@pytest.mark.parametrize("n_bits", range(1, 13))
def test_parity_matches_mod2_sum_exhaustively(n_bits):
    f = make_named("PARITY", n_bits)
    for x in range(2 ** n_bits):
        assert evaluate(f, x) == bin(x).count("1") % 2


@pytest.mark.parametrize("n_bits", [2, 5, 9])
def test_differing_indices_symmetric_with_hamming_length(n_bits):
    rng = np.random.default_rng(n_bits)
    size = 2 ** n_bits
    for _ in range(200):
        x, y = rng.integers(0, size, size=2)
        fwd = differing_indices(int(x), int(y), n_bits)
        assert fwd == differing_indices(int(y), int(x), n_bits)
        assert len(fwd) == hamming_distance(int(x), int(y))
        assert (fwd == []) == (x == y)


def test_table_validation():
    with pytest.raises(ValidationError):
        BooleanFunction(2, (0, 1, 1))  # wrong length
    with pytest.raises(ValidationError):
        BooleanFunction(1, (0, 2))  # non-bit entry


def test_json_import(tmp_path):
    doc = {"n_bits": 2, "table": [0, 1, 1, 0]}
    f = from_json(doc)
    assert f.table == (0, 1, 1, 0)
    path = tmp_path / "fn.json"
    path.write_text(json.dumps(doc))
    assert load_function(str(path)).table == (0, 1, 1, 0)
    with pytest.raises(ValidationError):
        from_json({"n_bits": 2})
    with pytest.raises(ValidationError):
        from_json({"n_bits": 2, "table": [0, 1, 1]})
