"""Named example distributions, the dice family, and the I_min comparator."""

import numpy as np
import pytest

from uniqueinfo import (
    CANONICAL_NAMES,
    DiceParams,
    canonical,
    copy_distribution,
    dice,
    dice_sweep,
    from_table,
    i_min,
)
from uniqueinfo.errors import UnknownName


def test_all_names_build_valid_distributions():
    for name in CANONICAL_NAMES:
        P = canonical(name)
        assert P.names == ("X", "Y", "Z")
        assert P.mass.sum() == pytest.approx(1.0, abs=1e-12)


def test_names_are_case_insensitive():
    assert canonical("xor") == canonical("Xor")
    with pytest.raises(UnknownName):
        canonical("nope")


def test_example_shapes():
    assert canonical("Rdn").shape == (2, 2, 2)
    assert canonical("Unq").shape == (4, 2, 2)
    assert canonical("RdnXor").shape == (4, 4, 4)
    assert canonical("RdnUnqXor").shape == (16, 8, 8)
    assert canonical("XorAnd").shape == (3, 2, 2)


def test_base_informations_of_examples():
    xor = canonical("Xor")
    assert xor.mutual_info("X", "Y") == pytest.approx(0.0, abs=1e-12)
    assert xor.mutual_info("X", ("Y", "Z")) == pytest.approx(1.0, abs=1e-12)
    unq = canonical("Unq")
    assert unq.mutual_info("X", "Y") == pytest.approx(1.0, abs=1e-12)
    assert unq.mutual_info("X", ("Y", "Z")) == pytest.approx(2.0, abs=1e-12)


def test_copy_distribution_of_a_custom_source():
    source = from_table(
        {("a", "c"): 0.5, ("b", "c"): 0.25, ("b", "d"): 0.25},
        variables=None,
    )
    P = copy_distribution(source)
    assert P.names == ("X", "Y", "Z")
    assert P.entropy("X", given=("Y", "Z")) == pytest.approx(0.0, abs=1e-12)
    assert P.mutual_info("Y", "Z") == pytest.approx(
        source.mutual_info(source.names[0], source.names[1]), abs=1e-12
    )


def test_dice_params_validation():
    with pytest.raises(ValueError):
        DiceParams(0, 0.5).validate()
    with pytest.raises(ValueError):
        DiceParams(3, 1.5).validate()


def test_dice_structure():
    P = dice(DiceParams(6, 0.0))
    # identical dice: only the diagonal pairs occur
    yz = P.marginal(("Y", "Z")).mass
    np.testing.assert_allclose(yz, np.eye(6) / 6, atol=1e-15)
    # X = Y + 6Z separates all 36 pairs at lambda = 1
    assert len(dice(DiceParams(6, 1.0)).alphabet("X")) == 36
    assert len(dice(DiceParams(1, 1.0)).alphabet("X")) == 11


def test_i_min_on_named_examples():
    expected = {
        "Rdn": 1.0,
        "Unq": 1.0,
        "Xor": 0.0,
        "And": 0.75 * np.log2(4 / 3),
        "RdnXor": 1.0,
        "RdnUnqXor": 2.0,
        "XorAnd": 0.5,
        "Copy": 1.0,
    }
    for name, value in expected.items():
        assert i_min(canonical(name)) == pytest.approx(value, abs=1e-9), name


def test_dice_sweep_rows():
    rows = dice_sweep(1, [0.0, 1.0])
    assert [r.lam for r in rows] == [0.0, 1.0]
    assert rows[0].si == pytest.approx(np.log2(6), abs=1e-6)
    assert rows[0].ci == pytest.approx(0.0, abs=1e-6)
