"""Joint distribution container and Shannon quantities."""

import numpy as np
import pytest

from conftest import random_joint
from uniqueinfo import Alphabet, from_table
from uniqueinfo.errors import (
    DuplicateEntry,
    NegativeMass,
    NotNormalized,
    UnknownVariable,
)

AND_TABLE = {
    ("0", "0", "0"): 0.25,
    ("0", "0", "1"): 0.25,
    ("0", "1", "0"): 0.25,
    ("1", "1", "1"): 0.25,
}


def and_distribution():
    return from_table(
        AND_TABLE,
        variables=[(n, Alphabet(["0", "1"])) for n in ("X", "Y", "Z")],
    )


def test_alphabet_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        Alphabet(["a", "a"])
    with pytest.raises(ValueError):
        Alphabet([])
    a = Alphabet(["lo", "hi"])
    assert a.index("hi") == 1
    with pytest.raises(KeyError):
        a.index("mid")


def test_from_table_builds_and():
    P = and_distribution()
    assert P.names == ("X", "Y", "Z")
    assert P.shape == (2, 2, 2)
    assert P.mass[0, 0, 0] == 0.25
    assert P.mass[1, 0, 0] == 0.0


def test_from_table_point_mass():
    P = from_table([(("a",), 1.0)])
    assert P.entropy() == 0.0


def test_from_table_rejects_bad_input():
    with pytest.raises(NotNormalized):
        from_table({("0",): 0.5})
    with pytest.raises(DuplicateEntry):
        from_table([(("0", "0"), 0.5), (("0", "0"), 0.5)])
    with pytest.raises(NegativeMass):
        from_table({("0",): -0.1, ("1",): 1.1})


def test_mass_is_read_only():
    P = and_distribution()
    with pytest.raises(ValueError):
        P.mass[0, 0, 0] = 1.0


def test_marginals_of_and():
    P = and_distribution()
    np.testing.assert_allclose(P.marginal("X").mass, [0.75, 0.25])
    np.testing.assert_allclose(P.marginal(("Y", "Z")).mass, 0.25 * np.ones((2, 2)))
    # listed order is preserved even against the storage order
    np.testing.assert_allclose(
        P.marginal(("Z", "X")).mass, P.marginal(("X", "Z")).mass.T
    )
    with pytest.raises(UnknownVariable):
        P.marginal("W")


def test_entropy_values():
    P = and_distribution()
    h = lambda p: -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    assert P.entropy("X") == pytest.approx(h(0.25), abs=1e-12)
    assert P.entropy("Y") == pytest.approx(1.0, abs=1e-12)
    # X is a function of (Y,Z)
    assert P.entropy("X", given=("Y", "Z")) == pytest.approx(0.0, abs=1e-12)


def test_mutual_info_values():
    P = and_distribution()
    assert P.mutual_info("X", ("Y", "Z")) == pytest.approx(
        P.entropy("X"), abs=1e-12
    )
    assert P.mutual_info("Y", "Z") == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        P.mutual_info("X", "X")


def test_chain_rule_on_random_distributions():
    rng = np.random.default_rng(11)
    for _ in range(20):
        shape = tuple(rng.integers(2, 4, size=3))
        P = random_joint(rng, shape)
        lhs = P.mutual_info("X", ("Y", "Z"))
        rhs = P.mutual_info("X", "Y") + P.mutual_info("X", "Z", given="Y")
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_co_information_two_expressions_agree():
    rng = np.random.default_rng(12)
    for _ in range(20):
        P = random_joint(rng, tuple(rng.integers(2, 4, size=3)))
        direct = P.co_information()
        summed = (
            P.mutual_info("X", "Y")
            + P.mutual_info("X", "Z")
            - P.mutual_info("X", ("Y", "Z"))
        )
        assert direct == pytest.approx(summed, abs=1e-10)


def test_co_information_signs():
    rdn = from_table({("0", "0", "0"): 0.5, ("1", "1", "1"): 0.5})
    assert rdn.co_information() == pytest.approx(1.0, abs=1e-12)
    xor = from_table(
        {(str(a ^ b), str(a), str(b)): 0.25 for a in (0, 1) for b in (0, 1)}
    )
    assert xor.co_information() == pytest.approx(-1.0, abs=1e-12)
    assert and_distribution().co_information() == pytest.approx(
        0.75 * np.log2(4 / 3) - 0.5, abs=1e-6
    )


def test_pair_marginals_of_and():
    pm = and_distribution().pair_marginals()
    np.testing.assert_allclose(pm.p, [0.75, 0.25])
    np.testing.assert_allclose(pm.kappa[0], [2 / 3, 1 / 3])
    np.testing.assert_allclose(pm.kappa[1], [0.0, 1.0])
    # kappa rows reproduce the (X,Y) marginal on the support
    np.testing.assert_allclose(
        pm.p[:, None] * pm.kappa, and_distribution().marginal(("X", "Y")).mass
    )


def test_pair_marginals_off_support_rows_are_nan():
    P = from_table(
        {("0", "0", "0"): 0.5, ("0", "1", "1"): 0.5},
        variables=[(n, Alphabet(["0", "1"])) for n in ("X", "Y", "Z")],
    )
    pm = P.pair_marginals()
    assert not pm.support[1]
    assert np.isnan(pm.kappa[1]).all() and np.isnan(pm.mu[1]).all()


def test_reorder_round_trip():
    rng = np.random.default_rng(13)
    P = random_joint(rng, (2, 3, 2))
    Q = P.reorder(("Z", "X", "Y")).reorder(("X", "Y", "Z"))
    assert Q == P
