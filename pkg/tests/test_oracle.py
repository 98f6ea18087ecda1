"""Cross-checks of the relation-based pipeline against the independent
classifying-space model (tests/oracle_bu.py)."""

from fractions import Fraction

import pytest

from fglab.adams import DPoly, nki_coeffs, psi_on_dk, psi_power_coeff
from fglab.cannibal import theta3_closed

from oracle_bu import BUOracle


@pytest.fixture(scope="module")
def oracle10():
    return BUOracle(10)


def test_oracle_self_consistency(oracle10):
    """Naturality: the ring-map action of psi on the model agrees with the
    tensor-factorized matrix action on every a_ij."""
    for i in range(1, 5):
        for j in range(i, 6 - i + 2):
            if i + j > 7:
                continue
            lhs = oracle10.psi(oracle10.a(i, j))
            rhs_terms = None
            from fglab.series import MultiSeries
            from fglab.rings import RAT
            rhs = MultiSeries.zero(RAT, oracle10.vars, oracle10.W, oracle10.weights)
            for m in range(0, i + 1):
                cm = psi_power_coeff(3, m, i)
                if not cm:
                    continue
                for n in range(0, j + 1):
                    cn = psi_power_coeff(3, n, j)
                    if not cn:
                        continue
                    rhs = rhs + oracle10.a(m, n).scale(Fraction(cm * cn))
            assert lhs == rhs, (i, j)


def test_oracle_dk_images_independent(oracle10):
    """The d-monomial images in the model are linearly independent, so the
    coordinate solve is unique (quotient genuinely polynomial)."""
    coords = oracle10.solve_in_d(oracle10.d(5) * oracle10.d(2), 7)
    assert coords == {(2, 5): 1}


def test_reducer_matches_oracle_through_weight_10(reducer10, oracle10):
    for k in range(2, 11):
        want = oracle10.psi_dk_coords(k)
        assert want is not None, k
        assert psi_on_dk(k, reducer10) == DPoly(want), k


def test_thom_matches_oracle(reducer10, thom_table10, oracle10):
    """Lemma-7-style pairing evaluated wholly inside the model."""
    from fglab.series import MultiSeries
    from fglab.rings import RAT
    for k in range(2, 11):
        total = MultiSeries.zero(RAT, oracle10.vars, oracle10.W, oracle10.weights)
        for i, cnk in nki_coeffs(k, "auto").items():
            for m in range(0, i + 1):
                for n in range(0, k - i + 1):
                    c = theta3_closed(m, n)
                    if not c:
                        continue
                    total = total + oracle10.psi(oracle10.a(i - m, k - i - n)).scale(
                        Fraction(cnk) * c)
        coords = oracle10.solve_in_d(total, k)
        assert coords is not None, k
        assert DPoly(coords) == thom_table10[k], k
