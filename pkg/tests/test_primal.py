import numpy as np
import pytest

from trigapprox.acsets import Complement, Explicit, HalfLine
from trigapprox.groups import GroupSpec, InvalidInput
from trigapprox.harness.oracle import oracle_distance
from trigapprox.laspace import TrigPolynomial, lalpha_norm
from trigapprox.measures import MatrixWeight, SpectralMeasure, constant_weight, polynomial_modulus_weight
from trigapprox.primal import UnsupportedScenario, primal_bound, primal_l2, primal_lalpha

G = GroupSpec.integer(1024)
AR = SpectralMeasure(polynomial_modulus_weight(G, [1.0, -0.5]))


@pytest.mark.parametrize("F", [1, 4, 16])
def test_unit_weight_singleton(F):
    m = SpectralMeasure(constant_weight(G, 1.0))
    assert primal_l2(m, Explicit((0,)), 0, 1, F).bound == pytest.approx(1.0, abs=1e-12)


def test_kolmogorov():
    p = primal_l2(AR, Explicit((0,)), 0, 1, 64)
    assert p.bound == pytest.approx(np.sqrt(0.75), abs=1e-9)


def test_cyclic_matches_oracle(rng):
    g = GroupSpec.cyclic(8)
    w = rng.uniform(0.2, 3.0, 8)
    m = SpectralMeasure(MatrixWeight(g, w[:, None, None]))
    mask = [x in (0, 3) for x in range(8)]
    p = primal_l2(m, Explicit((0, 3)), 3, 1, 4)
    assert p.bound == pytest.approx(oracle_distance(8, w, mask, 3), abs=1e-10)


@pytest.mark.parametrize("alpha", [1.5, 3.0])
def test_lalpha_constant_weight(alpha):
    for c in (1.0, 2.0):
        m = SpectralMeasure(constant_weight(G, c))
        p = primal_lalpha(m, Explicit((0,)), 0, alpha, 4)
        assert p.bound == pytest.approx(c ** (1 / alpha), rel=1e-9)


def test_lalpha_cyclic_oracle(rng):
    g = GroupSpec.cyclic(8)
    w = rng.uniform(0.2, 3.0, 8)
    m = SpectralMeasure(MatrixWeight(g, w[:, None, None]))
    mask = [x in (1, 2, 6) for x in range(8)]
    p = primal_lalpha(m, Explicit((1, 2, 6)), 2, 1.5, 4, tol=1e-12, max_iter=2000)
    assert p.bound == pytest.approx(oracle_distance(8, w, mask, 2, alpha=1.5), abs=1e-6)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_monotone_in_window(alpha):
    S = HalfLine("le", 0)
    vals = [primal_bound(AR, S, 0, 1, alpha, F).bound for F in (1, 2, 4, 8, 16)]
    assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_bound_recomputes(alpha):
    S = Complement(Explicit((1, 2)))
    p = primal_bound(AR, S, 0, 1, alpha, 6)
    residual = TrigPolynomial.character(0) - p.t
    assert lalpha_norm(residual, AR, alpha) == pytest.approx(p.bound, abs=1e-9)
    assert all(x in (1, 2) for x in p.t.support)


def test_alpha2_consistency():
    S = HalfLine("le", 0)
    a = primal_l2(AR, S, 0, 1, 12).bound
    b = primal_lalpha(AR, S, 0, 2.0, 12).bound
    assert a == pytest.approx(b, abs=1e-7)


def test_degenerate_weight():
    # w vanishes on half the circle; the Gram pseudoinverse absorbs it
    w = (G.angles > 0).astype(float)
    m = SpectralMeasure(MatrixWeight(G, w[:, None, None]))
    p = primal_l2(m, Explicit((0,)), 0, 1, 8)
    assert 0.0 <= p.bound <= np.sqrt(0.5) + 1e-12


def test_errors():
    m = SpectralMeasure(constant_weight(G, np.eye(2)))
    with pytest.raises(UnsupportedScenario):
        primal_bound(m, Explicit((0,)), 0, 1, 3.0, 4)
    with pytest.raises(InvalidInput):
        primal_l2(AR, Explicit((1,)), 0, 1, 4)
    with pytest.raises(InvalidInput):
        primal_l2(m, Explicit((0,)), 0, 3, 4)
    with pytest.raises(InvalidInput):
        primal_l2(SpectralMeasure(constant_weight(GroupSpec.integer(16), 1.0)), HalfLine("le", 0), 0, 1, 20)
