import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_psd
from trigapprox.acsets import All, Complement, Explicit, HalfLine
from trigapprox.dual import (
    InfeasibleCertificate,
    SandwichViolation,
    density_check,
    dual_bound,
    dual_maximize_matrix,
    dual_maximize_scalar,
    dual_objective,
    dual_value_scalar,
    feasibility_residuals,
    gap_report,
)
from trigapprox.groups import GroupSpec
from trigapprox.harness.oracle import oracle_distance
from trigapprox.laspace import Exponents, TrigPolynomial
from trigapprox.measures import MatrixWeight, SpectralMeasure, constant_weight, polynomial_modulus_weight
from trigapprox.primal import PrimalResult, primal_bound

G = GroupSpec.integer(1024)
AR = polynomial_modulus_weight(G, [1.0, -0.5])
ONE = constant_weight(G, 1.0)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_value_unit(alpha):
    F, b = dual_value_scalar(TrigPolynomial.character(0), ONE, alpha, Explicit((0,)), 0)
    assert F == pytest.approx(1.0) and b == pytest.approx(1.0)


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_value_singleton_family(alpha):
    e = Exponents(alpha)
    h = TrigPolynomial.character(2)
    _, b = dual_value_scalar(h, AR, e, Explicit((2,)), 2)
    want = np.mean(AR.scalar ** -e.beta) ** (-1 / e.conjugate)
    assert b == pytest.approx(want, rel=1e-12)


def test_value_empty_and_infeasible():
    assert dual_value_scalar(None, ONE, 2.0, Explicit((0,)), 0) == (np.inf, 0.0)
    with pytest.raises(InfeasibleCertificate):
        dual_value_scalar(TrigPolynomial({0: 1.0, 1: 0.3}), ONE, 2.0, Explicit((0,)), 0)
    with pytest.raises(InfeasibleCertificate):
        dual_value_scalar(TrigPolynomial.character(0, 2.0), ONE, 2.0, Explicit((0,)), 0)


def test_maximize_unit():
    c = dual_maximize_scalar(ONE, Explicit((0,)), 0, 2.0, 4)
    assert c.lower_bound == pytest.approx(1.0, abs=1e-12)
    assert c.h.support == [0] and c.h.coefficient(0)[0] == pytest.approx(1.0)


def test_window_too_small_gives_empty():
    c = dual_bound(ONE, Explicit((5,)), 5, 1, 2.0, 2)
    assert c.empty and c.lower_bound == 0.0


def test_szego():
    c = dual_bound(AR, HalfLine("le", 0), 0, 1, 2.0, 64)
    assert c.lower_bound == pytest.approx(1.0, abs=1e-6)
    assert c.lower_bound <= primal_bound(SpectralMeasure(AR), HalfLine("le", 0), 0, 1, 2.0, 64).bound + 1e-9


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_cyclic_strong_duality(rng, alpha):
    g = GroupSpec.cyclic(8)
    w = rng.uniform(0.2, 3.0, 8)
    W = MatrixWeight(g, w[:, None, None])
    S = Explicit((0, 2, 5))
    c = dual_bound(W, S, 5, 1, alpha, 4, tol=1e-12, max_iter=2000)
    o = oracle_distance(8, w, [x in (0, 2, 5) for x in range(8)], 5, alpha=alpha)
    assert c.lower_bound == pytest.approx(o, abs=1e-8 if alpha == 2.0 else 1e-6)


def test_matrix_identity():
    W = constant_weight(G, np.eye(2))
    c = dual_maximize_matrix(W, Explicit((0,)), 0, 1, 3)
    assert c.lower_bound == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(c.h.coefficient(0), [1.0, 0.0])


def test_matrix_closed_form_positive(rng):
    g = GroupSpec.cyclic(6)
    Wm = np.array([random_psd(rng, 2) for _ in range(6)])
    W = MatrixWeight(g, Wm)
    A = W.pinv().mean(axis=0)
    for k in (1, 2):
        c = dual_maximize_matrix(W, Explicit((0,)), 0, k, 3)
        assert c.lower_bound == pytest.approx(np.sqrt(np.linalg.inv(A)[k - 1, k - 1].real), abs=1e-10)


def test_matrix_rank_drop_needs_common_range(rng):
    # with a rank-one node the plain formula overshoots; the oracle sides with the dual
    g = GroupSpec.cyclic(6)
    Wm = np.array([random_psd(rng, 2) for _ in range(6)])
    Wm[2] = random_psd(rng, 2, 1)
    W = MatrixWeight(g, Wm)
    plain = np.sqrt(np.linalg.inv(W.pinv().mean(axis=0))[1, 1].real)
    c = dual_maximize_matrix(W, Explicit((0,)), 0, 2, 3)
    o = oracle_distance(6, Wm, [x == 0 for x in range(6)], 0, 2)
    assert c.lower_bound == pytest.approx(o, abs=1e-10)
    assert abs(plain - o) > 1e-3
    assert feasibility_residuals(c.h, Explicit((0,)), 0, 2, W)["carrier"] < 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.sampled_from([1.5, 2.0, 3.0]), c=st.complex_numbers(min_magnitude=0.01, max_magnitude=100))
def test_homogeneity(seed, alpha, c):
    rng = np.random.default_rng(seed)
    h = TrigPolynomial.from_arrays([-2, 0, 3], rng.normal(size=3) + 1j * rng.normal(size=3))
    assert dual_objective(h.scale(c), AR, alpha) == pytest.approx(abs(c) * dual_objective(h, AR, alpha), rel=1e-12)


def test_constrained_reformulation(rng):
    # sup G/F over random feasible directions never beats the optimum 1/min F
    g = GroupSpec.cyclic(8)
    w = rng.uniform(0.2, 3.0, 8)
    W = MatrixWeight(g, w[:, None, None])
    S = Explicit((0, 1, 4))
    best = dual_bound(W, S, 0, 1, 2.0, 4)
    for _ in range(200):
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        h = TrigPolynomial.from_arrays([0, 1, 4], c)
        ratio = abs(np.conj(c[0])) / dual_objective(h, W, 2.0)
        assert ratio <= best.bound + 1e-12


def test_feasibility_exact_by_support():
    c = dual_bound(AR, HalfLine("le", 0), 0, 1, 2.0, 16)
    assert c.residuals["vanishing"] == 0.0
    assert all(x <= 0 for x in c.h.support)
    assert abs(c.residuals["pinned"]) <= 1e-10


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
def test_monotone_lower_bounds(alpha):
    S = HalfLine("le", 0)
    vals = [dual_bound(AR, S, 0, 1, alpha, H).lower_bound for H in (0, 1, 2, 4, 8)]
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))


def test_density_examples():
    rep = density_check(ONE, Explicit((0,)))
    assert rep.verdict == "not dense" and rep.witness.lower_bound == pytest.approx(1.0)
    assert density_check(ONE, All()).verdict == "not dense"
    g = GroupSpec.cyclic(8)
    w = np.linspace(0.5, 2.0, 8)
    W = MatrixWeight(g, w[:, None, None])
    e = Exponents(3.0)
    rep = density_check(W, Explicit((3,)), e)
    assert rep.witness.lower_bound == pytest.approx(np.mean(w ** -e.beta) ** (-1 / e.conjugate), rel=1e-12)


def test_density_inconclusive():
    # w = 0 leaves no admissible certificate, so nothing can be proven
    rep = density_check(constant_weight(G, 0.0), Explicit((0,)), 2.0, 2)
    assert rep.dense is None


def test_gap_report():
    c = dual_bound(ONE, Explicit((0,)), 0, 1, 2.0, 2)
    ok = gap_report(PrimalResult(1.0, TrigPolynomial(), 2, 2.0), c)
    assert ok["absolute_gap"] <= 1e-9
    with pytest.raises(SandwichViolation):
        gap_report(PrimalResult(0.5, TrigPolynomial(), 2, 2.0), c)


def test_certificate_export_reverifies():
    c = dual_bound(AR, HalfLine("le", 0), 0, 1, 2.0, 8)
    d = c.to_dict()
    h = TrigPolynomial({f["frequency"]: complex(*f["coefficient"][0]) for f in d["coefficients"]})
    _, b = dual_value_scalar(h, AR, 2.0, HalfLine("le", 0), 0)
    assert b == pytest.approx(d["bound"], rel=1e-12)


def test_singular_atoms_ignored_by_dual_lower_bound():
    m = SpectralMeasure(AR, ((100, np.array([[0.7]])),))
    S = Complement(HalfLine("ge", 1))
    c = dual_bound(m.ac, S, 0, 1, 2.0, 32)
    p = primal_bound(m, S, 0, 1, 2.0, 32)
    assert c.lower_bound <= p.bound + 1e-9
