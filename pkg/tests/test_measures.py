import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_psd
from trigapprox.groups import GroupSpec, InvalidInput
from trigapprox.laspace import lalpha_power
from trigapprox.measures import (
    MatrixWeight,
    SpectralMeasure,
    add_measures,
    constant_weight,
    moore_penrose,
    normalize_equivalence,
    parse_atom_table,
    parse_weight_table,
    piecewise_constant_weight,
    polynomial_modulus_weight,
    range_projection,
    restrict,
)


def test_pinv_examples():
    assert np.allclose(moore_penrose(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    assert np.allclose(moore_penrose(np.eye(3)), np.eye(3))
    u = np.array([1.0, 1j])
    H = np.outer(u, u.conj())
    assert np.allclose(moore_penrose(H), H / 4)


def test_pinv_rejects_non_hermitian():
    with pytest.raises(InvalidInput):
        moore_penrose(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=60, deadline=None)
@given(q=st.integers(1, 3), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_penrose_identities(q, seed, data):
    rng = np.random.default_rng(seed)
    rank = data.draw(st.integers(0, q))
    H = random_psd(rng, q, rank) if rank else np.zeros((q, q))
    Hp = moore_penrose(H)
    tol = 1e-10 * max(1.0, np.abs(H).max(), np.abs(Hp).max())
    assert np.abs(H @ Hp @ H - H).max() <= tol * max(1.0, np.abs(H).max())
    assert np.abs(Hp @ H @ Hp - Hp).max() <= tol * max(1.0, np.abs(Hp).max())
    assert np.abs(H @ Hp - (H @ Hp).conj().T).max() <= tol
    assert np.abs(Hp @ H - (Hp @ H).conj().T).max() <= tol
    P = range_projection(H)
    assert np.abs(P - Hp @ H).max() <= 1e-10
    assert np.allclose(P @ P, P) and np.allclose(P, P.conj().T)
    assert np.linalg.matrix_rank(P, tol=0.5) == rank


def test_projection_examples():
    assert np.allclose(range_projection(np.diag([3.0, 1.0])), np.eye(2))
    assert np.allclose(range_projection(np.zeros((2, 2))), 0)
    assert np.allclose(range_projection(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]))


def test_scalar_pinv_piecewise():
    w = np.array([0.0, 0.5, 2.0, 0.0, 4.0])
    got = np.array([moore_penrose(np.array([[v]]))[0, 0].real for v in w])
    want = np.where(w != 0, 1.0 / np.where(w != 0, w, 1.0), 0.0)
    assert np.array_equal(got, want)


def test_normalize_equivalence(rng):
    g = GroupSpec.integer(16)
    f = np.ones((16, 2), dtype=complex)
    assert np.allclose(normalize_equivalence(f, constant_weight(g, np.eye(2))), f)
    out = normalize_equivalence(f, constant_weight(g, np.diag([1.0, 0.0])))
    assert np.allclose(out, np.tile([1.0, 0.0], (16, 1)))
    W = MatrixWeight(g, np.array([random_psd(rng, 2, 1) for _ in range(16)]))
    f = rng.normal(size=(16, 2)) + 1j * rng.normal(size=(16, 2))
    once = normalize_equivalence(f, W)
    assert np.abs(normalize_equivalence(once, W) - once).max() < 1e-14
    m = SpectralMeasure(W)
    assert lalpha_power(once, m, 3.0) == pytest.approx(lalpha_power(f, m, 3.0), rel=1e-12)


def test_weight_validation():
    g = GroupSpec.integer(4)
    bad = np.zeros((4, 2, 2))
    bad[:, 0, 1] = 1.0
    with pytest.raises(InvalidInput):
        MatrixWeight(g, bad)
    with pytest.raises(InvalidInput):
        MatrixWeight(g, -np.ones((4, 1, 1)))
    with pytest.raises(InvalidInput):
        MatrixWeight(g, np.ones((5, 1, 1)))


def test_restrict_and_add():
    g = GroupSpec.integer(32)
    m = SpectralMeasure(constant_weight(g, 2.0), ((3, np.array([[0.7]])),))
    ac = restrict(m, "ac")
    sing = restrict(m, "singular")
    assert not ac.has_atoms and len(sing.atoms) == 1
    assert np.allclose(sing.ac.samples, 0)
    back = add_measures(ac, sing)
    assert np.allclose(back.ac.samples, m.ac.samples)
    assert len(back.atoms) == 1 and np.allclose(back.atoms[0][1], 0.7)
    plain = SpectralMeasure(constant_weight(g, 1.0))
    assert not restrict(plain, "singular").has_atoms
    f = np.exp(1j * g.angles) + 0.3
    for alpha in (1.5, 2.0, 3.0):
        whole = lalpha_power(f, m, alpha)
        assert whole == pytest.approx(lalpha_power(f, ac, alpha) + lalpha_power(f, sing, alpha), rel=1e-13)


def test_cyclic_atoms_fold_into_density():
    g = GroupSpec.cyclic(4)
    m = SpectralMeasure(constant_weight(g, 1.0), ((1, np.array([[0.5]])),))
    assert not m.has_atoms
    assert m.ac.scalar[1] == pytest.approx(1.0 + 0.5 * 4)


def test_families():
    g = GroupSpec.integer(64)
    w = polynomial_modulus_weight(g, [1.0, -0.5])
    assert np.allclose(w.scalar, np.abs(1 - 0.5 * np.exp(1j * g.angles)) ** 2)
    assert w.resample(g.refined()).samples.shape[0] == 128
    pc = piecewise_constant_weight(g, [0.0], [1.0, 3.0])
    assert set(np.round(pc.scalar, 12)) == {1.0, 3.0}
    with pytest.raises(InvalidInput):
        piecewise_constant_weight(g, [0.0, 1.0], [1.0])


def test_tables():
    g = GroupSpec.cyclic(3)
    W = parse_weight_table("# comment\n0 1\n1 2\n2 3\n", g, 1)
    assert np.allclose(W.scalar, [1, 2, 3])
    atoms = parse_atom_table("5 1 0 0 2\n", 2)
    assert atoms[0][0] == 5 and np.allclose(atoms[0][1], np.diag([1, 2]))
    with pytest.raises(InvalidInput):
        parse_weight_table("0 1\n1 2\n", g, 1)
