import numpy as np
import pytest

from trigapprox.groups import GroupSpec, InvalidInput, character_matrix, character_samples, quadrature


@pytest.mark.parametrize("g", [GroupSpec.integer(16), GroupSpec.cyclic(5), GroupSpec.lattice2(8)])
def test_trivial_character_is_one(g):
    x = (0, 0) if g.kind == "lattice2" else 0
    assert np.allclose(character_samples(x, g), 1.0)


def test_cyclic_fourth_roots():
    vals = character_samples(1, GroupSpec.cyclic(4))
    assert np.allclose(vals, [1, 1j, -1, -1j], atol=1e-15)


def test_circle_grid_values():
    g = GroupSpec.integer(8)
    vals = character_samples(2, g)
    assert np.allclose(vals, np.exp(2j * g.angles))
    assert np.all(g.angles > -np.pi) and np.all(g.angles <= np.pi)


def test_cyclic_frequencies_reduced():
    g = GroupSpec.cyclic(6)
    assert g.check_frequency(7) == 1
    assert g.check_frequency(-1) == 5
    assert np.allclose(character_samples(7, g), character_samples(1, g))


def test_character_multiplicative():
    g = GroupSpec.integer(32)
    assert np.allclose(character_samples(3, g) * character_samples(-5, g), character_samples(-2, g))


def test_bad_frequencies():
    with pytest.raises(InvalidInput):
        GroupSpec.integer(8).check_frequency((1, 2))
    with pytest.raises(InvalidInput):
        GroupSpec.lattice2(8).check_frequency(3)
    with pytest.raises(InvalidInput):
        GroupSpec("integer", 1)


def test_quadrature_examples():
    g = GroupSpec.integer(64)
    assert quadrature(np.ones(64), g) == pytest.approx(1.0, abs=1e-15)
    assert abs(quadrature(character_samples(3, g), g)) < 1e-14
    assert quadrature(np.cos(g.angles) ** 2, g) == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(InvalidInput):
        quadrature(np.ones(63), g)


def test_orthogonality_cyclic_exact():
    g = GroupSpec.cyclic(7)
    C = character_matrix(list(range(7)), g)
    G = C.conj().T @ C / 7
    assert np.allclose(G, np.eye(7), atol=1e-14)


def test_orthogonality_circle_in_band():
    g = GroupSpec.integer(32)
    freqs = list(range(-15, 16))
    C = character_matrix(freqs, g)
    G = C.conj().T @ C / g.npoints
    assert np.abs(G - np.eye(len(freqs))).max() < 1e-12


def test_lattice_quadrature():
    g = GroupSpec.lattice2(8)
    assert abs(quadrature(character_samples((1, -2), g), g)) < 1e-14
    assert quadrature(np.ones(g.npoints), g) == pytest.approx(1.0)
