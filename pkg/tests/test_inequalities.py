import math

import numpy as np
import pytest

from bellvol.inequalities import (
    BELL1964,
    CHSH,
    CHSH_MAX,
    bell1_margin,
    bell1_margin_angles,
    bell1_margins,
    chsh_margin,
    chsh_margins,
    chsh_value,
    get_functional,
)
from bellvol.quantum import Direction, direction_from_spherical, product_state, singlet, werner

from conftest import random_rotation, random_unit

SQ2 = math.sqrt(2)


def coplanar(deg):
    return direction_from_spherical(math.pi / 2, math.radians(deg))


def test_bell1_coplanar_example():
    # E(a,b) = -1/2, E(a,c) = +1/2, E(b,c) = -1/2
    m = bell1_margin(singlet(), coplanar(0), coplanar(60), coplanar(120))
    assert m.value == pytest.approx(0.5, abs=1e-15)
    assert m.violated


def test_bell1_degenerate_and_orthogonal():
    a, b = coplanar(10), coplanar(75)
    m = bell1_margin(singlet(), a, b, b)
    assert m.value == pytest.approx(0.0, abs=1e-15)
    assert not m.violated
    x, y, z = Direction(1.0, 0.0, 0.0), Direction(0.0, 1.0, 0.0), Direction(0.0, 0.0, 1.0)
    m = bell1_margin(singlet(), x, y, z)
    assert m.value == -1.0 and not m.violated


def test_bell1_tolerance():
    m = bell1_margin(singlet(), coplanar(0), coplanar(60), coplanar(120), tolerance=0.6)
    assert not m.violated


def test_bell1_angles_examples():
    m = bell1_margin_angles(math.pi / 3, 2 * math.pi / 3, 0.0)
    assert m.value == pytest.approx(0.5, abs=1e-15) and m.violated
    for th in np.linspace(0, math.pi, 7):
        assert bell1_margin_angles(th, th, 0.0).value == pytest.approx(0.0, abs=1e-15)


def test_bell1_angles_trivial_when_cos_phi_nonpositive(rng):
    tb, tc = rng.uniform(0, math.pi, (2, 5000))
    phi = rng.uniform(math.pi / 2, 3 * math.pi / 2, 5000)
    assert not any(bell1_margin_angles(b, c, p).violated for b, c, p in zip(tb, tc, phi))


def test_bell1_angles_match_vector_form(rng):
    z = Direction(0.0, 0.0, 1.0)
    s = singlet()
    for tb, tc, pb, pc in rng.uniform(0, 1, (2000, 4)) * [math.pi, math.pi, 2 * math.pi, 2 * math.pi]:
        b = direction_from_spherical(tb, pb)
        c = direction_from_spherical(tc, pc)
        assert bell1_margin_angles(tb, tc, pc - pb).value == pytest.approx(
            bell1_margin(s, z, b, c).value, abs=1e-12
        )


def test_bell1_rotation_invariance(rng):
    s = singlet()
    for _ in range(200):
        R = random_rotation(rng)
        a, b, c = (Direction.from_components(*v) for v in random_unit(rng, 3))
        m0 = bell1_margin(s, a, b, c).value
        m1 = bell1_margin(s, a.rotated(R), b.rotated(R), c.rotated(R)).value
        assert m1 == pytest.approx(m0, abs=1e-12)


def test_bell1_swap_b_c_exact(rng):
    T = singlet().T
    a, b, c = (random_unit(rng, 1000) for _ in range(3))
    assert np.array_equal(bell1_margins(T, a, b, c), bell1_margins(T, a, c, b))


def test_bell1_product_state_can_violate():
    # the Bell-1964 bound assumes perfect anticorrelation; product states break it
    s = product_state([0, 0, 1], [0, 0, 1])
    z, mz = Direction(0.0, 0.0, 1.0), Direction(0.0, 0.0, -1.0)
    x = Direction(1.0, 0.0, 0.0)
    assert bell1_margin(s, x, z, mz).value == pytest.approx(0.0)
    assert bell1_margin(s, z, z, mz).violated


def optimal_chsh():
    # optimal for the minus sign on E(a', b')
    return coplanar(0), coplanar(90), coplanar(45), coplanar(-45)


def test_chsh_optimal_angles():
    a, a2, b, b2 = optimal_chsh()
    assert abs(chsh_value(singlet(), a, a2, b, b2)) == pytest.approx(2 * SQ2, abs=1e-12)
    for mode in ("fixed", "max"):
        m = chsh_margin(singlet(), a, a2, b, b2, mode)
        assert m.value == pytest.approx(2 * SQ2 - 2, abs=1e-12) and m.violated


def test_chsh_textbook_angles_need_other_sign_placement():
    # B at 45 and 135 degrees is optimal only with the minus sign moved to E(a, b')
    a, a2, b, b2 = coplanar(0), coplanar(90), coplanar(45), coplanar(135)
    assert chsh_value(singlet(), a, a2, b, b2) == pytest.approx(0.0, abs=1e-12)
    assert chsh_margin(singlet(), a, a2, b, b2, "max").value == pytest.approx(2 * SQ2 - 2, abs=1e-12)


def test_chsh_all_equal_and_noise(rng):
    n = Direction.from_components(*random_unit(rng, 1)[0])
    assert chsh_value(singlet(), n, n, n, n) == pytest.approx(-2.0, abs=1e-12)
    assert not chsh_margin(singlet(), n, n, n, n).violated
    dirs = [Direction.from_components(*v) for v in random_unit(rng, 4)]
    assert chsh_value(werner(0.0), *dirs) == 0.0


def test_chsh_repeated_settings(rng):
    a, b = (Direction.from_components(*v) for v in random_unit(rng, 2))
    s = singlet()
    from bellvol.quantum import correlation

    e = correlation(s, a, b)
    for mode in ("fixed", "max"):
        v = chsh_margin(s, a, a, b, b, mode).value
        assert v == pytest.approx(2 * abs(e) - 2, abs=1e-12)
        assert v <= 0


def test_chsh_fixed_below_max(rng):
    T = singlet().T
    dirs = [random_unit(rng, 20_000) for _ in range(4)]
    assert np.all(chsh_margins(T, *dirs, mode="fixed") <= chsh_margins(T, *dirs, mode="max"))


def test_chsh_max_mode_brute_force(rng):
    # oracle: evaluate the four sign placements explicitly
    T = singlet().T
    a, a2, b, b2 = (random_unit(rng, 500) for _ in range(4))
    E = lambda x, y: np.einsum("ni,ij,nj->n", x, T, y)
    e = np.array([E(a, b), E(a, b2), E(a2, b), E(a2, b2)])
    signs = 1 - 2 * np.eye(4)
    expected = np.abs(signs @ e).max(axis=0) - 2
    assert np.allclose(chsh_margins(T, a, a2, b, b2, "max"), expected, atol=1e-14)


def test_chsh_product_states_never_violate(rng):
    dirs = [random_unit(rng, 100_000) for _ in range(4)]
    for r, s in [([0, 0, 1], [1, 0, 0]), ([0.6, 0, 0.8], [0, 0.6, -0.8]), ([0.3, 0.1, 0.2], [0, 0, 0.5])]:
        T = product_state(r, s).T
        assert chsh_margins(T, *dirs, mode="fixed").max() <= 0
        assert chsh_margins(T, *dirs, mode="max").max() <= 0


def test_functional_descriptors():
    assert BELL1964.n_directions == 3 and BELL1964.classical_bound == 1.0
    assert CHSH.classical_bound == 2 and CHSH.quantum_bound == pytest.approx(2 * SQ2)
    assert get_functional("chsh", "max") is CHSH_MAX
    assert get_functional("bell1", "max") is BELL1964
    with pytest.raises(ValueError):
        get_functional("cglmp")
