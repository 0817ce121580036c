import numpy as np
import pytest

from bmcontact.profiles import KINDS, ProfileError, build_profile, hermite_piece, verify_profile


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("k", [0, 1, 2])
def test_every_profile_verifies(kind, k):
    if kind in ("desing-even", "sing-even") and k == 0:
        pytest.skip("order 0 has no even profile")
    prof = build_profile(kind, k, 0.1)
    assert all(verify_profile(prof).values())


@pytest.mark.parametrize("k", [1, 2])
def test_desing_even_outer_derivative(k):
    eps = 0.1
    prof = build_profile("desing-even", k, eps)
    z = np.array([-0.9, -0.4, -0.25, 0.21, 0.5, 1.0])
    assert np.allclose(prof(z, 1), z ** (-2.0 * k), rtol=1e-12)
    # f is odd and f' > 0 everywhere
    zz = np.linspace(-1, 1, 2001)
    assert np.allclose(prof(zz), -prof(-zz), atol=1e-9)
    assert np.all(prof(zz, 1) > 0)


def test_desing_odd_fold():
    eps = 0.1
    prof = build_profile("desing-odd", 0, eps)
    z = np.array([-0.7, -0.3, 0.3, 0.7])
    assert np.allclose(prof(z, 1), 1 / z, rtol=1e-12)
    zz = np.linspace(-0.5, 0.5, 1001)
    d = prof(zz, 1)
    # f' changes sign exactly at 0 and f is even
    assert np.all(d[zz < -1e-12] < 0) and np.all(d[zz > 1e-12] > 0)
    assert np.allclose(prof(zz), prof(-zz), atol=1e-9)


def test_sing_even_values():
    prof = build_profile("sing-even", 1, 0.1)
    t = np.array([0.2, 0.3, -0.5])
    assert np.allclose(prof(t), t)
    t = np.array([0.01, 0.05, 0.1])
    assert np.allclose(prof(t), -1 / t)


def test_sing_odd_singular_points():
    eps = 0.1
    prof = build_profile("sing-odd", 0, eps)
    assert prof.singular_points == pytest.approx((-3 * eps / 8, 3 * eps / 8))


def test_profile_errors():
    with pytest.raises(ProfileError):
        build_profile("nope", 1, 0.1)
    with pytest.raises(ProfileError):
        build_profile("desing-even", 1, 0.0)


def test_hermite_piece_interpolates():
    p = hermite_piece(0.0, 1.0, [1.0, 2.0, 0.0], [3.0, -1.0, 4.0])
    x = np.array([0.0, 1.0])
    assert np.allclose(p.evaluate(x), [1.0, 3.0])
    assert np.allclose(p.evaluate(x, 1), [2.0, -1.0])
    assert np.allclose(p.evaluate(x, 2), [0.0, 4.0])


def test_profile_serializes():
    d = build_profile("desing-even", 1, 0.1).to_dict()
    assert d["kind"] == "desing-even" and d["m"] == 2 and d["eps"] == 0.1
    assert d["pieces"]
