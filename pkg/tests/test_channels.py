import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphabit import qcore
from alphabit.channels import (
    ChannelError,
    amplitude_damping,
    apply,
    channel_from_json,
    channel_from_kraus,
    channel_to_json,
    choi,
    choi_distance,
    choi_spectrum,
    complementary,
    compose_channels,
    constant_channel,
    equivalent_up_to_isometry,
    erasure_channel,
    erasure_degrading_map,
    identity_channel,
    random_channel,
    stinespring,
    tensor_channels,
)
from alphabit.qcore import DensityOp, DimensionError, DimsProfile, maximally_mixed


def test_kraus_validation():
    ident = channel_from_kraus([np.eye(2)])
    rho = qcore.random_density(2, 0)
    np.testing.assert_allclose(ident(rho), rho)
    const = channel_from_kraus([[[1, 0], [0, 0]], [[0, 1], [0, 0]]])
    np.testing.assert_allclose(const(rho), np.diag([1, 0]), atol=1e-12)
    with pytest.raises(ChannelError, match="residual"):
        channel_from_kraus([np.eye(2) * 0.9])
    with pytest.raises(ChannelError):
        channel_from_kraus([np.eye(2), np.eye(3)])


def test_damping_kraus_from_closed_form():
    eta = 0.7
    a0 = np.array([[1, 0], [0, np.sqrt(eta)]])
    a1 = np.array([[0, np.sqrt(1 - eta)], [0, 0]])
    ch = channel_from_kraus([a0, a1])
    np.testing.assert_allclose(ch.kraus, amplitude_damping(eta).kraus)


def test_stinespring_identity():
    v = stinespring(identity_channel(2))
    assert v.dims.sizes == (2, 1)
    np.testing.assert_allclose(v.matrix, np.eye(2))


def test_erasure_dilation_two_branch_form():
    # V(a|0> + b|1>) = sqrt(eta)(a|0> + b|1>)_B |E>_E + sqrt(1-eta) |E>_B (a|0> + b|1>)_E
    eta = 0.6
    v = stinespring(erasure_channel(eta)).matrix
    a, b = 0.6, 0.8j
    out = v @ np.array([a, b]).reshape(2).astype(complex)
    ex = np.zeros((3, 3), dtype=complex)
    ex[0, 2], ex[1, 2] = np.sqrt(eta) * a, np.sqrt(eta) * b
    ex[2, 0], ex[2, 1] = np.sqrt(1 - eta) * a, np.sqrt(1 - eta) * b
    np.testing.assert_allclose(out, ex.reshape(-1), atol=1e-12)


def test_damping_dilation():
    # U(a|0> + b|1>) = a|00> + b(sqrt(eta)|10> + sqrt(1-eta)|01>)
    eta = 0.3
    v = stinespring(amplitude_damping(eta)).matrix
    a, b = 0.8, 0.6
    out = v @ np.array([a, b], dtype=complex)
    ex = np.zeros((2, 2), dtype=complex)
    ex[0, 0] = a
    ex[1, 0] = b * np.sqrt(eta)
    ex[0, 1] = b * np.sqrt(1 - eta)
    np.testing.assert_allclose(out, ex.reshape(-1), atol=1e-12)


@pytest.mark.parametrize("eta", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_complements_of_named_channels(eta):
    assert equivalent_up_to_isometry(complementary(erasure_channel(eta)), erasure_channel(1 - eta))
    assert equivalent_up_to_isometry(complementary(amplitude_damping(eta)), amplitude_damping(1 - eta))


def test_complement_of_identity_is_constant():
    comp = complementary(identity_channel(3))
    assert comp.d_out == 1
    np.testing.assert_allclose(comp(qcore.random_density(3, 1)), [[1.0]])


def test_apply_examples():
    rho = DensityOp.from_matrix(qcore.random_density(2, 3))
    np.testing.assert_allclose(apply(identity_channel(2), rho).matrix, rho.matrix)
    out = apply(erasure_channel(0.0), rho)
    np.testing.assert_allclose(out.matrix, np.diag([0, 0, 1]), atol=1e-12)
    out = apply(erasure_channel(1.0), rho)
    np.testing.assert_allclose(out.matrix[:2, :2], rho.matrix, atol=1e-12)
    assert abs(out.matrix[2, 2]) < 1e-12


def test_apply_on_labelled_factor():
    rng = np.random.default_rng(4)
    m = qcore.random_density(6, rng)
    rho = DensityOp(m, DimsProfile.of(("R", 3), ("A", 2)))
    out = apply(erasure_channel(0.4), rho, on="A")
    assert out.dims.sizes == (3, 3)
    np.testing.assert_allclose(qcore.ptrace(out.matrix, [3, 3], [0]), qcore.ptrace(m, [3, 2], [0]), atol=1e-12)
    with pytest.raises(DimensionError):
        apply(erasure_channel(0.4), rho, on="R")
    with pytest.raises(DimensionError):
        apply(erasure_channel(0.4), rho, on="Q")


def test_choi_examples():
    np.testing.assert_allclose(choi(identity_channel(2)).matrix, qcore.maximally_entangled(2).density().matrix, atol=1e-12)
    sigma = qcore.random_density(3, 5)
    c = choi(constant_channel(sigma, 2)).matrix
    np.testing.assert_allclose(c, np.kron(np.eye(2) / 2, sigma), atol=1e-12)


def test_choi_spectrum_of_erasure():
    # independent oracle: assemble eta * phi+ (+) (1 - eta) omega_R (x) |E><E| by hand
    eta = 0.75
    phi = np.zeros((2, 3))
    phi[0, 0] = phi[1, 1] = 1 / np.sqrt(2)
    flag = np.zeros(3)
    flag[2] = 1
    oracle = eta * np.outer(phi.reshape(-1), phi.reshape(-1)) + (1 - eta) * np.kron(np.eye(2) / 2, np.outer(flag, flag))
    np.testing.assert_allclose(choi(erasure_channel(eta)).matrix, oracle, atol=1e-12)
    spec = choi_spectrum(erasure_channel(eta))
    np.testing.assert_allclose(spec[-3:], [0.125, 0.125, 0.75], atol=1e-12)
    np.testing.assert_allclose(spec[:-3], 0, atol=1e-12)


def test_named_constructors():
    np.testing.assert_allclose(stinespring(erasure_channel(1.0)).matrix.reshape(3, 3, 2)[:, 2, :], np.eye(3, 2))
    out = erasure_channel(0.75)(np.eye(2) / 2)
    np.testing.assert_allclose(out, np.diag([0.375, 0.375, 0.25]), atol=1e-12)
    np.testing.assert_allclose(amplitude_damping(0.7)(np.diag([0, 1])), np.diag([0.3, 0.7]), atol=1e-12)
    np.testing.assert_allclose(amplitude_damping(0.0)(qcore.random_density(2, 1)), np.diag([1, 0]), atol=1e-12)
    assert equivalent_up_to_isometry(amplitude_damping(1.0), identity_channel(2))
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            erasure_channel(bad)
        with pytest.raises(ValueError):
            amplitude_damping(bad)


def test_channel_algebra():
    d = compose_channels(amplitude_damping(0.8), amplitude_damping(0.6))
    assert d.env_dim == 4
    assert choi_distance(d, amplitude_damping(0.48)) < 1e-12
    t = tensor_channels(identity_channel(2), identity_channel(2))
    np.testing.assert_allclose(t.kraus[0], np.eye(4))
    c = constant_channel(maximally_mixed(3), 2)
    np.testing.assert_allclose(c(qcore.random_density(2, 0)), np.eye(3) / 3, atol=1e-12)
    with pytest.raises(DimensionError):
        compose_channels(amplitude_damping(0.5), erasure_channel(0.5))


def test_tensor_channels_act_factorwise():
    rng = np.random.default_rng(12)
    a, b = random_channel(2, 3, 2, rng), random_channel(3, 2, 3, rng)
    ra, rb = qcore.random_density(2, rng), qcore.random_density(3, rng)
    np.testing.assert_allclose(tensor_channels(a, b)(np.kron(ra, rb)), np.kron(a(ra), b(rb)), atol=1e-12)


def test_random_channels_match_dilation():
    rng = np.random.default_rng(500)
    for i in range(500):
        d_in, d_out = rng.integers(1, 5, size=2)
        r = max(int(rng.integers(1, 5)), -(-d_in // d_out))
        ch = random_channel(int(d_in), int(d_out), int(r), rng)
        v = stinespring(ch)
        rho = qcore.random_density(int(d_in), rng)
        full = v.matrix @ rho @ v.matrix.conj().T
        np.testing.assert_allclose(ch(rho), qcore.ptrace(full, v.dims.sizes, [0]), atol=1e-9)
        np.testing.assert_allclose(complementary(ch)(rho), qcore.ptrace(full, v.dims.sizes, [1]), atol=1e-9)
        np.testing.assert_allclose(v.matrix.conj().T @ v.matrix, np.eye(int(d_in)), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d_in=st.integers(1, 4), d_out=st.integers(1, 4), r=st.integers(1, 4))
def test_choi_properties(seed, d_in, d_out, r):
    r = max(r, -(-d_in // d_out))
    ch = random_channel(d_in, d_out, r, np.random.default_rng(seed))
    c = choi(ch)
    assert np.linalg.eigvalsh(c.matrix)[0] >= -1e-9
    np.testing.assert_allclose(qcore.ptrace(c.matrix, c.dims.sizes, [0]), np.eye(d_in) / d_in, atol=1e-9)
    cc = complementary(complementary(ch))
    assert equivalent_up_to_isometry(cc, ch, tol=1e-8)


@pytest.mark.parametrize("eta", [0.5, 0.6, 0.75, 0.9, 1.0])
def test_degrading_maps(eta):
    er = erasure_channel(eta)
    assert choi_distance(compose_channels(erasure_degrading_map(eta), er), complementary(er)) <= 1e-7
    ad = amplitude_damping(eta)
    deg = amplitude_damping((1 - eta) / eta)
    assert choi_distance(compose_channels(deg, ad), amplitude_damping(1 - eta)) <= 1e-7
    assert equivalent_up_to_isometry(compose_channels(deg, ad), complementary(ad))


def test_json_round_trip_exact():
    rng = np.random.default_rng(3)
    ch = random_channel(3, 2, 2, rng)
    back = channel_from_json(channel_to_json(ch))
    np.testing.assert_array_equal(back.kraus, ch.kraus)
    data = json.loads(channel_to_json(amplitude_damping(0.3)))
    assert set(data) == {"d_in", "d_out", "kraus"}
    assert len(data["kraus"][0]) == 4 and len(data["kraus"][0][0]) == 2
    data["kraus"][0] = data["kraus"][0][:3]
    with pytest.raises(ChannelError):
        channel_from_json(json.dumps(data))
