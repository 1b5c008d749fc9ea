import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccmimo.errors import ChannelMismatch, DegenerateZfSet, InputError, NotStrictMode
from ccmimo.miso import decouple
from ccmimo.model import NetworkConfig
from ccmimo.phy import (
    RECOVERY_TOL,
    ZF_TOL,
    _ReceiverCache,
    channel_from_matrices,
    design_beamformers,
    pick_combiners,
    sample_channels,
    simulate,
    zf_beamformer,
    zf_residual,
)


def _cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.data())
def test_zf_beamformer_properties(L, data):
    n = data.draw(st.integers(0, L - 1))
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
    zf = list(_cn(rng, n, L))
    target = _cn(rng, L)
    w = zf_beamformer(zf, target)
    assert np.isclose(np.linalg.norm(w), 1.0)
    for h in zf:
        assert abs(h.conj() @ w) <= ZF_TOL * np.linalg.norm(h)
    g = target.conj() @ w
    assert g.real > 0 and abs(g.imag) <= 1e-12


def test_zf_beamformer_degenerate():
    rng = np.random.default_rng(0)
    h = _cn(rng, 3)
    with pytest.raises(DegenerateZfSet):
        zf_beamformer([h, 2 * h], _cn(rng, 3))
    with pytest.raises(DegenerateZfSet):
        zf_beamformer([h], 1j * h)


def test_combiners():
    rng = np.random.default_rng(1)
    Hk = _cn(rng, 2, 4)
    assert np.allclose(pick_combiners(Hk), np.eye(2))
    U = pick_combiners(Hk, "svd")
    assert np.allclose(U.conj().T @ U, np.eye(2))
    with pytest.raises(InputError):
        pick_combiners(Hk, "mmse")
    ch = channel_from_matrices(rng.standard_normal((3, 2, 4)), "svd")
    assert ch.h.shape == (3, 2, 4)


@pytest.mark.parametrize("policy", ["identity", "svd"])
def test_noiseless_recovery(six_user, policy):
    ch = sample_channels(six_user.config, 11, policy)
    rep = simulate(six_user, ch)
    assert rep.max_error <= RECOVERY_TOL
    assert rep.zf_residual_max <= ZF_TOL
    assert rep.cancellation_residual_max <= 1e-10
    assert rep.per_transmission_streams == [6] * 30


def test_residual_covers_every_zf_stream(six_user):
    ch = sample_channels(six_user.config, 3)
    W = design_beamformers(six_user, ch)
    tx = six_user.transmissions[0]
    assert zf_residual(tx, W[0], ch) <= ZF_TOL
    assert zf_residual(tx, W[0][:, ::-1], ch) > 1e-3


def test_ablation_leaves_interference(six_user):
    ch = sample_channels(six_user.config, 5)
    assert simulate(six_user, ch, cache_cancellation=False).max_error >= 0.1


def test_reproducible(six_user):
    ch = sample_channels(six_user.config, 9)
    a = simulate(six_user, ch, 1e-2, seed=4)
    b = simulate(six_user, sample_channels(six_user.config, 9), 1e-2, seed=4)
    assert a.mse == b.mse


def test_common_random_numbers_give_exact_scaling(six_user):
    ch = sample_channels(six_user.config, 2)
    lo = simulate(six_user, ch, 1e-4, seed=2).mse
    hi = simulate(six_user, ch, 1e-2, seed=2).mse
    assert hi / lo == pytest.approx(100, rel=1e-6)


def test_mse_tracks_prediction(six_user):
    ratios = []
    for seed in range(20):
        r = simulate(six_user, sample_channels(six_user.config, seed), 1e-2, seed)
        ratios.append(r.mse / r.expected_mse)
    assert 0.8 < np.mean(ratios) < 1.2


def test_rejects_unsimulable(three_user_bit):
    ch = sample_channels(three_user_bit.config, 0)
    with pytest.raises(NotStrictMode):
        simulate(three_user_bit, ch)
    with pytest.raises(NotStrictMode):
        simulate(decouple(three_user_bit), ch)


def test_channel_shape_checked(six_user):
    ch = sample_channels(NetworkConfig(6, 2, 1, 6, 1), 0)
    with pytest.raises(ChannelMismatch):
        simulate(six_user, ch)


def test_receiver_cache_is_restricted(six_user):
    tx = six_user.transmissions[0]
    symbols = {t.subpacket: 1.0 for t in tx.terms}
    user = tx.terms[0].recipient.user
    cache = _ReceiverCache(six_user, user, symbols)
    with pytest.raises(KeyError):
        cache.symbol(tx.terms[0].subpacket)
