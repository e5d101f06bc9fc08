"""Positive-temperature layer: transfer operator, spectral data, moments."""

import math
import random

import numpy as np
import pytest

from troptherm.cli import _gen_system
from troptherm.dynamics import TransitionSystem, from_sft
from troptherm.thermo import (
    BETA_MAX_DEFAULT,
    BetaRangeError,
    ReducibleSystemError,
    log_moment,
    log_ruelle_apply,
    normalized_potential,
    ruelle_apply,
    spectral_data,
    strongly_connected_components,
)


def full_shift():
    return from_sft([[1, 1], [1, 1]], [[0.0, 0.0], [0.0, 0.0]])


def _dense_pressure(sys, beta):
    r = np.zeros((sys.n, sys.n))
    for s, t, w in sys.arcs:
        r[t, s] = math.exp(beta * w)
    eig = np.linalg.eigvals(r)
    rho = max(eig, key=lambda z: z.real)
    assert abs(rho.imag) <= 1e-9 * max(1.0, abs(rho.real))
    return math.log(rho.real)


def test_ruelle_apply_examples(fixa, one_state):
    out = ruelle_apply(full_shift(), np.ones(2), 1.0)
    assert np.allclose(out, [2.0, 2.0], rtol=0, atol=1e-15)
    out = ruelle_apply(fixa, np.ones(2), 1.0)
    expect = [1.0 + math.e**-1, math.e**-1 + math.e**-3]
    assert np.allclose(out, expect, rtol=1e-15, atol=0)
    out = ruelle_apply(one_state, np.array([2.0]), 2.0)
    assert np.allclose(out, [2.0 * math.exp(3.0)], rtol=1e-15, atol=0)
    with pytest.raises(ValueError):
        ruelle_apply(fixa, np.array([1.0, 0.0]), 1.0)
    with pytest.raises(ValueError):
        ruelle_apply(fixa, np.array([1.0, -1.0]), 1.0)


def test_log_ruelle_matches_linear(fixa):
    rng = np.random.default_rng(7)
    for beta in (0.5, 1.0, 3.0):
        log_u = rng.uniform(-2, 2, 2)
        lin = ruelle_apply(fixa, np.exp(log_u), beta)
        assert np.allclose(log_ruelle_apply(fixa, log_u, beta), np.log(lin), atol=1e-12)


def test_spectral_full_shift():
    data = spectral_data(full_shift(), 1.0)
    assert abs(data.pressure - math.log(2.0)) <= 1e-12
    assert np.allclose(data.u_beta, [1.0, 1.0], atol=1e-12)
    assert np.allclose(data.m_beta, [0.5, 0.5], atol=1e-12)
    assert np.allclose(data.mu_beta, [0.5, 0.5], atol=1e-12)


def test_spectral_one_state(one_state):
    for beta in (0.5, 2.0, 100.0):
        data = spectral_data(one_state, beta)
        assert abs(data.pressure - 1.5 * beta) <= 1e-12 * max(1.0, 1.5 * beta)
        assert np.allclose(data.u_beta, [1.0])
        assert np.allclose(data.m_beta, [1.0])
        assert np.allclose(data.mu_beta, [1.0])


def test_spectral_fixa_pressure_window(fixa):
    # Q = 0, N = 2: pressure/beta must sit in (0, log 2 / beta]
    data = spectral_data(fixa, 2.0)
    pob = data.pressure / 2.0
    assert 0.0 < pob <= math.log(2.0) / 2.0 + 1e-12


def test_spectral_matches_dense_oracle():
    rng = random.Random(11)
    for _ in range(25):
        sys = _gen_system(rng.randrange(10**6), 8, False)
        beta = rng.choice((0.5, 1.0, 2.0, 5.0))
        data = spectral_data(sys, beta)
        assert abs(data.pressure - _dense_pressure(sys, beta)) <= 1e-10 * max(
            1.0, abs(data.pressure)
        )


def test_spectral_eigen_identities():
    rng = random.Random(23)
    for _ in range(20):
        sys = _gen_system(rng.randrange(10**6), 8, False)
        beta = rng.choice((0.5, 1.0, 2.0))
        data = spectral_data(sys, beta)
        scale = math.exp(data.pressure)
        ru = ruelle_apply(sys, data.u_beta, beta)
        assert np.allclose(ru, scale * data.u_beta, rtol=1e-9, atol=1e-12)
        # adjoint identity through the dense matrix
        r = np.zeros((sys.n, sys.n))
        for s, t, w in sys.arcs:
            r[t, s] = math.exp(beta * w)
        assert np.allclose(data.m_beta @ r, scale * data.m_beta, rtol=1e-9, atol=1e-12)
        assert abs(data.m_beta.sum() - 1.0) <= 1e-10
        assert abs((data.u_beta * data.m_beta).sum() - 1.0) <= 1e-10
        assert np.allclose(data.mu_beta, data.u_beta * data.m_beta, atol=1e-12)


def test_normalized_potential_stochastic():
    # multi-class systems stall the power iteration at moderate beta, so
    # keep to uniquely calibrated draws
    from troptherm.ergodic_opt import ergodic_report

    rng = random.Random(37)
    checked = 0
    while checked < 12:
        sys = _gen_system(rng.randrange(10**6), 8, False)
        if not ergodic_report(sys).uniquely_calibrated:
            continue
        beta = rng.choice((1.0, 2.0, 10.0))
        data = spectral_data(sys, beta)
        g = normalized_potential(sys, data)
        mass = np.zeros(sys.n)
        np.add.at(mass, [t for _, t, _ in sys.arcs], np.exp(g))
        assert np.allclose(mass, 1.0, atol=1e-10)
        checked += 1


def test_restart_agreement():
    rng = np.random.default_rng(41)
    sys = _gen_system(4, 6, False)
    base = spectral_data(sys, 5.0)
    for _ in range(5):
        data = spectral_data(
            sys,
            5.0,
            start_log_u=rng.uniform(-3, 3, sys.n),
            start_log_m=rng.uniform(-3, 3, sys.n),
        )
        assert np.max(np.abs(data.log_u - base.log_u)) <= 1e-9
        assert np.max(np.abs(data.log_m - base.log_m)) <= 1e-9
        assert abs(data.pressure - base.pressure) <= 1e-9


def test_reducible_and_beta_guards(one_state):
    chain = TransitionSystem(2, [(0, 0, 0.0), (0, 1, 0.0), (1, 1, 0.0)])
    assert strongly_connected_components(chain) == [(0,), (1,)]
    with pytest.raises(ReducibleSystemError) as err:
        spectral_data(chain, 1.0)
    assert err.value.components == [(0,), (1,)]
    with pytest.raises(BetaRangeError):
        spectral_data(one_state, 0.0)
    with pytest.raises(BetaRangeError):
        spectral_data(one_state, -1.0)
    with pytest.raises(BetaRangeError):
        spectral_data(one_state, BETA_MAX_DEFAULT * 2)
    # explicit opt-in raises the ceiling
    data = spectral_data(one_state, BETA_MAX_DEFAULT * 2, beta_max=BETA_MAX_DEFAULT * 4)
    assert abs(data.pressure - 1.5 * BETA_MAX_DEFAULT * 2) <= 1e-9


def test_log_moment():
    measure = np.array([0.5, 0.5])
    assert abs(log_moment(measure, np.array([3.0, 3.0]), 7.0) - 3.0) <= 1e-12
    got = log_moment(measure, np.array([0.0, 1.0]), 1.0)
    assert abs(got - math.log((1.0 + math.e) / 2.0)) <= 1e-12
    logs = [log_moment(measure, np.array([0.0, 1.0]), b) for b in (1.0, 2.0, 4.0, 8.0)]
    assert all(a < b for a, b in zip(logs, logs[1:]))  # Jensen, non-constant f
    viaLog = log_moment(np.log(measure), np.array([0.0, 1.0]), 1.0, measure_is_log=True)
    assert abs(viaLog - got) <= 1e-12


def test_bracketing_log_vs_tropical():
    # L(f) <= (1/beta) log R(e^{beta f}) <= L(f) + log(N)/beta, elementwise
    from troptherm.dynamics import bousch_apply
    from troptherm.tropical_core import TropVector, as_trop

    rng = np.random.default_rng(53)
    for _ in range(10):
        sys = _gen_system(int(rng.integers(10**6)), 8, False)
        slack = math.log(sys.max_in_degree())
        for beta in (10.0, 100.0, 1000.0):
            f = rng.uniform(-5, 5, sys.n)
            soft = log_ruelle_apply(sys, beta * f, beta) / beta
            hard = np.array(
                [
                    x.finite
                    for x in bousch_apply(sys, TropVector([as_trop(v) for v in f]))
                ]
            )
            assert np.all(soft >= hard - 1e-9)
            assert np.all(soft <= hard + slack / beta + 1e-9)
