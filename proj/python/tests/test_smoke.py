import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import periodic_euler as pe

T = 4.0
L = 1.0
CONFIGS = Path(os.environ.get("PE_SOURCE_DIR", Path(__file__).resolve().parents[2])) / "configs"


@pytest.fixture
def eq():
    return pe.make_equilibrium(1.0, 1.4)


def forcing(eps, k1, k2):
    return pe.make_forcing(
        pe.PeriodicSignal.fourier(T, 0.0, [], [eps]),
        pe.PeriodicSignal.fourier(T, 0.0, [eps], []),
        k1,
        k2,
    )


def test_gas_relations(eq):
    assert pe.sound_speed(1.0, 1.4) == pytest.approx(1.1832160, rel=1e-7)
    m, n = pe.riemann_from_state(1.0, 0.0, 3.0)
    assert n == pytest.approx(math.sqrt(3.0) / 2.0)
    rho, u = pe.state_from_riemann(m, n, 3.0)
    assert rho == pytest.approx(1.0)
    assert abs(u) < 1e-15
    assert eq.neighborhood_radius == pytest.approx(0.1 * eq.c_bar)
    with pytest.raises(ValueError):
        pe.sound_speed(-1.0, 1.4)


def test_zero_forcing(eq):
    zero = pe.make_forcing(pe.PeriodicSignal.zero(T), pe.PeriodicSignal.zero(T), 0.3, 0.3)
    phi1, phi2, report = pe.solve_periodic(
        zero, pe.DampingField.constant(-0.5, T, L), eq, nt=16, nx=16
    )
    assert phi1.shape == (16, 16)
    assert np.abs(phi1).max() == 0.0
    assert np.abs(phi2).max() == 0.0
    assert report["converged"]


def test_contraction_and_residual(eq):
    f = forcing(0.01, 0.3, 0.3)
    b = pe.DampingField.constant(-0.5, T, L)
    phi1, phi2, report = pe.solve_periodic(f, b, eq, nt=32, nx=32, tol=1e-10)
    assert report["converged"]
    assert 0.0 < report["theta"] < 0.9
    assert report["final_c0_norm"] == pytest.approx(max(np.abs(phi1).max(), np.abs(phi2).max()))
    r = pe.pde_residual(phi1, phi2, f, b, eq, L)
    assert r["boundary_mismatch"] < 1e-9
    assert pe.euler_residual(phi1, phi2, eq, b, T, L) < 1e-3


def test_frozen_oracle(eq):
    f = pe.make_forcing(pe.PeriodicSignal.sine(T, 0.01), pe.PeriodicSignal.zero(T), 0.0, 0.0)
    b = pe.DampingField.constant(0.0, T, L)
    phi1, phi2, _ = pe.solve_periodic(f, b, eq, nt=64, nx=64, tol=1e-12, frozen=True)
    o1, o2 = pe.frozen_oracle(f, b, eq, L, 64, 64)
    assert np.abs(phi1 - o1).max() < 1e-5
    assert np.abs(phi2 - o2).max() < 1e-5


def test_invalid_kappa():
    with pytest.raises(ValueError):
        pe.make_forcing(pe.PeriodicSignal.zero(T), pe.PeriodicSignal.zero(T), 1.5, 0.0)


def test_config_and_run(tmp_path):
    cfg = pe.validate_config(str(CONFIGS / "default.json"))
    assert cfg["grid"]["nt"] == 128
    with pytest.raises(pe.ConfigError, match="kappa1"):
        pe.validate_config(str(CONFIGS / "invalid_kappa.json"))
    code, manifest = pe.run(str(CONFIGS / "default.json"), out=str(tmp_path))
    assert code == 0
    assert manifest["all_checks_passed"]
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["mode"] == "validate"
