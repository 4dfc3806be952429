"""Shared fixtures and synthetic-cell helpers."""

from __future__ import annotations

import numpy as np
import pytest

from hessopt.cells import CellParams, load_chemistry
from hessopt.drivetrain import DriveCycle, VehicleParams
from hessopt.tables import Table1D, Table2D


def make_cell(
    chemistry_id="test",
    v0=3.4,
    k=0.05,
    a=0.3,
    b_const=2.0,
    q_eff=2.5,
    r=0.02,
    q_nom=2.5,
    v_c_max=4.2,
    v_c_nom=3.6,
    v_c_min=2.5,
    i_c_max=30.0,
    i_c_min=-15.0,
    m_c=0.045,
    c_p_c=1000.0,
    kappa_tot=0.15,
    a_cy=1e-5,
    b_cy=0.01,
    soh_eol=0.8,
    cost_per_cell=3.0,
    energy_density=200.0,
    power_density=1000.0,
) -> CellParams:
    """A cell with temperature-independent scalar tables."""
    return CellParams(
        chemistry_id=chemistry_id,
        v0_table=Table1D.constant(v0, "v0"),
        k_table=Table1D.constant(k, "k"),
        a_table=Table1D.constant(a, "a"),
        b_const=b_const,
        q_eff_table=Table1D.constant(q_eff, "q_eff"),
        r_table=Table2D.constant(r, "r"),
        q_nom=q_nom,
        v_c_max=v_c_max,
        v_c_nom=v_c_nom,
        v_c_min=v_c_min,
        i_c_max=i_c_max,
        i_c_min=i_c_min,
        m_c=m_c,
        c_p_c=c_p_c,
        kappa_tot=kappa_tot,
        a_cy=a_cy,
        b_cy=b_cy,
        soh_eol=soh_eol,
        cost_per_cell=cost_per_cell,
        energy_density=energy_density,
        power_density=power_density,
    )


def flat_ocv_cell(v_oc=3.6, r=0.02, **kwargs) -> CellParams:
    """A cell whose OCV equals v_oc at every state of charge."""
    kwargs.setdefault("v_c_nom", v_oc)
    return make_cell(v0=v_oc, k=0.0, a=0.0, b_const=1.0, r=r, **kwargs)


@pytest.fixture(scope="session")
def nca():
    return load_chemistry("nca")


@pytest.fixture(scope="session")
def nmc():
    return load_chemistry("nmc")


@pytest.fixture(scope="session")
def lfp():
    return load_chemistry("lfp")


@pytest.fixture(scope="session")
def lto():
    return load_chemistry("lto")


@pytest.fixture(scope="session")
def vehicle():
    return VehicleParams(m_base=1200.0, c_d=0.26, a_f=2.5, c_r=0.012)


def sawtooth_cycle(n_steps=240, v_peak=20.0, dt=1.0) -> DriveCycle:
    """Simple accelerate/cruise/brake/stop blocks for fast simulations."""
    block = np.concatenate([
        np.linspace(0.0, v_peak, 20),
        np.full(15, v_peak),
        np.linspace(v_peak, 0.0, 20),
        np.zeros(5),
    ])
    reps = int(np.ceil(n_steps / block.size))
    return DriveCycle(dt, np.tile(block, reps)[:n_steps])


def traction_cycle(n_steps=120, v=15.0, dt=1.0) -> DriveCycle:
    """Constant-speed cruise: no braking anywhere."""
    return DriveCycle(dt, np.full(n_steps, v))
