import math

import numpy as np
import pytest

from spinent.elf import d_unif, elf_from_chi, elf_from_lengths, elf_values_from_chi, elf_values_from_lengths
from spinent.errors import UndefinedPointError
from spinent.fields import compute_fields
from spinent.grid import ScalarField, UniformGrid3D
from spinent.orbitals import GasModel


def test_d_unif_matches_gas_kinetic_density():
    # for the gas, D = tau = (3/5) k_F^2 n
    gas = GasModel.from_rs(2.0)
    assert d_unif(gas.n) == pytest.approx(0.6 * gas.k_F**2 * gas.n, rel=1e-14)
    assert d_unif(gas.n, "spin-resolved") == pytest.approx(0.5 * d_unif(gas.n))
    with pytest.raises(ValueError):
        d_unif(-1.0)


def test_elf_limits():
    n = np.array([0.3, 0.3, 0.3])
    elf, chi = elf_values_from_chi(np.array([0.0, d_unif(0.3), 1e6]), n)
    assert elf[0] == 1.0
    assert elf[1] == pytest.approx(0.5, abs=1e-15)
    assert elf[2] < 1e-10


def test_forms_agree_on_random_fields():
    rng = np.random.default_rng(3)
    n = 10 ** rng.uniform(-6, 2, size=500)
    D = 10 ** rng.uniform(-8, 3, size=500)
    a, _ = elf_values_from_chi(D, n)
    b, _ = elf_values_from_lengths(np.sqrt(D / n), n)
    assert np.abs(a - b).max() < 1e-12


def test_field_wrappers(argon):
    grid = UniformGrid3D.cartesian((-2, -2, -2), (2, 2, 2), (9, 9, 9))
    b = compute_fields(argon, grid)
    e1 = elf_from_chi(b.D, b.n)
    e2 = elf_from_lengths(b.inv_lE, b.n)
    np.testing.assert_allclose(e1.elf.values, e2.elf.values, atol=1e-12)
    assert np.all((e1.elf.values >= 0) & (e1.elf.values <= 1))
    inv_unif = e1.inv_lE_unif.values.ravel()[0]
    n0 = b.n.values.ravel()[0]
    assert inv_unif == pytest.approx(math.sqrt(0.6) * (3 * math.pi**2 * n0) ** (1 / 3), rel=1e-12)


def test_all_undefined_raises():
    grid = UniformGrid3D.cartesian((0, 0, 0), (1, 1, 1), (2, 2, 2))
    zero = ScalarField(grid, np.zeros(grid.dims))
    with pytest.raises(UndefinedPointError):
        elf_from_chi(zero, zero)


def test_argon_elf_minima_sit_at_inv_le_maxima(argon):
    # shell boundaries: ELF minima and inverse-length maxima coincide within a few steps
    from spinent.analysis import local_extrema, radial_profile

    prof = radial_profile(argon, 6.0, 600)
    elf_min = prof.r[local_extrema(prof.elf, "min", include_start=False)]
    inv_max = prof.r[local_extrema(prof.inv_lE, "max")]
    assert len(elf_min) == len(inv_max) == 2
    np.testing.assert_allclose(elf_min, inv_max, atol=0.03)
