import numpy as np
import pytest

from spinent.cli import main
from spinent.fermi_gas import concurrence_exact_unif
from spinent.grid import UniformGrid3D
from spinent.io import cube_from_volumes, read_csv, read_cube, save_cube
from spinent.orbitals import GasModel, HydrogenicSpec, Shell, hydrogenic_set, orbital_set_on_grid


def _csv(path):
    return read_csv(path.read_bytes())


def test_gas_compare_outputs(tmp_path, capsys):
    assert main(["gas-compare", "--out", str(tmp_path), "--samples", "101"]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["gas_curves.png", "gas_rs_0.5.csv", "gas_rs_1.csv", "gas_rs_4.csv", "gas_summary.csv"]
    summary = _csv(tmp_path / "gas_summary.csv")
    row = list(summary["r_s"]).index(1.0)
    assert summary["l_E_unif"][row] == pytest.approx(0.67268, abs=1e-5)
    assert summary["u_crossing"][row] == pytest.approx(0.94563, abs=1e-5)
    curve = _csv(tmp_path / "gas_rs_1.csv")
    assert list(curve) == ["u", "c_exact", "c_sr", "c_gauss"] and len(curve["u"]) == 101
    assert "config: command=gas-compare" in capsys.readouterr().err


@pytest.mark.parametrize("args", [["--samples", "1"], ["--rs", "1.0,-2"], ["--rs", "abc"]])
def test_gas_compare_usage_errors(tmp_path, capsys, args):
    assert main(["gas-compare", "--out", str(tmp_path), *args]) == 2
    assert "spinent: usage error:" in capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test\nrs = 2.0\nsamples = 7  # comment\nplots = false\n")
    out = tmp_path / "o"
    assert main(["gas-compare", "--config", str(cfg), "--samples", "9", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["gas_rs_2.csv", "gas_summary.csv"]
    assert len(_csv(out / "gas_rs_2.csv")["u"]) == 9
    err = capsys.readouterr().err
    assert "rs=2.0" in err and "samples=9" in err
    cfg.write_text("bogus = 1\n")
    assert main(["gas-compare", "--config", str(cfg), "--out", str(out)]) == 2


def test_atom_profile_single_orbital(tmp_path):
    assert main(["atom-profile", "--shells", "1s:1.7", "--rmax", "4", "--samples", "40", "--out", str(tmp_path), "--no-plots"]) == 0
    prof = _csv(tmp_path / "atom_profile.csv")
    assert list(prof) == ["r", "n", "D", "inv_lE", "elf"]
    np.testing.assert_allclose(prof["inv_lE"], 0.0, atol=1e-6)
    np.testing.assert_allclose(prof["elf"], 1.0, atol=1e-12)


def test_atom_profile_argon_three_maxima(tmp_path):
    assert main(["atom-profile", "--model", "ar-slater", "--out", str(tmp_path), "--no-plots"]) == 0
    ext = _csv(tmp_path / "atom_elf_extrema.csv")
    assert int((ext["type"] == 1).sum()) == 3


def test_atom_profile_source_errors(tmp_path, capsys):
    assert main(["atom-profile", "--shells", "", "--out", str(tmp_path)]) == 2
    assert main(["atom-profile", "--out", str(tmp_path)]) == 2
    assert main(["atom-profile", "--model", "xe-slater", "--out", str(tmp_path)]) == 2
    assert main(["atom-profile", "--cubes", str(tmp_path / "none*.cube"), "--out", str(tmp_path)]) == 2


def test_analyze_cube_toy(tmp_path, toy_cubes):
    out = tmp_path / "o"
    assert main(["analyze-cube", "--cubes", str(toy_cubes / "*.cube"), "--plane", "z=0", "--out", str(out)]) == 0
    assert {"plane_z_0.csv", "plane_z_0.png", "elf.cube", "inv_lE.cube"} <= {p.name for p in out.iterdir()}
    sl = _csv(out / "plane_z_0.csv")
    axis = np.abs(sl["y"]) < 1e-9
    x, elf, inv = sl["x"][axis], sl["elf"][axis], sl["inv_lE"][axis]
    mid = int(np.argmin(np.abs(x)))
    assert elf[mid] > elf[mid - 1] and elf[mid] > elf[mid + 1]
    assert inv[mid] < inv[mid - 1] and inv[mid] < inv[mid + 1]
    assert read_cube(out / "elf.cube").counts == (57, 41, 41)


def test_analyze_cube_single_orbital_and_errors(tmp_path, capsys):
    g = UniformGrid3D.cartesian((-3, -3, -3), (3, 3, 3), (25, 25, 25))
    orb = hydrogenic_set(HydrogenicSpec([Shell(2, 1, 0, 1.0)]))
    save_cube(tmp_path / "one.cube", cube_from_volumes(g, orbital_set_on_grid(orb, g).real))
    out = tmp_path / "o"
    assert main(["analyze-cube", "--cubes", str(tmp_path / "one.cube"), "--plane", "x=0.1", "--out", str(out), "--no-plots"]) == 0
    elf = _csv(out / "plane_x_0.1.csv")["elf"]
    np.testing.assert_allclose(elf[np.isfinite(elf)], 1.0, atol=1e-10)
    assert main(["analyze-cube", "--cubes", str(tmp_path / "one.cube"), "--plane", "z=5", "--out", str(out)]) == 1
    assert "spinent: error:" in capsys.readouterr().err
    g2 = UniformGrid3D.cartesian((-3, -3, -3), (3, 3, 3.5), (25, 25, 25))
    save_cube(tmp_path / "two.cube", cube_from_volumes(g2, np.ones(g2.dims)))
    assert main(["analyze-cube", "--cubes", str(tmp_path / "*.cube"), "--out", str(out)]) == 1


def test_pair_on_top_and_gas_scan(tmp_path):
    assert main(["pair", "--model", "ar-slater", "--r1", "0.1,0.2,0.3", "--r2", "0.1,0.2,0.3", "--out", str(tmp_path)]) == 0
    assert _csv(tmp_path / "pair.csv")["C"][0] == pytest.approx(1.0, abs=1e-12)
    assert main(["pair", "--gas", "1", "--r1", "0,0,0", "--r2", "1,1,1", "--scan", "3,31", "--out", str(tmp_path), "--no-plots"]) == 0
    scan = _csv(tmp_path / "pair_scan.csv")
    np.testing.assert_allclose(scan["C"], concurrence_exact_unif(GasModel.from_rs(1.0), scan["u"]), atol=1e-14)


def test_pair_errors(tmp_path, capsys):
    assert main(["pair", "--model", "ar-slater", "--r1", "0,0", "--r2", "0,0,1", "--out", str(tmp_path)]) == 2
    assert main(["pair", "--model", "ar-slater", "--r1", "0,0,1", "--out", str(tmp_path)]) == 2
    assert main(["pair", "--model", "ar-slater", "--gas", "1", "--r1", "0,0,1", "--r2", "0,0,1", "--out", str(tmp_path)]) == 2
    assert main(["pair", "--model", "ar-slater", "--r1", "90,0,0", "--r2", "0,0,1", "--out", str(tmp_path)]) == 0
    assert _csv(tmp_path / "pair.csv")["defined"][0] == 0.0


def test_pair_averaged_scan_gas(tmp_path):
    assert main(["pair", "--gas", "2", "--r1", "0,0,0", "--r2", "0,0,1", "--scan", "4,9", "--average", "true", "--out", str(tmp_path), "--no-plots"]) == 0
    scan = _csv(tmp_path / "pair_scan.csv")
    assert scan["C"][0] == 1.0 and scan["C"][-1] == 0.0
