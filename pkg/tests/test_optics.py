import numpy as np
import pytest

from spps import optics
from spps.errors import EvanescentRegime, InputError

HYPERBOLIC = "1.4*exp(x*log(2.1/1.4))"


@pytest.fixture(scope="module")
def graded():
    return optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, HYPERBOLIC, 50, 16, "nonic", 2)


@pytest.mark.parametrize("bl", [0.05, 0.1, 0.3])
def test_homogeneous_layer(bl):
    cfg = optics.OpticsConfig.from_expression(1.5, 1.5, 1.0, "1.5", 50, 16)
    k = 2 * np.pi * bl
    res = optics.rt_at(cfg, 0.0, k)
    assert abs(res.R) < 1e-12
    assert abs(abs(res.T) - 1) < 1e-12
    assert abs(res.T - np.exp(-2j * 1.5 * k)) < 1e-9


@pytest.mark.parametrize("profile", ["1.2", "1+x", HYPERBOLIC])
def test_energy_identity(profile):
    cfg = optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, profile, 50, 16, "nonic", 2)
    for bl in np.linspace(0.01, 1.0, 12):
        res = optics.rt_at(cfg, 0.0, 2 * np.pi * bl)
        assert abs(res.energy_defect) < 1e-8


def test_single_expansion_holds_at_moderate_thickness():
    cfg = optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, HYPERBOLIC, 50, 16)
    for bl in np.linspace(0.01, 0.5, 12):
        assert abs(optics.rt_at(cfg, 0.0, 2 * np.pi * bl).energy_defect) < 1e-6


def test_segments_agree(graded):
    one = optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, HYPERBOLIC, 50, 16, "nonic", 1)
    for bl in (0.05, 0.2):
        a = graded.endpoint_values([0.01, -(2 * np.pi * bl) ** 2])
        b = one.endpoint_values([0.01, -(2 * np.pi * bl) ** 2])
        np.testing.assert_allclose(a, b, atol=1e-9)


def test_against_rk4_reference(graded):
    for beta, bl in [(0.1, 0.1), (0.2, 0.5), (0.0, 1.0)]:
        k = 2 * np.pi * bl
        ref = optics.reference_values(graded, beta, k, M_fine=4000)
        np.testing.assert_allclose(graded.endpoint_values([beta**2, -k * k]), ref, atol=1e-7)


def test_evanescent():
    cfg = optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, "1.2", 10, 8)
    with pytest.raises(EvanescentRegime):
        optics.rt_at(cfg, 2.0, 1.0)


def test_scan_statuses(graded):
    rows = optics.rt_scan(graded, [0.0, 0.5], [0.01, 0.07, 0.2])
    status = {(r.beta, r.b_over_lambda): r.status for r in rows}
    assert status[(0.5, 0.01)] == optics.SKIPPED
    # with n1 >= 1 the skip rule already removes every k < beta cell
    assert status[(0.5, 0.07)] == optics.SKIPPED
    assert status[(0.5, 0.2)] == optics.OK
    for r in rows:
        if r.status == optics.OK:
            assert np.isfinite([r.result.R, r.result.T]).all()
            assert (r.result.energy_defect is None) == (r.beta != 0)
    assert optics.rt_scan(graded, [], [0.1]) == []


def test_scan_csv(tmp_path, graded):
    rows = optics.rt_scan(graded, [0.0, 0.5], [0.01, 0.2])
    optics.write_scan_csv(tmp_path / "scan.csv", rows)
    lines = (tmp_path / "scan.csv").read_text().splitlines()
    assert lines[0].split(",") == optics.SCAN_HEADER
    assert len(lines) == 5
    assert lines[3].endswith("SKIPPED") and "nan" in lines[3]
    assert lines[4].split(",")[8] == "NA"


def test_config_validation():
    with pytest.raises(InputError):
        optics.OpticsConfig.from_expression(0.5, 1.5, 1.0, "1.2", 10, 8)
    with pytest.raises(InputError):
        optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, "0.5+x", 10, 8)
    with pytest.raises(InputError):
        optics.OpticsConfig.from_expression(1.0, 1.5, 1.0, "1.2", 10, 8, segments=3)
    with pytest.raises(InputError):
        optics.load_config({"n1": 1, "n2": 1.5, "b": 1, "profile": "1.2", "order": 8})
