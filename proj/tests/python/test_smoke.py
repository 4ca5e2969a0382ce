import math

import pytest

import reslab


def test_cylinder_delta_is_zero():
    assert reslab.critical_exponent("cylinder", lmax=16) == 0.0


def test_symmetric3_delta():
    d = reslab.critical_exponent("symmetric3", lmax=24)
    assert 0.28 < d < 0.30
    assert abs(reslab.pressure("symmetric3", d, lmax=24)) < 1e-9


def test_cylinder_resonances():
    length = 2 * math.acosh(1.5)
    zeros = reslab.resonances("cylinder", [-0.5, 0.5, 0.0, 7.0], lmax=32)
    assert [mult for _, mult in zeros] == [2, 2, 2]
    for k, (s, _) in enumerate(zeros):
        assert abs(s - 2j * math.pi * k / length) < 1e-7


def test_class_equation():
    p = 7
    assert sum(size for _, size in reslab.class_sizes(p)) == p * (p * p - 1)


def test_cycle_gap():
    assert reslab.spectral_gap(16) == pytest.approx(1 - math.cos(2 * math.pi / 16))


def test_test_function_nonnegative():
    x, v = reslab.test_function(0.5, 6, 1024)
    assert len(x) == len(v)
    assert min(v) >= 0.0


def test_bad_preset_raises():
    with pytest.raises(reslab.ValidationError):
        reslab.critical_exponent("nosuch")


def test_run_delta(tmp_path):
    status, summary, outputs = reslab.run(
        {"experiment": "delta", "group": "symmetric3", "lmax": 16, "output_dir": str(tmp_path)}
    )
    assert status == 0
    assert float(summary) == pytest.approx(0.2893, abs=1e-3)
    assert (tmp_path / "delta.json").exists()
