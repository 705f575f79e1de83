import pytest

from hybridrupture import ElasticMaterial, RegionSpec, derive_wavespeeds
from hybridrupture.exceptions import InvalidMaterialException, UnexpectedTypeException


def test__elastic_material__from_wavespeeds(host: ElasticMaterial):
    assert host.shear_modulus == pytest.approx(2670.0 * 3464.0 ** 2)
    assert host.lame_lambda == pytest.approx(2670.0 * 6000.0 ** 2 - 2.0 * host.shear_modulus)

    assert host.cs == 3464.0
    assert host.cp == 6000.0
    assert host.poisson_ratio == pytest.approx(0.25, abs=1e-3)


def test__elastic_material__moduli_round_trip(host: ElasticMaterial):
    material = ElasticMaterial(host.density, host.shear_modulus, host.lame_lambda)

    cp, cs = derive_wavespeeds(material)

    assert cp == pytest.approx(6000.0, rel=1e-12)
    assert cs == pytest.approx(3464.0, rel=1e-12)
    assert material == host


def test__elastic_material__scaled(host: ElasticMaterial):
    lvz = host.scaled(0.8, "lvz")

    assert lvz.density == host.density
    assert lvz.cs == pytest.approx(0.8 * 3464.0)
    assert lvz.shear_modulus == pytest.approx(0.64 * host.shear_modulus)
    assert lvz.lame_lambda == pytest.approx(0.64 * host.lame_lambda)


def test__elastic_material__invalid():
    with pytest.raises(InvalidMaterialException):
        ElasticMaterial(0.0, 3.2e10, 3.2e10)

    with pytest.raises(InvalidMaterialException):
        ElasticMaterial(2670.0, -1.0, 3.2e10)

    with pytest.raises(InvalidMaterialException):
        ElasticMaterial(2670.0, 3.2e10, -3.0e10)

    with pytest.raises(InvalidMaterialException):
        ElasticMaterial.from_wavespeeds(2670.0, 3000.0, 3464.0)

    with pytest.raises(UnexpectedTypeException):
        ElasticMaterial("2670", 3.2e10, 3.2e10)


def test__elastic_material__to_dict(host: ElasticMaterial):
    data = host.to_dict()

    assert data == {"density": 2670.0, "cp": 6000.0, "cs": 3464.0, "name": "host"}
    assert ElasticMaterial.from_dict(data) == host


def test__region_spec():
    region = RegionSpec((0, -800, 0), (60e3, 800, 30e3), 1)

    assert region.lower == (0.0, -800.0, 0.0)
    assert RegionSpec.from_dict(region.to_dict()).to_dict() == region.to_dict()

    with pytest.raises(UnexpectedTypeException):
        RegionSpec((0, 0, 0), (1, 1, 1), 1.0)
