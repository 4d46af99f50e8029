import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthokin import DesignParameters, InvalidDesign, ToleranceConfig, canonical_design, isotropic_configuration, validate
from orthokin.model import design_from_dict, design_to_dict, load_design, save_design


def test_canonical_is_valid(canon):
    assert validate(canon) == []
    assert canon.L == 1.0
    assert np.array_equal(canon.rail_axes, np.eye(3))
    assert canon.joint_limits is None


@pytest.mark.parametrize("L", [0.0, -1.0, math.nan, math.inf])
def test_canonical_rejects_bad_length(L):
    with pytest.raises(InvalidDesign):
        canonical_design(L)


def test_arrays_are_read_only(canon):
    with pytest.raises(ValueError):
        canon.rail_axes[0, 0] = 2.0


def test_validate_reports_each_problem():
    bad = DesignParameters(
        leg_length=-1,
        rail_axes=[[1, 0, 0], [0.1, 1, 0], [0, 0, 2]],
        rail_anchors=np.zeros((3, 3)),
        branch_signs=(1, 0, -1),
        joint_limits=[[0, 1], [1, 1], [2, 0]],
    )
    problems = validate(bad)
    text = "\n".join(problems)
    assert "leg_length" in text
    assert "not unit length" in text
    assert "not orthogonal" in text
    assert "branch sign 2" in text
    assert "leg 2" in text and "leg 3" in text


def test_isotropic_point_canonical(canon):
    p, rho = isotropic_configuration(canon)
    assert np.allclose(p, 0) and np.allclose(rho, 1)


def test_isotropic_point_shifted_rails():
    # rails through (1, 2, 3) with a permuted, sign-flipped frame
    E = np.array([[0, 1, 0], [0, 0, -1], [1, 0, 0]], float)
    c = np.array([1.0, 2.0, 3.0])
    a = np.array([c - 5 * e for e in E])
    params = DesignParameters(2.0, E, a, (1, -1, 1))
    p, rho = isotropic_configuration(params)
    assert np.allclose(p, c)
    assert np.allclose(rho, [5 + 2, 5 - 2, 5 + 2])


def test_isotropic_point_requires_meeting_rails():
    a = np.array([[0, 0, 0], [0, 0, 0], [0.5, 0, 0]], float)
    with pytest.raises(InvalidDesign):
        isotropic_configuration(DesignParameters(1.0, np.eye(3), a))


def test_roundtrip_through_file(tmp_path):
    params = canonical_design(0.7).with_joint_limits([[0.1, 1.0], [-np.inf, 1.2], [0.0, np.inf]])
    path = tmp_path / "m.json"
    save_design(params, path)
    data = json.loads(path.read_text())
    assert data["joint_limits"][1][0] is None
    assert load_design(path) == params


def test_unknown_keys_rejected():
    with pytest.raises(InvalidDesign, match="unknown"):
        design_from_dict({"leg_length": 1, "legs": 3})


@pytest.mark.parametrize("content", ["not json", "[1, 2]", '{"rail_axes": [1, 2]}', '{"tolerances": 3}'])
def test_malformed_files(tmp_path, content):
    path = tmp_path / "m.json"
    path.write_text(content)
    with pytest.raises(InvalidDesign):
        load_design(path)


def test_missing_file(tmp_path):
    with pytest.raises(InvalidDesign):
        load_design(tmp_path / "nope.json")


def test_tolerance_problems():
    assert ToleranceConfig().problems() == []
    assert len(ToleranceConfig(geom_eps=0, iter_max=-1).problems()) == 2


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20.0), st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3))
def test_dict_roundtrip_property(L, signs):
    params = DesignParameters(L, np.eye(3), np.zeros((3, 3)), tuple(signs))
    assert design_from_dict(design_to_dict(params)) == params


def test_isotropic_links_orthogonal_with_norm_L():
    from orthokin import inverse_kinematics

    for L in (0.3, 1.0, 2.0):
        params = canonical_design(L)
        p, rho = isotropic_configuration(params)
        assert np.allclose(rho, L)
        links = inverse_kinematics(p, params).link_vectors
        assert np.allclose(links @ links.T, L * L * np.eye(3), atol=1e-12)


def test_equal_axes_reported():
    params = DesignParameters(1.0, [[1, 0, 0], [1, 0, 0], [0, 0, 1]], np.zeros((3, 3)))
    assert any("not orthogonal" in s for s in validate(params))


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_canonical_valid_for_all_lengths(L):
    assert validate(canonical_design(L)) == []
