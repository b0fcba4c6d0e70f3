import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhx.dyadic import (ParameterError, ResolutionError, build_adjacent, build_system, check_system, check_whitney,
                        cz_decompose, lmo_decompose, lmo_domination, median, oscillation, rearrangement,
                        sparse_operator, whitney_decompose)
from bhx.geometry import make_sphere_quadrature, ni_distance
from bhx.transforms import GridFunc


@pytest.fixture(scope="module")
def sys1():
    return build_system(make_sphere_quadrature(1, 1024), k_min=-3, k_max=2)


def test_system_properties(sys1):
    c = check_system(sys1)
    assert c["partition"] and c["nesting"] and c["children"] and c["sandwich"]
    assert c["levels"] == 6


def test_system_n2():
    S = build_system(make_sphere_quadrature(2, (16, 8)), k_min=-3, k_max=0)
    c = check_system(S)
    assert c["partition"] and c["nesting"] and c["sandwich"]


def test_parameter_errors():
    q = make_sphere_quadrature(1, 256)
    with pytest.raises(ParameterError):
        build_system(q, r=0.5)
    with pytest.raises(ResolutionError):
        build_system(q, k_max=5)


def test_system_json_roundtrip(sys1):
    import json
    d = json.loads(sys1.to_json())
    assert len(d["cubes"]) == len(sys1.cubes)


def test_adjacent_dilation_finite():
    _, rep = build_adjacent(make_sphere_quadrature(1, 256), 2, k_max=1)
    assert np.isfinite(rep["dilation"])


@given(st.integers(0, 10_000))
def test_whitney_properties(seed):
    q = make_sphere_quadrature(1, 512)
    rng = np.random.default_rng(seed)
    mask = ni_distance(q.nodes, q.nodes[int(rng.integers(q.size))]) < rng.uniform(0.2, 1.2)
    if mask.all() or not mask.any():
        return
    c = check_whitney(whitney_decompose(mask, q), q)
    assert c["union"] and c["inside_and_meets"] and c["disjoint"] and c["cubes_partition"] and c["cubes_sandwich"]


@given(st.integers(0, 10_000))
def test_cz_identities(seed):
    q = make_sphere_quadrature(1, 512)
    v = np.random.default_rng(seed).exponential(size=q.size) ** 3
    f = GridFunc(q, v)
    out = cz_decompose(f, 3 * f.l1())
    assert np.allclose(out.reconstruct(), v, atol=1e-12 * v.max())
    for idx, b in out.bad:
        assert abs(np.dot(q.weights[idx], b)) <= 1e-12 * f.l1()
    assert np.all(np.isfinite(list(out.constants.values())))
    with pytest.raises(ValueError):
        cz_decompose(f, 0.5 * f.l1())


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40))
def test_median_definition(vals):
    q = make_sphere_quadrature(1, len(vals))
    f = GridFunc(q, np.array(vals))
    idx = np.arange(len(vals))
    m = median(f, idx)
    w = q.weights
    assert w[f.values > m].sum() <= 0.5 + 1e-12 and w[f.values < m].sum() <= 0.5 + 1e-12


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40), st.floats(0.01, 1.0))
def test_rearrangement_definition(vals, t):
    q = make_sphere_quadrature(1, len(vals))
    f = GridFunc(q, np.array(vals))
    a = rearrangement(f, t)
    assert q.weights[np.abs(f.values) > a].sum() <= t * (1 + 1e-9)
    smaller = np.abs(f.values)[np.abs(f.values) < a]
    if a > 0:
        b = smaller.max() if smaller.size else 0.0
        assert q.weights[np.abs(f.values) > b].sum() > t * (1 - 1e-9)


def test_oscillation_constant_is_zero(sys1):
    f = GridFunc(sys1.quad, np.full(sys1.quad.size, 2.0))
    assert oscillation(f, sys1.cubes[0], 0.1) == 0.0


@given(st.integers(0, 10_000))
def test_lmo_sparse_and_dominates(seed):
    S = build_system(make_sphere_quadrature(1, 1024), k_min=-3, k_max=2)
    root = S.levels[S.k_min][0]
    f = GridFunc(S.quad, np.cumsum(np.random.default_rng(seed).standard_normal(S.quad.size)))
    fam = lmo_decompose(f, S, root)
    assert fam.density <= 2.0
    assert lmo_domination(f, fam, root)["mass_fraction"] >= 0.99
    T = sparse_operator(fam, 0, f)
    assert np.all(T >= 0)
