"""Multivariate evaluation, interpolation and Jacobians against naive
reference implementations."""

import itertools
import json

import numpy as np
import pytest

from resultant_lab.basis import DegreeGradedBasis, Domain, basis_eval_all
from resultant_lab.multipoly import (HiddenVariableForm, MultiPoly,
                                     NonSimpleRootError, PolynomialSystem,
                                     hide_variable, interpolate_on_nodes,
                                     jacobian, max_solution_bound, mp_eval,
                                     mp_eval_grid, mp_interpolate,
                                     root_condition, system_from_json,
                                     system_to_json)


def naive_eval(p, x):
    """Triple-checked reference: explicit sum over all tensor entries."""
    tables = [basis_eval_all(p.basis, p.coeffs.shape[a] - 1, complex(x[a]))
              for a in range(p.dim)]
    total = 0.0j
    for idx in itertools.product(*[range(e) for e in p.coeffs.shape]):
        term = p.coeffs[idx]
        for a, i in enumerate(idx):
            term = term * tables[a][i]
        total += term
    return total


def random_poly(rng, basis, dim, degrees):
    shape = tuple(n + 1 for n in degrees)
    return MultiPoly(basis, dim, rng.standard_normal(shape)
                     + 1j * rng.standard_normal(shape))


@pytest.fixture
def mono():
    return DegreeGradedBasis.monomial()


@pytest.fixture
def cheb():
    return DegreeGradedBasis.chebyshev()


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------

@pytest.mark.parametrize("dim,degrees", [(1, (4,)), (2, (2, 3)),
                                         (3, (1, 2, 2)), (4, (1, 1, 1, 1))])
def test_eval_matches_naive(cheb, dim, degrees):
    rng = np.random.default_rng(dim)
    p = random_poly(rng, cheb, dim, degrees)
    for _ in range(5):
        x = rng.uniform(-1, 1, dim)
        want = naive_eval(p, x)
        assert abs(mp_eval(p, x) - want) <= 1e-12 * (1 + abs(want))


def test_eval_grid_matches_pointwise(cheb):
    rng = np.random.default_rng(4)
    p = random_poly(rng, cheb, 3, (2, 1, 3))
    nodes = [rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 4),
             rng.uniform(-1, 1, 3)]
    grid = mp_eval_grid(p, nodes)
    assert grid.shape == (2, 4, 3)
    for i, j, k in itertools.product(range(2), range(4), range(3)):
        want = mp_eval(p, [nodes[0][i], nodes[1][j], nodes[2][k]])
        assert abs(grid[i, j, k] - want) <= 1e-11 * (1 + abs(want))


def test_eval_input_validation(mono):
    p = MultiPoly(mono, 2, np.ones((2, 2)))
    with pytest.raises(ValueError):
        mp_eval(p, [1.0])
    with pytest.raises(ValueError):
        mp_eval_grid(p, [[0.1]])
    with pytest.raises(ValueError):
        MultiPoly(mono, 2, np.ones((2,)))


# ----------------------------------------------------------------------
# Interpolation
# ----------------------------------------------------------------------

def test_interpolation_roundtrip(cheb):
    rng = np.random.default_rng(8)
    p = random_poly(rng, cheb, 2, (3, 2))
    nodes = [cheb.domain.nodes(4), cheb.domain.nodes(3)]
    samples = mp_eval_grid(p, nodes)
    coeffs = interpolate_on_nodes(cheb, nodes, samples)
    assert np.allclose(coeffs, p.coeffs, atol=1e-12)


def test_mp_interpolate_recovers(mono):
    rng = np.random.default_rng(15)
    p = random_poly(rng, mono, 3, (2, 2, 1))
    nodes = [mono.domain.nodes(n + 1) for n in (2, 2, 1)]
    q = mp_interpolate(mono, 3, (2, 2, 1), mp_eval_grid(p, nodes))
    assert np.allclose(q.coeffs, p.coeffs, atol=1e-12)


def test_interpolation_validation(mono):
    with pytest.raises(ValueError):
        interpolate_on_nodes(mono, [[0.0, 0.0]], np.ones(2))  # repeated node
    with pytest.raises(ValueError):
        interpolate_on_nodes(mono, [[0.0, 1.0]], np.ones(3))  # size mismatch
    with pytest.raises(ValueError):
        mp_interpolate(mono, 2, (1, 1), np.ones((2, 3)))


# ----------------------------------------------------------------------
# System container and hidden-variable rewrite
# ----------------------------------------------------------------------

def circle_line(mono):
    c1 = np.zeros((3, 3), dtype=complex)
    c1[0, 0], c1[2, 0], c1[0, 2] = -0.5, 1.0, 1.0
    c2 = np.zeros((2, 2), dtype=complex)
    c2[1, 0], c2[0, 1] = 1.0, -1.0
    return PolynomialSystem((MultiPoly(mono, 2, c1), MultiPoly(mono, 2, c2)))


def test_system_validation(mono, cheb):
    p = MultiPoly(mono, 2, np.ones((2, 2)))
    with pytest.raises(ValueError):
        PolynomialSystem((p,))  # not square
    q = MultiPoly(cheb, 2, np.ones((2, 2)))
    with pytest.raises(ValueError):
        PolynomialSystem((p, q))  # mixed bases
    r = MultiPoly(mono, 1, np.ones(3))
    with pytest.raises(ValueError):
        PolynomialSystem((p, r))  # mixed dims


def test_system_defaults(mono):
    sys_ = circle_line(mono)
    assert sys_.dim == 2
    assert sys_.max_degree == 2
    assert sys_.domain == mono.domain


def test_hide_variable_consistency(cheb):
    rng = np.random.default_rng(21)
    polys = tuple(random_poly(rng, cheb, 3, (2, 2, 2)) for _ in range(3))
    sys_ = PolynomialSystem(polys)
    for hidden in range(3):
        hv = hide_variable(sys_, hidden)
        assert isinstance(hv, HiddenVariableForm)
        assert hv.free_order == tuple(a for a in range(3) if a != hidden)
        for _ in range(4):
            x = rng.uniform(-1, 1, 3)
            direct = np.array([mp_eval(p, x) for p in polys])
            assert np.allclose(hv.assemble_eval(x), direct, atol=1e-11)


def test_hide_variable_default_is_last(mono):
    sys_ = circle_line(mono)
    assert hide_variable(sys_).hidden_index == 1
    with pytest.raises(ValueError):
        hide_variable(sys_, 5)


def test_frozen_slice(cheb):
    rng = np.random.default_rng(30)
    p = random_poly(rng, cheb, 2, (3, 2))
    sys_ = PolynomialSystem((p, p))
    hv = hide_variable(sys_, 1)
    z = 0.4
    q = hv.q_at(0, z)
    for x1 in (-0.3, 0.0, 0.77):
        assert abs(mp_eval(q, [x1]) - mp_eval(p, [x1, z])) <= 1e-12


# ----------------------------------------------------------------------
# Jacobian and conditioning
# ----------------------------------------------------------------------

def fd_jacobian(sys_, x, h=1e-7):
    d = sys_.dim
    J = np.empty((d, d), dtype=complex)
    for j in range(d):
        xp, xm = np.array(x, complex), np.array(x, complex)
        xp[j] += h
        xm[j] -= h
        for i, p in enumerate(sys_.polys):
            J[i, j] = (mp_eval(p, xp) - mp_eval(p, xm)) / (2 * h)
    return J


def test_jacobian_matches_fd(cheb):
    rng = np.random.default_rng(23)
    polys = tuple(random_poly(rng, cheb, 3, (2, 2, 2)) for _ in range(3))
    sys_ = PolynomialSystem(polys)
    x = rng.uniform(-0.8, 0.8, 3)
    assert np.allclose(jacobian(sys_, x), fd_jacobian(sys_, x), atol=1e-6)


def test_jacobian_linear_exact(mono):
    A = np.array([[2.0, -1.0], [0.5, 3.0]])
    polys = []
    for i in range(2):
        c = np.zeros((2, 2), dtype=complex)
        c[1, 0], c[0, 1] = A[i, 0], A[i, 1]
        polys.append(MultiPoly(mono, 2, c))
    sys_ = PolynomialSystem(tuple(polys))
    assert np.allclose(jacobian(sys_, [0.3, -0.4]), A, atol=1e-14)


def test_root_condition_inverse_smallest_singular(mono):
    sys_ = circle_line(mono)
    x = np.array([0.5, 0.5])
    J = jacobian(sys_, x)
    want = 1.0 / np.linalg.svd(J, compute_uv=False)[-1]
    assert root_condition(sys_, x) == pytest.approx(want)


def test_root_condition_singular_raises(mono):
    # p1 = x^2 + y^2, p2 = x*y has a non-simple root at the origin
    c1 = np.zeros((3, 3), dtype=complex)
    c1[2, 0], c1[0, 2] = 1.0, 1.0
    c2 = np.zeros((2, 2), dtype=complex)
    c2[1, 1] = 1.0
    sys_ = PolynomialSystem((MultiPoly(mono, 2, c1), MultiPoly(mono, 2, c2)))
    with pytest.raises(NonSimpleRootError):
        root_condition(sys_, [0.0, 0.0])


def test_max_solution_bound(mono):
    sys_ = circle_line(mono)
    assert max_solution_bound(sys_) == 2 * 2 ** 2  # d! * n^d


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------

def test_system_json_roundtrip(mono):
    sys_ = circle_line(mono)
    obj = json.loads(json.dumps(system_to_json(sys_)))
    again = system_from_json(obj)
    assert again.dim == 2 and again.basis == mono
    for a, b in zip(sys_.polys, again.polys):
        assert np.array_equal(a.coeffs, b.coeffs)


def test_system_json_complex_and_domain(cheb):
    dom = Domain.interval(-2, 2)
    basis = DegreeGradedBasis.chebyshev(dom)
    c = np.array([[1.0 + 2.0j, 0.0], [0.5, -1.0j]])
    p = MultiPoly(basis, 2, c)
    sys_ = PolynomialSystem((p, p))
    again = system_from_json(system_to_json(sys_))
    assert again.domain == dom
    assert np.array_equal(again.polys[0].coeffs, c)


def test_system_json_validation():
    with pytest.raises(ValueError):
        system_from_json({"dim": 2, "polys": []})
    with pytest.raises(ValueError):
        system_from_json({"basis": "monomial", "dim": 2, "polys": []})
    with pytest.raises(ValueError):
        system_from_json({"basis": "monomial", "dim": 2, "polys": [
            {"degrees": [1, 1], "coeffs_real": [1.0, 2.0]}]})  # wrong count
