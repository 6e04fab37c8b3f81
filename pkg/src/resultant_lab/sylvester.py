"""Sylvester-style resultant for bivariate systems.

With one variable hidden, a pair of bivariate polynomials becomes two
univariate polynomials q_1, q_2 in the kept variable whose coefficients
depend on the hidden one.  If their degrees in the kept variable are
tau_1 and tau_2, the square matrix of size tau_1 + tau_2 whose first
tau_2 rows expand phi_j * q_1 (j = 0..tau_2 - 1) and whose last tau_1
rows expand phi_j * q_2 (j = 0..tau_1 - 1) is singular exactly when the
two univariate polynomials share a root.  Viewed as a matrix polynomial
in the hidden variable it is an alternative to the Cayley construction
with smaller matrices for d = 2.

At a system root the right null vector is the basis column
(phi_0, ..., phi_{N-1}) at the kept component; the left null vector is
assembled from backward-recurrence shifts of q_1 and q_2, reflecting the
cofactor identity  (-q_2 * q_1 + q_1 * q_2) / (x - y) = 0.
"""

from dataclasses import dataclass

import numpy as np

from .basis import basis_eval_all, clenshaw_shifts
from .matpoly import (MatrixPolynomial, StructureError, matpoly_eval,
                      matpoly_to_json)

__all__ = [
    "SylvesterResultant",
    "sylvester_degrees",
    "sylvester_row",
    "sylvester_resultant",
    "sylvester_root_eigvectors",
    "sylvester_resultant_to_json",
]


@dataclass(frozen=True)
class SylvesterResultant:
    """Matrix polynomial in the hidden variable with block bookkeeping.

    Rows 0..tau2 - 1 come from the first polynomial, rows tau2..N - 1
    from the second; N = tau1 + tau2."""

    matrix_poly: MatrixPolynomial
    tau1: int
    tau2: int

    @property
    def size(self):
        return self.tau1 + self.tau2


def _free_axis_degree(tensor):
    """Exact degree along the kept axis (hidden axis is last)."""
    rows = np.nonzero(np.any(tensor != 0, axis=-1))[0]
    if rows.size == 0:
        return None
    return int(rows.max())


def sylvester_degrees(hv):
    """(tau_1, tau_2): kept-variable degrees of the two polynomials.

    Raises for identically zero polynomials and for pairs that are both
    constant in the kept variable (the matrix would be empty).
    """
    if hv.dim != 2:
        raise ValueError("this construction is bivariate only")
    taus = []
    for c, t in enumerate(hv.tensors):
        deg = _free_axis_degree(t)
        if deg is None:
            raise ValueError(f"polynomial {c} is identically zero")
        taus.append(deg)
    if taus[0] + taus[1] == 0:
        raise ValueError("both polynomials are constant in the kept "
                         "variable; nothing to eliminate")
    return tuple(taus)


def sylvester_row(basis, coeffs, shift, length):
    """Expansion coefficients of phi_shift * p in phi_0..phi_{length-1}.

    p is given by its coefficient vector; the product degree must fit,
    i.e. shift + deg(p) <= length - 1.  Computed by sampling on domain
    nodes and solving the generalized Vandermonde system, which is exact
    up to roundoff for any degree-graded basis.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.shape[0] == 0:
        raise ValueError("coeffs must be a nonempty vector")
    deg = coeffs.shape[0] - 1
    if shift + deg > length - 1:
        raise ValueError(f"phi_{shift} * (degree {deg}) does not fit in "
                         f"{length} coefficients")
    nodes = basis.domain.nodes(length)
    table = basis_eval_all(basis, length - 1, nodes)  # (length, m)
    pvals = np.tensordot(coeffs, table[:deg + 1], axes=([0], [0]))
    return np.linalg.solve(table.T, table[shift] * pvals)


def _trimmed_univariate(tensor, basis, z, tau):
    """Coefficient vector of q(., z) cut at the exact kept degree."""
    phis = basis_eval_all(basis, tensor.shape[-1] - 1, complex(z))
    return (tensor @ phis)[:tau + 1]


def _matrix_at(hv, taus, z):
    tau1, tau2 = taus
    n = tau1 + tau2
    basis = hv.basis
    nodes = basis.domain.nodes(n)
    table = basis_eval_all(basis, n - 1, nodes)  # (n, n)
    S = np.empty((n, n), dtype=complex)
    blocks = ((tau2, _trimmed_univariate(hv.tensors[0], basis, z, tau1)),
              (tau1, _trimmed_univariate(hv.tensors[1], basis, z, tau2)))
    row = 0
    vand_t = table.T
    for count, coeffs in blocks:
        if count == 0:
            continue
        pvals = np.tensordot(coeffs, table[:len(coeffs)], axes=([0], [0]))
        rhs = (table[:count] * pvals).T  # (nodes, rows)
        S[row:row + count] = np.linalg.solve(vand_t, rhs).T
        row += count
    return S


def sylvester_resultant(hv):
    """Matrix polynomial in the hidden variable via entrywise interpolation.

    The matrix is sampled at one more hidden-variable node than the
    hidden degree and every entry is interpolated in the basis.
    """
    taus = sylvester_degrees(hv)
    hidden_degree = max(t.shape[-1] - 1 for t in hv.tensors)
    nodes = hv.domain.nodes(hidden_degree + 1)
    n = taus[0] + taus[1]
    samples = np.empty((len(nodes), n, n), dtype=complex)
    for i, z in enumerate(nodes):
        samples[i] = _matrix_at(hv, taus, z)
    vand = basis_eval_all(hv.basis, hidden_degree, nodes).T
    flat = np.linalg.solve(vand, samples.reshape(len(nodes), -1))
    coeffs = flat.reshape(len(nodes), n, n)
    return SylvesterResultant(
        matrix_poly=MatrixPolynomial(hv.basis, coeffs),
        tau1=taus[0], tau2=taus[1])


def sylvester_root_eigvectors(hv, root, resultant=None, check=True):
    """Right/left null vectors of the matrix at a root of the system.

    The right vector is (phi_0(y), ..., phi_{N-1}(y)) at the kept
    component y.  The left vector carries -alpha_i b_{i+1}[q_2](y) on
    the q_1 block and alpha_i b_{i+1}[q_1](y) on the q_2 block, where
    the b_k are backward-recurrence shifts.  Both are unnormalized.

    Raises StructureError when either residual exceeds 1e-7 times the
    matrix norm.
    """
    if resultant is None:
        resultant = sylvester_resultant(hv)
    root = np.atleast_1d(np.asarray(root, dtype=complex))
    if root.shape != (2,):
        raise ValueError("root must have length 2")
    y = complex(root[hv.free_order[0]])
    z = complex(root[hv.hidden_index])
    tau1, tau2 = resultant.tau1, resultant.tau2
    n = tau1 + tau2
    basis = hv.basis
    v = basis_eval_all(basis, n - 1, y)
    u1 = _trimmed_univariate(hv.tensors[0], basis, z, tau1)
    u2 = _trimmed_univariate(hv.tensors[1], basis, z, tau2)
    w = np.empty(n, dtype=complex)
    if tau2 > 0:
        b2 = clenshaw_shifts(basis, u2, y)  # ascending b_1, b_2, ...
        w[:tau2] = -basis.alphas(tau2 - 1) * b2[:tau2]
    if tau1 > 0:
        b1 = clenshaw_shifts(basis, u1, y)
        w[tau2:] = basis.alphas(tau1 - 1) * b1[:tau1]
    if check:
        S0 = matpoly_eval(resultant.matrix_poly, z)
        # At a multiple root S(z) may vanish entirely, so the scale is
        # floored by the coefficient size of the construction itself.
        scale = max(np.linalg.norm(S0, 2),
                    resultant.matrix_poly.coeff_scale)
        res_r = np.linalg.norm(S0 @ v) / np.linalg.norm(v)
        res_l = np.linalg.norm(S0.T @ w) / np.linalg.norm(w)
        if res_r > 1e-7 * scale or res_l > 1e-7 * scale:
            raise StructureError(
                f"structured null vector residuals {res_r:.3e}/{res_l:.3e} "
                f"exceed 1e-7 * ||S|| = {1e-7 * scale:.3e}")
    return v, w


def sylvester_resultant_to_json(res):
    obj = matpoly_to_json(res.matrix_poly)
    obj["taus"] = [int(res.tau1), int(res.tau2)]
    obj["row_blocks"] = [int(res.tau2), int(res.tau1)]
    return obj
