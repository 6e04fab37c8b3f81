"""Cayley (Dixon/Bezout style) function, coefficient tensor and resultant.

Given a square system with one variable hidden, form the d x d matrix
whose row r holds the polynomials evaluated at the mixed argument
(t_1, ..., t_{r-1}, s_r, ..., s_{d-1}); its determinant divided by
prod_k (s_k - t_k) is a polynomial in the 2d - 2 auxiliary variables
with coefficients depending on the hidden variable.  Expanding it in
tensor-product form gives a coefficient tensor; flattening the s-indexed
axes into rows and the t-indexed axes into columns (plain C-order on
both groups) yields a matrix polynomial in the hidden variable, the
Cayley resultant, whose eigenvalues contain every hidden component of
the system's roots.

Degree bounds: with maximal degree n, the function has degree at most
k n - 1 in s_k and in t_{d-k}.  For systems of total degree one the
function is constant in every auxiliary variable, so the bounds drop to
zero; this structural fact keeps linear systems away from identically
singular unfoldings.

Coefficients are recovered by sampling on tensor grids and solving
per-axis generalized Vandermonde systems.  The s-grids and t-grids are
drawn from interleaved point families chosen so that s_k never collides
with t_k, which keeps the defining quotient evaluable everywhere on the
grid; values on the diagonal s = t come from contracting the recovered
tensor instead.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .basis import basis_eval_all
from .matpoly import (MatrixPolynomial, StructureError, matpoly_eval,
                      matpoly_to_json)
from .multipoly import interpolate_on_nodes, mp_eval, mp_eval_grid

__all__ = [
    "CayleyTensor",
    "CayleyResultant",
    "default_taus",
    "cayley_function_eval",
    "cayley_coeffs",
    "cayley_resultant",
    "cayley_diagonal_value",
    "cayley_diagonal_derivative",
    "cayley_root_eigvectors",
    "cayley_resultant_to_json",
]


@dataclass(frozen=True)
class CayleyTensor:
    """Tensor-product coefficients of the Cayley function at one value
    of the hidden variable.

    coeffs is indexed (i_1, ..., i_{d-1}, j_1, ..., j_{d-1}) where i_k
    pairs with phi_{i_k}(s_k) (0 <= i_k <= tau_k) and j_k pairs with
    phi_{j_k}(t_k) (0 <= j_k <= tau_{d-k})."""

    basis: object
    d: int
    taus: tuple
    coeffs: np.ndarray

    @property
    def row_extents(self):
        return tuple(t + 1 for t in self.taus)

    @property
    def col_extents(self):
        return tuple(t + 1 for t in reversed(self.taus))


@dataclass(frozen=True)
class CayleyResultant:
    """Matrix polynomial in the hidden variable plus the index bookkeeping
    that maps tensor entries to matrix entries."""

    matrix_poly: MatrixPolynomial
    taus: tuple

    @property
    def row_extents(self):
        return tuple(t + 1 for t in self.taus)

    @property
    def col_extents(self):
        return tuple(t + 1 for t in reversed(self.taus))

    @property
    def row_strides(self):
        return _c_strides(self.row_extents)

    @property
    def col_strides(self):
        return _c_strides(self.col_extents)

    @property
    def unfolding_map(self):
        return {"row_extents": list(self.row_extents),
                "col_extents": list(self.col_extents),
                "row_strides": list(self.row_strides),
                "col_strides": list(self.col_strides)}

    def unfold(self, tensor):
        """Tensor with row axes then column axes -> N x N matrix."""
        n = self.matrix_poly.size
        return np.asarray(tensor).reshape(n, n)

    def fold(self, matrix):
        """Inverse of unfold."""
        return np.asarray(matrix).reshape(self.row_extents + self.col_extents)


def _c_strides(extents):
    strides = []
    acc = 1
    for e in reversed(extents):
        strides.append(acc)
        acc *= e
    return tuple(reversed(strides))


# ----------------------------------------------------------------------
# Degree bounds and sampling grids
# ----------------------------------------------------------------------

def _is_total_degree_one(hv):
    # Affine in the free variables; the hidden axis (last) is excluded
    # because hidden-variable degree never enters the s, t degrees.
    for t in hv.tensors:
        weight = np.indices(t.shape[:-1]).sum(axis=0)
        if np.any(t[weight >= 2] != 0):
            return False
    return True


def default_taus(hv):
    """Worst-case bounds tau_k = k n - 1, collapsed to zero for systems
    affine in the free variables (whose resultant function is constant
    in s and t, by the same cancellation that proves Cramer's rule)."""
    d = hv.dim
    if d < 2:
        raise ValueError("the construction needs d >= 2")
    n = hv.max_degree
    if n < 1:
        raise ValueError("system of constants has no roots to eliminate")
    if _is_total_degree_one(hv):
        return (0,) * (d - 1)
    return tuple(k * n - 1 for k in range(1, d))


def _axis_point_sets(domain, taus):
    """Disjoint per-axis node families for the s and t grids.

    s_k gets tau_k + 1 Chebyshev points of the second kind, t_k gets
    tau_{d-k} + 1 points of the first kind; if the families touch, the
    first-kind angles are rotated until they clear.  Disc domains use
    boundary points with a half-step phase offset instead.
    """
    d = len(taus) + 1
    s_sets, t_sets = [], []
    for k0 in range(d - 1):
        a = taus[k0] + 1
        b = taus[d - 2 - k0] + 1
        if domain.kind == "interval":
            c = 0.5 * (domain.lo + domain.hi)
            h = 0.5 * (domain.hi - domain.lo)
            s = (c + h * np.cos(np.arange(a) * np.pi / (a - 1))
                 if a > 1 else np.array([domain.hi]))
            shift = 0.0
            while True:
                ang = (2 * np.arange(b) + 1) * np.pi / (2 * b) + shift
                t = c + h * np.cos(ang)
                if np.min(np.abs(s[:, None] - t[None, :])) > 1e-8 * max(h, 1):
                    break
                shift += np.pi / (7 * b)  # rotate until families separate
        else:
            cen, rad = domain.center, domain.radius
            s = cen + rad * np.exp(2j * np.pi * np.arange(a) / a)
            t = cen + rad * np.exp(2j * np.pi * (np.arange(b) + 0.5) / b)
            if np.min(np.abs(s[:, None] - t[None, :])) <= 1e-10 * rad:
                t = cen + rad * np.exp(
                    2j * np.pi * (np.arange(b) + 1.0 / 3.0) / b)
        s_sets.append(np.asarray(s, dtype=complex))
        t_sets.append(np.asarray(t, dtype=complex))
    return s_sets, t_sets


# ----------------------------------------------------------------------
# Function evaluation
# ----------------------------------------------------------------------

def _mixed_matrix(hv, s, t, x_d):
    d = hv.dim
    qs = hv.qs_at(x_d)
    M = np.empty((d, d), dtype=complex)
    for r in range(1, d + 1):
        point = np.concatenate([t[:r - 1], s[r - 1:]])
        for c in range(d):
            M[r - 1, c] = mp_eval(qs[c], point)
    return M


def cayley_function_eval(hv, s, t, x_d):
    """The defining determinant quotient at one off-diagonal point.

    Parameters
    ----------
    hv : HiddenVariableForm
    s, t : sequences of length d - 1
        Auxiliary points; s_i must differ from t_i for every i.
    x_d : complex
        Value of the hidden variable.
    """
    d = hv.dim
    if d < 2:
        raise ValueError("the construction needs d >= 2")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    if s.shape != (d - 1,) or t.shape != (d - 1,):
        raise ValueError(f"s and t must have length {d - 1}")
    if np.any(s == t):
        raise ValueError("s_i = t_i hit the removable singularity; use "
                         "cayley_diagonal_value for on-diagonal points")
    M = _mixed_matrix(hv, s, t, complex(x_d))
    return complex(np.linalg.det(M) / np.prod(s - t))


def _grid_values(hv, s_sets, t_sets, x_d):
    """Function values on the full tensor grid (s axes, then t axes)."""
    d = hv.dim
    nfree = d - 1
    qs = hv.qs_at(x_d)
    full_extents = tuple(len(s) for s in s_sets) + \
        tuple(len(t) for t in t_sets)
    Mg = np.empty(full_extents + (d, d), dtype=complex)
    for r in range(1, d + 1):
        # variable m (0-based) reads t-nodes when m <= r - 2, else s-nodes
        sets = [t_sets[m] if m <= r - 2 else s_sets[m] for m in range(nfree)]
        target = [nfree + m if m <= r - 2 else m for m in range(nfree)]
        order = np.argsort(target)
        full_shape = [1] * (2 * nfree)
        for m in range(nfree):
            full_shape[target[m]] = len(sets[m])
        for c in range(d):
            vals = mp_eval_grid(qs[c], sets)
            Mg[..., r - 1, c] = np.transpose(vals, order).reshape(full_shape)
    F = np.linalg.det(Mg)
    for k0 in range(nfree):
        sshape = [1] * (2 * nfree)
        sshape[k0] = len(s_sets[k0])
        tshape = [1] * (2 * nfree)
        tshape[nfree + k0] = len(t_sets[k0])
        F = F / (s_sets[k0].reshape(sshape) - t_sets[k0].reshape(tshape))
    return F


# ----------------------------------------------------------------------
# Coefficient tensor and resultant matrix
# ----------------------------------------------------------------------

def cayley_coeffs(hv, x_d, taus=None):
    """Tensor-product coefficients of the function at hidden value x_d."""
    d = hv.dim
    if taus is None:
        taus = default_taus(hv)
    taus = tuple(int(t) for t in taus)
    if len(taus) != d - 1 or any(t < 0 for t in taus):
        raise ValueError(f"need {d - 1} nonnegative degree bounds")
    s_sets, t_sets = _axis_point_sets(hv.domain, taus)
    values = _grid_values(hv, s_sets, t_sets, complex(x_d))
    coeffs = interpolate_on_nodes(hv.basis, s_sets + t_sets, values)
    return CayleyTensor(basis=hv.basis, d=d, taus=taus, coeffs=coeffs)


def cayley_resultant(hv, taus=None):
    """Matrix polynomial in the hidden variable from entrywise interpolation.

    The coefficient tensor is sampled at d n + 1 domain nodes of the
    hidden variable, each sample is flattened row-group/column-group in
    C order, and every matrix entry is interpolated in the basis.
    """
    d = hv.dim
    if taus is None:
        taus = default_taus(hv)
    taus = tuple(int(t) for t in taus)
    n = max(hv.max_degree, 1)
    hidden_degree = d * n
    nodes = hv.domain.nodes(hidden_degree + 1)
    size = int(np.prod([t + 1 for t in taus]))
    samples = np.empty((len(nodes), size, size), dtype=complex)
    for i, z in enumerate(nodes):
        samples[i] = cayley_coeffs(hv, z, taus).coeffs.reshape(size, size)
    vand = basis_eval_all(hv.basis, hidden_degree, nodes).T
    flat = np.linalg.solve(vand, samples.reshape(len(nodes), -1))
    coeffs = flat.reshape(len(nodes), size, size)
    return CayleyResultant(
        matrix_poly=MatrixPolynomial(hv.basis, coeffs), taus=taus)


# ----------------------------------------------------------------------
# Diagonal values and derivatives
# ----------------------------------------------------------------------

def _contract_both_sides(tensor, basis, taus, point):
    d = len(taus) + 1
    col_ext = tuple(t + 1 for t in reversed(taus))
    row_ext = tuple(t + 1 for t in taus)
    t = tensor
    for k0 in range(d - 2, -1, -1):  # column axes, innermost first
        phis = basis_eval_all(basis, col_ext[k0] - 1, point[k0])
        t = t @ phis
    for k0 in range(d - 2, -1, -1):  # then row axes
        phis = basis_eval_all(basis, row_ext[k0] - 1, point[k0])
        t = t @ phis
    return complex(t)


def cayley_diagonal_value(hv, free_point, x_d, taus=None):
    """Function value at s = t = free_point, where the quotient is 0/0.

    Obtained by contracting the coefficient tensor with basis vectors on
    both index groups; no divided limit is ever formed.
    """
    A = cayley_coeffs(hv, x_d, taus)
    free_point = np.atleast_1d(np.asarray(free_point, dtype=complex))
    return _contract_both_sides(A.coeffs, hv.basis, A.taus, free_point)


def cayley_diagonal_derivative(hv, x, taus=None, step=1e-6):
    """d/dx_d of the diagonal value at a root; equals det of the Jacobian.

    Central finite differences in the hidden variable with relative
    step size `step`.
    """
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if x.shape != (hv.dim,):
        raise ValueError(f"point must have length {hv.dim}")
    free = x[list(hv.free_order)]
    z = complex(x[hv.hidden_index])
    h = step * max(1.0, abs(z))
    up = cayley_diagonal_value(hv, free, z + h, taus)
    dn = cayley_diagonal_value(hv, free, z - h, taus)
    return (up - dn) / (2.0 * h)


# ----------------------------------------------------------------------
# Structured eigenvectors
# ----------------------------------------------------------------------

def cayley_root_eigvectors(hv, root, resultant=None, check=True):
    """Right/left eigenvectors of the resultant at a root of the system.

    The right vector flattens the tensor with entries
    prod_k phi_{j_k}(x_k) over the column index group; the left vector
    does the same over the row group.  Both are returned unnormalized.

    Raises StructureError when either residual exceeds 1e-7 times the
    matrix norm, which would mean the construction and the closed-form
    eigenvector disagree.
    """
    if resultant is None:
        resultant = cayley_resultant(hv)
    root = np.atleast_1d(np.asarray(root, dtype=complex))
    if root.shape != (hv.dim,):
        raise ValueError(f"root must have length {hv.dim}")
    free = root[list(hv.free_order)]
    z = complex(root[hv.hidden_index])
    col_vecs = [basis_eval_all(hv.basis, e - 1, free[k0])
                for k0, e in enumerate(resultant.col_extents)]
    row_vecs = [basis_eval_all(hv.basis, e - 1, free[k0])
                for k0, e in enumerate(resultant.row_extents)]
    v = reduce(np.multiply.outer, col_vecs).ravel(order="C")
    w = reduce(np.multiply.outer, row_vecs).ravel(order="C")
    if check:
        R0 = matpoly_eval(resultant.matrix_poly, z)
        # At a multiple root R(z) may vanish entirely, so the scale is
        # floored by the coefficient size of the construction itself.
        scale = max(np.linalg.norm(R0, 2),
                    resultant.matrix_poly.coeff_scale)
        res_r = np.linalg.norm(R0 @ v) / np.linalg.norm(v)
        res_l = np.linalg.norm(R0.T @ w) / np.linalg.norm(w)
        if res_r > 1e-7 * scale or res_l > 1e-7 * scale:
            raise StructureError(
                f"structured eigenvector residuals {res_r:.3e}/{res_l:.3e} "
                f"exceed 1e-7 * ||R|| = {1e-7 * scale:.3e}")
    return v, w


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------

def cayley_resultant_to_json(res):
    obj = matpoly_to_json(res.matrix_poly)
    obj["taus"] = [int(t) for t in res.taus]
    obj["unfolding"] = res.unfolding_map
    return obj
