"""Degree-graded polynomial bases and Clenshaw-style evaluation.

A degree-graded basis is a family phi_0, phi_1, ... with deg phi_k = k
exactly, generated by the recurrence

    phi_0(x) = 1
    phi_{k+1}(x) = (alpha_k x + beta_k) phi_k(x)
                   + sum_{j=1}^{k} gamma_{k,j} phi_{j-1}(x),

where every alpha_k is nonzero.  Monomials, Chebyshev polynomials and
Legendre polynomials are built in; custom bases supply explicit
coefficient tables.  All built-in families have sup-norm 1 on [-1, 1].

Polynomials p(x) = sum_k a_k phi_k(x) are evaluated by running the
recurrence backwards (a generalized Clenshaw scheme).  The backward
shifts b_k[p](x) produced along the way are kept on the returned trace
because they also encode divided differences, derivatives and the left
eigenvector structure of resultant matrices built downstream.
"""

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Domain",
    "DegreeGradedBasis",
    "ClenshawTrace",
    "DegreeOverflowError",
    "NormalizationWarning",
    "basis_eval",
    "basis_eval_all",
    "clenshaw_eval",
    "clenshaw_shifts",
    "divided_difference",
    "derivative_eval",
    "basis_to_json",
    "basis_from_json",
]

_BUILTIN_NAMES = ("monomial", "chebyshev", "legendre")


class DegreeOverflowError(ValueError):
    """Recurrence tables are too short for the requested degree."""


class NormalizationWarning(UserWarning):
    """Basis functions deviate noticeably from unit sup norm on the domain."""


# ----------------------------------------------------------------------
# Evaluation region
# ----------------------------------------------------------------------

class Domain:
    """Region the basis lives on: a real interval or a complex disc."""

    __slots__ = ("kind", "lo", "hi", "center", "radius")

    def __init__(self, kind, lo=None, hi=None, center=None, radius=None):
        if kind == "interval":
            lo, hi = float(lo), float(hi)
            if not lo < hi:
                raise ValueError("interval needs lo < hi")
            self.lo, self.hi = lo, hi
            self.center, self.radius = None, None
        elif kind == "disc":
            self.center, self.radius = complex(center), float(radius)
            if self.radius <= 0:
                raise ValueError("disc needs a positive radius")
            self.lo, self.hi = None, None
        else:
            raise ValueError("domain kind must be 'interval' or 'disc'")
        self.kind = kind

    @classmethod
    def interval(cls, lo, hi):
        return cls("interval", lo=lo, hi=hi)

    @classmethod
    def disc(cls, center, radius):
        return cls("disc", center=center, radius=radius)

    def contains(self, z, margin=0.0):
        """Whether z lies in the region, inflated by margin."""
        z = complex(z)
        if self.kind == "interval":
            return (abs(z.imag) <= margin
                    and self.lo - margin <= z.real <= self.hi + margin)
        return abs(z - self.center) <= self.radius + margin

    def nodes(self, m):
        """m distinct interpolation nodes.

        Chebyshev points of the second kind mapped to the interval, or
        equispaced points on the boundary circle for disc regions.
        """
        if m < 1:
            raise ValueError("need at least one node")
        if self.kind == "interval":
            c = 0.5 * (self.lo + self.hi)
            h = 0.5 * (self.hi - self.lo)
            if m == 1:
                return np.array([c])
            return c + h * np.cos(np.arange(m) * np.pi / (m - 1))
        ang = 2.0j * np.pi * np.arange(m) / m
        return self.center + self.radius * np.exp(ang)

    def sample_grid(self, m):
        """Dense sample set used for sup-norm checks.

        For a disc the boundary circle suffices: |phi_k| attains its
        maximum over the closed disc on the boundary.
        """
        if self.kind == "interval":
            return np.linspace(self.lo, self.hi, m)
        ang = 2.0j * np.pi * np.arange(m) / m
        return self.center + self.radius * np.exp(ang)

    def __eq__(self, other):
        if not isinstance(other, Domain) or self.kind != other.kind:
            return NotImplemented if not isinstance(other, Domain) else False
        if self.kind == "interval":
            return self.lo == other.lo and self.hi == other.hi
        return self.center == other.center and self.radius == other.radius

    def __repr__(self):
        if self.kind == "interval":
            return f"Domain.interval({self.lo}, {self.hi})"
        return f"Domain.disc({self.center}, {self.radius})"

    def to_json(self):
        if self.kind == "interval":
            return {"interval": [self.lo, self.hi]}
        return {"disc": {"center": [self.center.real, self.center.imag],
                         "radius": self.radius}}

    @classmethod
    def from_json(cls, obj):
        if "interval" in obj:
            lo, hi = obj["interval"]
            return cls.interval(lo, hi)
        if "disc" in obj:
            c = obj["disc"]["center"]
            return cls.disc(complex(c[0], c[1]), obj["disc"]["radius"])
        raise ValueError("domain JSON needs an 'interval' or 'disc' key")


# ----------------------------------------------------------------------
# Basis definition
# ----------------------------------------------------------------------

class DegreeGradedBasis:
    """Recurrence data (alpha_k, beta_k, gamma_{k,j}) plus a domain.

    Built-in names generate their coefficients on demand and support
    any degree.  A custom basis carries finite tables: ``alpha`` and
    ``beta`` as flat sequences, ``gamma`` as ragged rows where row k-1
    holds (gamma_{k,1}, ..., gamma_{k,k}).  Tables long enough for
    degree m must have len(alpha) >= m, len(beta) >= m and m-1 gamma
    rows.
    """

    def __init__(self, name, alpha=None, beta=None, gamma=None, domain=None,
                 check_normalization=True):
        if domain is None:
            domain = Domain.interval(-1.0, 1.0)
        self.name = str(name)
        self.domain = domain
        if self.name in _BUILTIN_NAMES:
            if alpha is not None or beta is not None or gamma is not None:
                raise ValueError("built-in bases take no recurrence tables")
            self._alpha = self._beta = None
            self._gamma = None
            self._banded = True
        elif self.name == "custom":
            if alpha is None or beta is None or gamma is None:
                raise ValueError("custom basis needs alpha, beta and gamma")
            self._alpha = np.atleast_1d(np.asarray(alpha))
            self._beta = np.atleast_1d(np.asarray(beta))
            if np.any(self._alpha == 0):
                raise ValueError("alpha entries must be nonzero")
            if len(self._beta) != len(self._alpha):
                raise ValueError("alpha and beta must have equal length")
            rows = []
            for k, row in enumerate(gamma, start=1):
                row = np.atleast_1d(np.asarray(row))
                if len(row) != k:
                    raise ValueError(f"gamma row {k} must hold {k} entries")
                rows.append(row)
            self._gamma = tuple(rows)
            if len(self._gamma) < len(self._alpha) - 1:
                raise ValueError("gamma needs len(alpha) - 1 rows")
            self._banded = all(not np.any(row[:-1]) for row in self._gamma)
            if check_normalization:
                self._warn_if_unnormalized()
        else:
            raise ValueError(f"unknown basis name {name!r}")

    # -- constructors ---------------------------------------------------

    @classmethod
    def monomial(cls, domain=None):
        return cls("monomial", domain=domain)

    @classmethod
    def chebyshev(cls, domain=None):
        return cls("chebyshev", domain=domain)

    @classmethod
    def legendre(cls, domain=None):
        return cls("legendre", domain=domain)

    @classmethod
    def custom(cls, alpha, beta, gamma, domain=None, check_normalization=True):
        return cls("custom", alpha=alpha, beta=beta, gamma=gamma,
                   domain=domain, check_normalization=check_normalization)

    # -- recurrence coefficients ---------------------------------------

    def alpha(self, k):
        if self.name == "monomial":
            return 1.0
        if self.name == "chebyshev":
            return 1.0 if k == 0 else 2.0
        if self.name == "legendre":
            return (2.0 * k + 1.0) / (k + 1.0)
        if k >= len(self._alpha):
            raise DegreeOverflowError(
                f"alpha table ends at k={len(self._alpha) - 1}, need k={k}")
        return self._alpha[k]

    def beta(self, k):
        if self.name in _BUILTIN_NAMES:
            return 0.0
        if k >= len(self._beta):
            raise DegreeOverflowError(
                f"beta table ends at k={len(self._beta) - 1}, need k={k}")
        return self._beta[k]

    def gamma(self, k, j):
        """gamma_{k,j} for 1 <= j <= k."""
        if not 1 <= j <= k:
            raise ValueError("gamma is defined for 1 <= j <= k")
        if self.name == "monomial":
            return 0.0
        if self.name == "chebyshev":
            return -1.0 if j == k else 0.0
        if self.name == "legendre":
            return -k / (k + 1.0) if j == k else 0.0
        if k > len(self._gamma):
            raise DegreeOverflowError(
                f"gamma table ends at row {len(self._gamma)}, need row {k}")
        return self._gamma[k - 1][j - 1]

    def alphas(self, kmax):
        return np.array([self.alpha(k) for k in range(kmax + 1)])

    def betas(self, kmax):
        return np.array([self.beta(k) for k in range(kmax + 1)])

    def gamma_band(self, kmax):
        """Diagonal band gamma_{k,k} for k = 0..kmax (slot 0 is unused)."""
        out = np.zeros(kmax + 1, dtype=complex)
        for k in range(1, kmax + 1):
            out[k] = self.gamma(k, k)
        return out

    def gamma_table(self, kmax):
        """Dense table with [k, j] = gamma_{k,j}, zero off the triangle."""
        out = np.zeros((kmax + 1, kmax + 1), dtype=complex)
        for k in range(1, kmax + 1):
            for j in range(1, k + 1):
                out[k, j] = self.gamma(k, j)
        return out

    # -- capabilities ---------------------------------------------------

    @property
    def is_banded(self):
        """True when gamma_{k,j} = 0 for every j < k (three-term case)."""
        return self._banded

    def max_degree(self):
        """Largest representable degree, or None when unlimited."""
        if self.name in _BUILTIN_NAMES:
            return None
        return min(len(self._alpha), len(self._gamma) + 1)

    def supports_degree(self, m):
        mx = self.max_degree()
        return mx is None or m <= mx

    def require_degree(self, m):
        if not self.supports_degree(m):
            raise DegreeOverflowError(
                f"basis tables support degree {self.max_degree()}, need {m}")

    # -- misc -----------------------------------------------------------

    def _warn_if_unnormalized(self):
        kmax = min(self.max_degree(), 30)
        grid = self.domain.sample_grid(1537)
        sup = np.max(np.abs(basis_eval_all(self, kmax, grid)), axis=-1)
        worst = float(np.max(np.abs(sup - 1.0)))
        if worst > 1e-6:
            warnings.warn(
                "custom basis deviates from unit sup norm on its domain "
                f"(worst deviation {worst:.3e}); conditioning estimates "
                "assume normalized bases", NormalizationWarning, stacklevel=3)

    def __eq__(self, other):
        if not isinstance(other, DegreeGradedBasis):
            return NotImplemented
        if self.name != other.name or self.domain != other.domain:
            return False
        if self.name != "custom":
            return True
        return (np.array_equal(self._alpha, other._alpha)
                and np.array_equal(self._beta, other._beta)
                and len(self._gamma) == len(other._gamma)
                and all(np.array_equal(a, b)
                        for a, b in zip(self._gamma, other._gamma)))

    def __repr__(self):
        return f"DegreeGradedBasis({self.name!r}, domain={self.domain!r})"


# ----------------------------------------------------------------------
# Forward evaluation
# ----------------------------------------------------------------------

def basis_eval_all(basis, kmax, x):
    """Evaluate phi_0(x), ..., phi_kmax(x) by the forward recurrence.

    Parameters
    ----------
    basis : DegreeGradedBasis
    kmax : int
        Highest degree to produce.
    x : scalar or ndarray
        Evaluation points.

    Returns
    -------
    ndarray with shape (kmax + 1,) + shape(x), complex.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    basis.require_degree(kmax)
    x = np.asarray(x, dtype=complex)
    out = np.empty((kmax + 1,) + x.shape, dtype=complex)
    out[0] = 1.0
    for k in range(kmax):
        acc = (basis.alpha(k) * x + basis.beta(k)) * out[k]
        for j in range(1, k + 1):
            g = basis.gamma(k, j)
            if g != 0:
                acc = acc + g * out[j - 1]
        out[k + 1] = acc
    return out


def basis_eval(basis, k, x):
    """phi_k(x) for a single point x."""
    return complex(basis_eval_all(basis, k, complex(x))[k])


# ----------------------------------------------------------------------
# Backward (Clenshaw) evaluation
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ClenshawTrace:
    """Backward-recurrence record: shifts b_{n+1}[p](x), ..., b_1[p](x)
    in that order, plus the reconstructed value p(x)."""

    shifts: np.ndarray
    value: complex

    def shift(self, k):
        """b_k[p](x) for 1 <= k <= n + 1."""
        n = len(self.shifts) - 1
        if not 1 <= k <= n + 1:
            raise ValueError(f"shift index must lie in 1..{n + 1}")
        return complex(self.shifts[n + 1 - k])

    @property
    def ascending(self):
        """Shifts reordered as b_1, ..., b_{n+1}."""
        return self.shifts[::-1]


def _shift_table(basis, coeffs, x, force_full=False):
    """Backward shifts for coefficient array of shape (n+1, ...).

    Returns b with shape (n+2, ...) where b[k] = b_k[p](x) for
    k = 1..n+1 (slot 0 stays zero).  The scalar x broadcasts over any
    trailing coefficient axes, which lets matrix-valued coefficient
    stacks share this code path.
    """
    n = coeffs.shape[0] - 1
    basis.require_degree(n)
    b = np.zeros((n + 2,) + coeffs.shape[1:], dtype=complex)
    if n >= 1:
        # b_n = a_n because b_{n+1} = 0.
        b[n] = coeffs[n]
    if basis.is_banded and not force_full:
        band = basis.gamma_band(n - 1) if n >= 2 else None
        for k in range(n - 1, 0, -1):
            t = coeffs[k] + (basis.alpha(k) * x + basis.beta(k)) * b[k + 1]
            if k + 1 <= n - 1 and band[k + 1] != 0:
                t = t + band[k + 1] * b[k + 2]
            b[k] = t
    else:
        table = basis.gamma_table(n - 1) if n >= 2 else None
        for k in range(n - 1, 0, -1):
            t = coeffs[k] + (basis.alpha(k) * x + basis.beta(k)) * b[k + 1]
            for j in range(k + 1, n):
                g = table[j, k + 1]
                if g != 0:
                    t = t + g * b[j + 1]
            b[k] = t
    return b


def _reconstruct(basis, coeffs, x, b):
    """p(x) = a_0 phi_0 + phi_1(x) b_1 + sum_{j=1}^{n-1} gamma_{j,1} b_{j+1}."""
    n = coeffs.shape[0] - 1
    val = coeffs[0] + 0.0j
    if n >= 1:
        val = val + (basis.alpha(0) * x + basis.beta(0)) * b[1]
    for j in range(1, n):
        g = basis.gamma(j, 1)
        if g != 0:
            val = val + g * b[j + 1]
    return val


def clenshaw_shifts(basis, coeffs, x, force_full=False):
    """Ascending shift array b_1[p](x), ..., b_{n+1}[p](x).

    coeffs may carry trailing axes (e.g. matrix coefficients); x must be
    scalar.  Exposed for resultant eigenvector construction.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[0] == 0:
        raise ValueError("empty coefficient list")
    return _shift_table(basis, coeffs, x, force_full=force_full)[1:]


def clenshaw_eval(basis, coeffs, x, force_full=False):
    """Evaluate p(x) = sum_k a_k phi_k(x) by the backward recurrence.

    Parameters
    ----------
    basis : DegreeGradedBasis
    coeffs : sequence
        Coefficients a_0, ..., a_n; must be nonempty.
    x : complex
    force_full : bool
        Run the dense quadratic-cost recurrence even when the basis has
        three-term (banded) structure.  Testing hook; both code paths
        agree to roundoff.

    Returns
    -------
    ClenshawTrace
        Shifts b_{n+1}, ..., b_1 and the value p(x).

    Notes
    -----
    In the monomial basis the recurrence collapses to Horner's rule and
    the shifts equal Horner's intermediate values exactly.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.shape[0] == 0:
        raise ValueError("coeffs must be a nonempty one-dimensional sequence")
    x = complex(x)
    b = _shift_table(basis, coeffs, x, force_full=force_full)
    value = complex(_reconstruct(basis, coeffs, x, b))
    return ClenshawTrace(shifts=b[1:][::-1].copy(), value=value)


def divided_difference(basis, coeffs, x, y):
    """(p(x) - p(y)) / (x - y), evaluated without cancellation.

    Uses the shift identity
        sum_{i=0}^{n-1} alpha_i b_{i+1}[p](y) phi_i(x),
    which continues analytically to p'(x) at x = y.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.shape[0] == 0:
        raise ValueError("coeffs must be a nonempty one-dimensional sequence")
    n = coeffs.shape[0] - 1
    if n == 0:
        return 0.0j
    b = _shift_table(basis, coeffs, complex(y))
    phis = basis_eval_all(basis, n - 1, complex(x))
    al = basis.alphas(n - 1)
    return complex(np.sum(al * b[1:n + 1] * phis))


def derivative_eval(basis, coeffs, x):
    """p'(x) via the shifts of the backward recurrence at y = x."""
    return divided_difference(basis, coeffs, x, x)


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------

def basis_to_json(basis):
    obj = {"name": basis.name, "domain": basis.domain.to_json()}
    if basis.name == "custom":
        obj["alpha"] = [_num_to_json(a) for a in basis._alpha]
        obj["beta"] = [_num_to_json(b) for b in basis._beta]
        obj["gamma"] = [[_num_to_json(g) for g in row]
                        for row in basis._gamma]
    return obj


def basis_from_json(obj):
    if isinstance(obj, str):
        obj = {"name": obj}
    name = obj.get("name")
    if name is None:
        raise ValueError("basis JSON needs a 'name' field")
    domain = None
    if "domain" in obj:
        domain = Domain.from_json(obj["domain"])
    if name in _BUILTIN_NAMES:
        return DegreeGradedBasis(name, domain=domain)
    if name == "custom":
        alpha = [_num_from_json(a) for a in obj["alpha"]]
        beta = [_num_from_json(b) for b in obj["beta"]]
        gamma = [[_num_from_json(g) for g in row] for row in obj["gamma"]]
        return DegreeGradedBasis("custom", alpha=alpha, beta=beta,
                                 gamma=gamma, domain=domain)
    raise ValueError(f"unknown basis name {name!r}")


def _num_to_json(v):
    v = complex(v)
    if v.imag == 0.0:
        return v.real
    return [v.real, v.imag]


def _num_from_json(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return float(v)
