"""Assembly kernels for the regularized p-Laplacian weak form.

Internal machinery shared by the eigensolver and the BVP solver.  The gradient
term uses the smoothed kernel (|z|^2 + eps_g^2)^{(p-2)/2}, whose linearization
per cell is

    A(z) = (|z|^2 + eps^2)^{(p-2)/2} * (I + (p-2) z (x) z / (|z|^2 + eps^2)),

a symmetric positive definite matrix for p > 1.  Zeroth-order odd powers
|s|^{r-2} s are smoothed as (s^2 + eps_s^2)^{(r-2)/2} s, which for q < 2
removes the unbounded derivative at s = 0.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SingularJacobian

__all__ = [
    "smoothed_odd_power",
    "smoothed_odd_power_deriv",
    "odd_power",
    "p_flux",
    "p_flux_jacobian",
    "restrict",
    "solve_sparse",
]


def odd_power(s, r):
    """|s|^{r-2} s with the value 0 at s = 0 (valid for r > 1)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    nz = s != 0
    out[nz] = np.abs(s[nz]) ** (r - 1) * np.sign(s[nz])
    return out


def smoothed_odd_power(s, r, eps):
    """(s^2 + eps^2)^{(r-2)/2} s; equals |s|^{r-2} s when eps = 0."""
    if eps == 0.0:
        return odd_power(s, r)
    s = np.asarray(s, dtype=float)
    return (s * s + eps * eps) ** (0.5 * (r - 2)) * s


def smoothed_odd_power_deriv(s, r, eps):
    """d/ds of smoothed_odd_power: (s^2+eps^2)^{(r-4)/2} ((r-1) s^2 + eps^2)."""
    s = np.asarray(s, dtype=float)
    if eps == 0.0:
        return (r - 1) * np.abs(s) ** (r - 2)
    t = s * s + eps * eps
    return t ** (0.5 * (r - 4)) * ((r - 1) * s * s + eps * eps)


def _grad_and_kernel(mesh, values, p, eps):
    g = np.einsum("ci,cid->cd", values[mesh.cells], mesh.cell_gradients)
    g2 = np.einsum("cd,cd->c", g, g) + eps * eps
    kappa = g2 ** (0.5 * (p - 2))
    return g, g2, kappa


def p_flux(mesh, values, p, eps=0.0):
    """Vector with entries sum_T vol_T kappa(grad u) grad u . grad hat_i, all vertices.

    With eps = 0 this is the exact discrete p-Laplacian pairing; the i-th entry
    is the gradient part of the weak residual at vertex i.
    """
    if eps == 0.0 and p < 2:
        # |z|^{p-2} z is continuous with value 0 at z = 0; force that limit.
        g = np.einsum("ci,cid->cd", values[mesh.cells], mesh.cell_gradients)
        g2 = np.einsum("cd,cd->c", g, g)
        kappa = np.zeros_like(g2)
        nz = g2 > 0
        kappa[nz] = g2[nz] ** (0.5 * (p - 2))
    else:
        _, g2, kappa = _grad_and_kernel(mesh, values, p, eps)
        g = np.einsum("ci,cid->cd", values[mesh.cells], mesh.cell_gradients)
    flux = np.einsum("c,cd,cid->ci", mesh.cell_volumes * kappa, g, mesh.cell_gradients)
    out = np.zeros(mesh.n_vertices)
    np.add.at(out, mesh.cells.ravel(), flux.ravel())
    return out


def p_flux_jacobian(mesh, values, p, eps):
    """Sparse symmetric matrix of the linearized gradient term over all vertices."""
    g, g2, kappa = _grad_and_kernel(mesh, values, p, eps)
    d = mesh.dimension
    eye = np.eye(d)
    # A_c = kappa_c * (I + (p-2) g g^T / g2); the anisotropic part vanishes for
    # p = 2 and needs eps > 0 otherwise (g2 = 0 is degenerate for p > 2 and
    # singular for p < 2).
    A = kappa[:, None, None] * eye[None, :, :]
    if p != 2.0:
        ratio = np.where(g2 > 0, (p - 2.0) * kappa / np.where(g2 > 0, g2, 1.0), 0.0)
        A = A + ratio[:, None, None] * np.einsum("cd,ce->cde", g, g)
    blocks = np.einsum("c,cid,cde,cje->cij", mesh.cell_volumes, mesh.cell_gradients, A, mesh.cell_gradients)
    nloc = d + 1
    rows = np.repeat(mesh.cells, nloc, axis=1).ravel()
    cols = np.tile(mesh.cells, (1, nloc)).ravel()
    mat = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(mesh.n_vertices, mesh.n_vertices))
    mat = mat.tocsr()
    # the operator is a variational Hessian; make symmetry exact
    return (mat + mat.T) * 0.5


def restrict(matrix, free):
    """Submatrix on the free degrees of freedom."""
    return matrix[np.ix_(free, free)].tocsc() if sp.issparse(matrix) else matrix[np.ix_(free, free)]


def solve_sparse(matrix, rhs):
    """Direct sparse solve; raises SingularJacobian when factorization fails."""
    try:
        sol = spla.spsolve(matrix.tocsc() if not sp.isspmatrix_csc(matrix) else matrix, rhs)
    except RuntimeError as exc:  # umfpack/superlu signal singularity this way
        raise SingularJacobian(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularJacobian("factorization produced non-finite values")
    return sol
