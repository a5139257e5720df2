"""Cyclic Jacobi eigensolver for small dense Hermitian matrices.

By default the sweeps start from LAPACK's eigenvectors, so they act as a
certifying polish pass; ``warm_start=False`` runs the Jacobi scheme alone.

Each rotation first removes the phase of the pivot element with a diagonal
unitary and then applies the classical real Jacobi rotation, so the whole
update is a 2x2 unitary acting on rows/columns ``p, q``. Sweeps visit pivots
in fixed row-major order, which makes the output a deterministic function of
the input, including the ordering inside degenerate eigenspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NotHermitianError

HERMITIAN_TOL = 1e-12
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending, Kelvin) and eigenvectors (columns) of one Hamiltonian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    def __len__(self):
        return len(self.eigenvalues)


def _offdiag_norm(a):
    n = len(a)
    total = 0.0
    for r in range(n):
        row = a[r]
        for k in range(n):
            if k != r:
                z = row[k]
                total += z.real * z.real + z.imag * z.imag
    return math.sqrt(total)


def diagonalize(h, *, hermitian_tol=HERMITIAN_TOL, tol=OFFDIAG_TOL, max_sweeps=MAX_SWEEPS,
                warm_start=True):
    """Diagonalize a Hermitian matrix.

    Parameters
    ----------
    h : (n, n) array_like
        Hermitian matrix. It is checked against ``hermitian_tol * (1 + ||h||)``
        and symmetrized as ``(h + h^H) / 2`` before solving.
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm, relative to
        ``||h||_F``.
    max_sweeps : int
        Iteration budget; exceeding it raises :class:`ConvergenceError`.
    warm_start : bool
        Start the Jacobi sweeps from LAPACK's eigenvectors (``numpy.linalg.eigh``)
        instead of the identity. The sweeps then only certify and polish, which
        is roughly fifty times faster and leaves the contract unchanged.

    Returns
    -------
    Spectrum
        Eigenvalues sorted ascending (stable sort) and the matching unitary
        eigenvector matrix.
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitianError("matrix has non-finite entries")
    norm = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > hermitian_tol * (1.0 + norm):
        raise NotHermitianError(
            f"matrix is not Hermitian: ||H - H^H|| = {asym:.3e} (norm {norm:.3e})"
        )
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    if warm_start:
        try:
            _, q0 = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"LAPACK eigh failed: {exc}") from None
        a = q0.conj().T @ a @ q0
        a = 0.5 * (a + a.conj().T)
    else:
        q0 = np.eye(n, dtype=complex)
    # plain complex lists: for 8x8 this beats numpy's per-call overhead several times over
    a = a.tolist()
    v = q0.tolist()
    threshold = tol * norm
    # entries this small cannot lift the off-diagonal norm above threshold
    skip = threshold / n

    sweeps = 0
    while _offdiag_norm(a) > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_offdiag_norm(a):.3e}, target {threshold:.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q, skip)

    evals = np.array([a[k][k].real for k in range(n)])
    order = np.argsort(evals, kind="stable")
    return Spectrum(evals[order], np.array(v, dtype=complex)[:, order], sweeps)


def _rotate(a, v, p, q, skip):
    apq = a[p][q]
    mag = abs(apq)
    if mag <= skip:
        return
    app = a[p][p].real
    aqq = a[q][q].real
    theta = (aqq - app) / (2.0 * mag)
    t = (1.0 if theta >= 0.0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # rotation G = diag(1, e^{-i phi}) @ [[c, s], [-s, c]], applied as G^H A G
    phase = apq.conjugate() / mag
    sp = s * phase
    cp = c * phase
    for row in a:
        x, y = row[p], row[q]
        row[p] = c * x - sp * y
        row[q] = s * x + cp * y
    sp_c = sp.conjugate()
    cp_c = cp.conjugate()
    row_p, row_q = a[p], a[q]
    for k in range(len(row_p)):
        x, y = row_p[k], row_q[k]
        row_p[k] = c * x - sp_c * y
        row_q[k] = s * x + cp_c * y
    row_p[q] = row_q[p] = 0j
    row_p[p] = complex(app - t * mag)
    row_q[q] = complex(aqq + t * mag)
    for row in v:
        x, y = row[p], row[q]
        row[p] = c * x - sp * y
        row[q] = s * x + cp * y
