"""Reference steady-state chain solver (pure numpy/scipy).

The compiled extension in ``_kernel.pyx`` implements the same routine;
``solver`` picks whichever is available.  Keep the two in sync: the
parity test compares them element by element.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

NAME = "python"


def solve_chain(
    m: np.ndarray,
    source: np.ndarray,
    k_ann: np.ndarray,
    k_cre: np.ndarray,
    n_max: int,
    xi: complex,
) -> np.ndarray:
    """Solve M u_{p,q} = -(rhs) for every cluster in level order.

    rhs collects the identity source (diagonal clusters only) and the
    drive coupling to the two lower neighbors:

        rhs = delta_{p,q} S + sqrt(q) xi K_ann u_{p,q-1}
                            + sqrt(p) conj(xi) K_cre u_{p-1,q}

    Neighbors outside the |p - q| <= 2 band are structurally zero and
    skipped.  Returns a dense (n_max+1, n_max+1, 18) array with zeros
    off the band.
    """
    lu = lu_factor(m)
    nd = n_max + 1
    u = np.zeros((nd, nd, 18), dtype=complex)
    xic = np.conj(xi)
    for s in range(2 * n_max + 1):
        for p in range(max(0, s - n_max), min(n_max, s) + 1):
            q = s - p
            if abs(p - q) > 2:
                continue
            rhs = source.copy() if p == q else np.zeros(18, dtype=complex)
            if q >= 1 and abs(p - (q - 1)) <= 2:
                rhs += np.sqrt(q) * xi * (k_ann @ u[p, q - 1])
            if p >= 1 and abs((p - 1) - q) <= 2:
                rhs += np.sqrt(p) * xic * (k_cre @ u[p - 1, q])
            u[p, q] = lu_solve(lu, -rhs)
    return u
