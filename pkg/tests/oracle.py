"""Independent dense reference for the joint model."""

import numpy as np
import scipy.sparse as sp


def dense_joint(jp):
    """Covariance ``(I - B)^{-1} D (I - B)^{-T}`` from the stored B and D blocks."""
    N = jp.n * jp.p
    B = np.zeros((N, N))
    D = np.zeros((N, N))
    for (t, r), b in jp.b_blocks.items():
        B[jp.layout[r], jp.layout[t]] = b.toarray() if sp.issparse(b) else b
    for r, d in jp.d_blocks.items():
        D[jp.layout[r], jp.layout[r]] = d.toarray() if sp.issparse(d) else d
    L = np.linalg.inv(np.eye(N) - B)
    return L @ D @ L.T
