"""Pure-Python twin of the compiled elimination kernel.

Same contract as quivertilt._fpkernel, with numpy row operations instead of
C loops.  Used when the extension was not built, or when forced via the
QUIVERTILT_PURE_KERNEL environment variable.
"""

import numpy as np

KERNEL_NAME = "python"


def rref_mod(a, p):
    """Reduce ``a`` in place to reduced row echelon form over F_p.

    Entries must already lie in [0, p).  Returns the list of pivot columns.
    """
    rows, cols = a.shape
    pivots = []
    r = 0
    for j in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, j])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        pv = int(a[r, j])
        if pv != 1:
            a[r] = (a[r] * pow(pv, p - 2, p)) % p
        col = a[:, j].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(j)
        r += 1
    return pivots
