"""Optional numba acceleration.

Set ``QSHANNON_NO_NUMBA=1`` to force the pure-numpy code paths.
"""

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("QSHANNON_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if NUMBA_DISABLED:
        raise ImportError("disabled by QSHANNON_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def _apply_local_numpy(rho, ops, targets, n_qubits):
    """Apply sum_k K rho K^dagger with each K acting on ``targets``."""
    k = len(targets)
    shape = (2,) * (2 * n_qubits)
    t = rho.reshape(shape)
    out = np.zeros_like(t)
    rows = list(targets)
    cols = [n_qubits + q for q in targets]
    for op in ops:
        g = op.reshape((2,) * (2 * k))
        # left multiply on row indices
        tmp = np.tensordot(g, t, axes=(list(range(k, 2 * k)), rows))
        tmp = np.moveaxis(tmp, list(range(k)), rows)
        # right multiply by K^dagger on column indices
        tmp = np.tensordot(tmp, g.conj(), axes=(cols, list(range(k, 2 * k))))
        tmp = np.moveaxis(tmp, list(range(2 * n_qubits - k, 2 * n_qubits)), cols)
        out += tmp
    return out.reshape(rho.shape)


@njit(cache=True)
def _apply_1q_kernel(rho, ops, q, n_qubits):
    dim = rho.shape[0]
    out = np.zeros_like(rho)
    shift = n_qubits - 1 - q
    mask = 1 << shift
    for k in range(ops.shape[0]):
        a00 = ops[k, 0, 0]
        a01 = ops[k, 0, 1]
        a10 = ops[k, 1, 0]
        a11 = ops[k, 1, 1]
        for i in range(dim):
            if i & mask:
                continue
            i1 = i | mask
            for j in range(dim):
                if j & mask:
                    continue
                j1 = j | mask
                r00 = rho[i, j]
                r01 = rho[i, j1]
                r10 = rho[i1, j]
                r11 = rho[i1, j1]
                # t = K rho
                t00 = a00 * r00 + a01 * r10
                t01 = a00 * r01 + a01 * r11
                t10 = a10 * r00 + a11 * r10
                t11 = a10 * r01 + a11 * r11
                # out += t K^dagger
                c00 = np.conj(a00)
                c01 = np.conj(a01)
                c10 = np.conj(a10)
                c11 = np.conj(a11)
                out[i, j] += t00 * c00 + t01 * c01
                out[i, j1] += t00 * c10 + t01 * c11
                out[i1, j] += t10 * c00 + t11 * c01
                out[i1, j1] += t10 * c10 + t11 * c11
    return out


@njit(cache=True)
def _apply_2q_kernel(rho, ops, q0, q1, n_qubits):
    dim = rho.shape[0]
    out = np.zeros_like(rho)
    m0 = 1 << (n_qubits - 1 - q0)
    m1 = 1 << (n_qubits - 1 - q1)
    tmp = np.zeros((4, 4), dtype=rho.dtype)
    idx_i = np.zeros(4, dtype=np.int64)
    idx_j = np.zeros(4, dtype=np.int64)
    for k in range(ops.shape[0]):
        g = ops[k]
        for i in range(dim):
            if (i & m0) or (i & m1):
                continue
            idx_i[0] = i
            idx_i[1] = i | m1
            idx_i[2] = i | m0
            idx_i[3] = i | m0 | m1
            for j in range(dim):
                if (j & m0) or (j & m1):
                    continue
                idx_j[0] = j
                idx_j[1] = j | m1
                idx_j[2] = j | m0
                idx_j[3] = j | m0 | m1
                for a in range(4):
                    for b in range(4):
                        s = 0j
                        for c in range(4):
                            s += g[a, c] * rho[idx_i[c], idx_j[b]]
                        tmp[a, b] = s
                for a in range(4):
                    for b in range(4):
                        s = 0j
                        for c in range(4):
                            s += tmp[a, c] * np.conj(g[b, c])
                        out[idx_i[a], idx_j[b]] += s
    return out


# used when a call passes backend=None; None means numba when available
DEFAULT_BACKEND = None


def apply_local_kraus(rho, ops, targets, n_qubits, backend=None):
    """Apply a channel given by Kraus ``ops`` on qubits ``targets`` of an n-qubit state.

    ``backend`` is "numba", "numpy" or None (``DEFAULT_BACKEND``).
    """
    if backend is None:
        backend = DEFAULT_BACKEND
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    ops = np.ascontiguousarray(np.asarray(ops, dtype=np.complex128))
    if ops.ndim == 2:
        ops = ops[None]
    use_numba = HAVE_NUMBA if backend is None else backend == "numba"
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable")
    if use_numba and len(targets) == 1:
        return _apply_1q_kernel(rho, ops, int(targets[0]), int(n_qubits))
    if use_numba and len(targets) == 2:
        return _apply_2q_kernel(rho, ops, int(targets[0]), int(targets[1]), int(n_qubits))
    return _apply_local_numpy(rho, ops, tuple(int(q) for q in targets), int(n_qubits))
