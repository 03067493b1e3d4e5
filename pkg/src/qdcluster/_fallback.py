"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Basis index bit p holds qubit p (1 = |S>, 0 = |T>).
"""
import numpy as np


def diagonal_phases(theta):
    """phase[z] = sum_{p<q} theta[p, q] z_p z_q for every basis index z."""
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    n = theta.shape[0]
    phases = np.zeros(1)
    for q in range(n):
        # linear field from the already-placed qubits p < q
        field = np.zeros(1)
        for p in range(q):
            field = np.concatenate([field, field + theta[p, q]])
        phases = np.concatenate([phases, phases + field])
    return phases


def apply_diagonal(amplitudes, theta):
    """Multiply amplitudes in place by exp(i phase[z])."""
    amplitudes *= np.exp(1j * diagonal_phases(theta))
    return amplitudes
