"""
Pfaffians of dense antisymmetric matrices

Skew-symmetric Gauss elimination with partial pivoting (Parlett-Reid style).
Results come back as (sign, log|Pf|) so that long Majorana strings do not
under- or overflow.
"""

import math
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidParameterError

Sign = Union[float, complex]
PfaffianResult = Tuple[Sign, float]

SKEW_TOL = 1e-12


def _validated(M) -> np.ndarray:
    A = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidParameterError(f"Pfaffian needs a square matrix, got shape {A.shape}")
    if A.shape[0] % 2:
        raise InvalidParameterError(f"Pfaffian of odd dimension {A.shape[0]} is undefined")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale > 0.0 and np.max(np.abs(A + A.T)) > SKEW_TOL * scale:
        raise InvalidParameterError("Matrix is not antisymmetric within tolerance")
    dtype = np.complex128 if np.iscomplexobj(A) else np.float64
    return np.array(A, dtype=dtype, copy=True)


def pfaffian(M) -> PfaffianResult:
    """Return (sign, log_magnitude) with sign * exp(log_magnitude) = Pf(M)"""
    A = _validated(M)
    n = A.shape[0]
    complex_input = np.iscomplexobj(A)
    sign: Sign = 1.0 + 0.0j if complex_input else 1.0
    log_magnitude = 0.0

    for k in range(0, n - 1, 2):
        # largest entry below the diagonal of column k
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if kp != k + 1:
            A[[k + 1, kp], k:] = A[[kp, k + 1], k:]
            A[k:, [k + 1, kp]] = A[k:, [kp, k + 1]]
            sign = -sign

        pivot = A[k, k + 1]
        if pivot == 0:
            return (0.0 + 0.0j if complex_input else 0.0), -math.inf

        magnitude = abs(pivot)
        sign = sign * (pivot / magnitude)
        log_magnitude += math.log(magnitude)

        if k + 2 < n:
            tau = A[k, k + 2:] / pivot
            column = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, column) - np.outer(column, tau)

    if not complex_input:
        sign = float(np.sign(sign))
    return sign, log_magnitude


def pfaffian_value(M) -> Sign:
    """Pf(M) as a plain number"""
    sign, log_magnitude = pfaffian(M)
    if log_magnitude == -math.inf:
        return sign
    return sign * math.exp(log_magnitude)


def pfaffian_batch(matrices: Sequence) -> List[PfaffianResult]:
    return [pfaffian(M) for M in matrices]
