"""
Majorana contractions and spin correlators of the chain ground state

A_j = c_j^dag + c_j and B_j = c_j^dag - c_j, so {A_i, A_j} = 2 delta_ij and
{B_i, B_j} = -2 delta_ij. Spin strings become Majorana strings via

    X_i X_j =       < B_i (A_l B_l)... A_j >
    Y_i Y_j =     - < A_i (A_l B_l)... B_j >
    X_i Y_j =   i   < B_i (A_l B_l)... B_j >
    Y_i X_j =   i   < A_i (A_l B_l)... A_j >

with l running over the sites strictly between i and j.
"""

import warnings
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import toeplitz

from .errors import InvalidParameterError
from .model import ModelParams, _pairing, fermi_sea, require_even_chain
from .pfaffian import pfaffian_value

Majorana = Tuple[str, int]

COMPONENTS = ("xx", "yy", "zz", "xy", "yx")
STRING_COEFFICIENTS = {"xx": 1.0, "yy": -1.0, "xy": 1j, "yx": 1j}
IMAG_TOL = 1e-10


@dataclass(eq=False)
class ContractionSet:
    """Ground-state contractions over the site window [0, r_max]"""

    r_max: int
    S_AA: np.ndarray
    S_BB: np.ndarray
    S_BA: np.ndarray
    N: int
    sector: str

    def contraction(self, left: Majorana, right: Majorana) -> complex:
        """<left right> for two Majorana operators"""
        (kind_l, p), (kind_r, q) = left, right
        if kind_l == "A" and kind_r == "A":
            return self.S_AA[p, q]
        if kind_l == "B" and kind_r == "B":
            return self.S_BB[p, q]
        if kind_l == "B":
            return self.S_BA[p, q]
        # A and B always anticommute
        return -self.S_BA[q, p]


@dataclass(frozen=True)
class CorrelatorResult:
    label: str
    r: int
    value: float


def _mode_occupations(params: ModelParams):
    """n_k = <c_k^dag c_k> and F_k = <c_{-k} c_k> of the selected ground state"""
    sea = fermi_sea(params)
    grid = sea.grid
    k = grid.k_values
    xi = np.cos(k) - params.h
    B = _pairing(params, k)
    omega = np.sqrt(xi ** 2 + np.abs(B) ** 2)
    safe = np.where(omega > 0.0, omega, 1.0)
    n_even = np.where(omega > 0.0, 0.5 * (1.0 - xi / safe), 0.5)
    F_even = np.where(omega > 0.0, -B / (2.0 * safe), 0.0)

    partner = grid.partner_index()
    filled = sea.filled
    # one quasiparticle in the (k, -k) pair: n_k = 1, n_-k = 0, no pairing amplitude
    single = filled | filled[partner] | grid.unpaired_mask()
    n_k = np.where(single, filled.astype(float), n_even)
    F_k = np.where(single, 0.0, F_even)
    return k, n_k, F_k, grid.sector


def contractions(params: ModelParams, r_max: int) -> ContractionSet:
    """Momentum sums for <A_pA_q>, <B_pB_q>, <B_pA_q> with 0 <= p, q <= r_max"""
    require_even_chain(params.N)
    if r_max < 1 or r_max + 1 > params.N:
        raise InvalidParameterError(
            f"r_max must satisfy 1 <= r_max <= N-1, got {r_max} for N={params.N}"
        )
    k, n_k, F_k, sector = _mode_occupations(params)
    d = np.arange(-r_max, r_max + 1)
    phase = np.exp(1j * np.outer(d, k))
    # P(d) = <c_p^dag c_q>, Q(d) = <c_p c_q> with d = p - q
    P = phase @ n_k / params.N
    Q = -(phase.conj() @ F_k) / params.N

    p = np.arange(r_max + 1)
    offset = p[:, None] - p[None, :] + r_max
    eye = np.eye(r_max + 1)
    cdag_c = P[offset]
    c_c = Q[offset]
    c_cdag = eye - P[offset.T]
    cdag_cdag = Q[offset.T].conj()

    S_AA = c_c + c_cdag + cdag_c + cdag_cdag
    S_BB = cdag_cdag - cdag_c - c_cdag + c_c
    S_BA = cdag_c + cdag_cdag - c_c - c_cdag
    return ContractionSet(r_max, S_AA, S_BB, S_BA, params.N, sector)


def majorana_expectation(cs: ContractionSet, ops: Sequence[Majorana]) -> complex:
    """Wick expectation of a Majorana product; repeated operators are reduced first"""
    ops = list(ops)
    sign = 1.0

    def key(op: Majorana) -> Tuple[int, int]:
        return op[1], 0 if op[0] == "A" else 1

    for i in range(len(ops)):
        for j in range(len(ops) - 1 - i):
            if key(ops[j]) > key(ops[j + 1]):
                ops[j], ops[j + 1] = ops[j + 1], ops[j]
                sign = -sign

    reduced: List[Majorana] = []
    for op in ops:
        if reduced and reduced[-1] == op:
            reduced.pop()
            sign *= 1.0 if op[0] == "A" else -1.0
        else:
            reduced.append(op)

    m = len(reduced)
    if m == 0:
        return complex(sign)
    if m % 2:
        return 0.0j
    K = np.zeros((m, m), dtype=complex)
    for a in range(m):
        for b in range(a + 1, m):
            K[a, b] = cs.contraction(reduced[a], reduced[b])
            K[b, a] = -K[a, b]
    return sign * complex(pfaffian_value(K))


def _real(value: complex, label: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        warnings.warn(
            f"{label} carries an imaginary residue {value.imag:.3e}", RuntimeWarning
        )
    return float(value.real)


def string_operators(a: str, b: str, r: int) -> List[Majorana]:
    first = ("B", 0) if a == "x" else ("A", 0)
    last = ("A", r) if b == "x" else ("B", r)
    middle = [(kind, site) for site in range(1, r) for kind in ("A", "B")]
    return [first] + middle + [last]


def zz_three_term(cs: ContractionSet, r: int) -> complex:
    """<Z_0 Z_r> including the <A_iA_j><B_iB_j> term"""
    return (
        cs.S_BA[0, 0] * cs.S_BA[r, r]
        - cs.S_BA[r, 0] * cs.S_BA[0, r]
        - cs.S_AA[0, r] * cs.S_BB[0, r]
    )


def connected_zz_three_term(cs: ContractionSet, r: int) -> float:
    """<Z_0 Z_r> - <Z>^2"""
    return _real(zz_three_term(cs, r), "G^zz") - _sigma_z(cs) ** 2


def raw_two_point(cs: ContractionSet, label: str, r: int) -> float:
    """<sigma^a_0 sigma^b_r> without subtraction"""
    if label not in COMPONENTS:
        raise InvalidParameterError(f"Unsupported component pair {label!r}")
    if not 1 <= r <= cs.r_max:
        raise InvalidParameterError(f"r must lie in [1, {cs.r_max}], got {r}")
    if label == "zz":
        return _real(zz_three_term(cs, r), "G^zz")
    value = STRING_COEFFICIENTS[label] * majorana_expectation(
        cs, string_operators(label[0], label[1], r)
    )
    return _real(value, f"G^{label}")


def _sigma_z(cs: ContractionSet) -> float:
    return _real(-cs.S_BA[0, 0], "<sigma^z>")


def two_point(params: ModelParams, a: str, b: str, r: int, cs: Optional[ContractionSet] = None) -> CorrelatorResult:
    """Connected correlator G_r^{ab}; only <sigma^z> is nonzero on a single site"""
    label = a + b
    if label not in COMPONENTS:
        raise InvalidParameterError(f"Unsupported component pair {label!r}")
    cs = cs or contractions(params, r)
    if label == "zz":
        if not 1 <= r <= cs.r_max:
            raise InvalidParameterError(f"r must lie in [1, {cs.r_max}], got {r}")
        value = connected_zz_three_term(cs, r)
    else:
        value = raw_two_point(cs, label, r)
    return CorrelatorResult(label=label, r=r, value=value)


def magnetization_z(params: ModelParams, cs: Optional[ContractionSet] = None) -> float:
    cs = cs or contractions(params, 1)
    return _sigma_z(cs)


def chiral_order(params: ModelParams, r: int, cs: Optional[ContractionSet] = None) -> float:
    """|G_r^xy| - |G_r^yx|"""
    cs = cs or contractions(params, r)
    return abs(two_point(params, "x", "y", r, cs).value) - abs(
        two_point(params, "y", "x", r, cs).value
    )


def _kappa_terms(site: int):
    # kappa_j = X_j Y_{j+1} - Y_j X_{j+1} = i (B_j B_{j+1} - A_j A_{j+1})
    return [
        (1j, [("B", site), ("B", site + 1)]),
        (-1j, [("A", site), ("A", site + 1)]),
    ]


def dimer_product(cs: ContractionSet, r: int) -> complex:
    """B-only reduction of <kappa_i kappa_{i+r}>"""
    S = cs.S_BB
    if r == 1:
        return S[0, 2]
    return S[0, r] * S[1, r + 1] - S[0, 1] * S[r, r + 1] - S[0, r + 1] * S[1, r]


def dimer_correlation(
    params: ModelParams, r: int, channel: str = "xy", cs: Optional[ContractionSet] = None
) -> float:
    """D_r = <kappa_i kappa_{i+r}> - <kappa_i><kappa_{i+r}>"""
    if r < 1:
        raise InvalidParameterError(f"r must be >= 1, got {r}")
    cs = cs or contractions(params, r + 1)
    if channel == "xy":
        kappa = 1j * cs.S_BB[0, 1]
        return float((dimer_product(cs, r) - kappa * kappa).real)
    if channel == "full":
        kappa = sum(c * majorana_expectation(cs, ops) for c, ops in _kappa_terms(0))
        pair = sum(
            c1 * c2 * majorana_expectation(cs, ops1 + ops2)
            for c1, ops1 in _kappa_terms(0)
            for c2, ops2 in _kappa_terms(r)
        )
        # Re<kappa_i kappa_j> is the symmetrized product when supports overlap
        return float(pair.real) - _real(kappa, "<kappa>") ** 2
    raise InvalidParameterError(f"Unknown dimer channel {channel!r}")


def toeplitz_two_point(params: ModelParams, a: str, r: int, cs: Optional[ContractionSet] = None) -> float:
    """<X_0 X_r> or <Y_0 Y_r> as an r x r Toeplitz determinant (Gamma = 0 only)"""
    if params.Gamma != 0.0:
        raise InvalidParameterError("Toeplitz reduction needs Gamma = 0")
    cs = cs or contractions(params, r)
    if a == "x":
        T = toeplitz(cs.S_BA[0:r, 1], cs.S_BA[0, 1:r + 1])
    elif a == "y":
        T = toeplitz(cs.S_BA[1:r + 1, 0], cs.S_BA[1, 0:r])
    else:
        raise InvalidParameterError(f"Toeplitz path covers xx and yy, not {a}{a}")
    return _real(complex(np.linalg.det(T)), f"Toeplitz G^{a}{a}")


def correlation_profile(
    params: ModelParams, labels: Iterable[str], r_values: Sequence[int]
) -> List[CorrelatorResult]:
    """Connected correlators for several components sharing one contraction set"""
    cs = contractions(params, max(r_values))
    return [
        two_point(params, label[0], label[1], r, cs)
        for label in labels
        for r in r_values
    ]
