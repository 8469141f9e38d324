"""Two-dimensional Hilbert-space reference model.

States are length-2 complex arrays and operators 2x2 complex arrays; inputs
are validated on entry instead of being wrapped in classes. Projectors are
restricted to rank one.
"""
import numpy as np

from gtrmodel.core import SequentialProbTable
from gtrmodel.errors import ParameterDomainError

__all__ = [
    "IDENTITY",
    "as_state",
    "as_projector",
    "as_unitary",
    "projector_onto",
    "state_from_bloch",
    "projector_from_bloch",
    "random_state",
    "random_unitary",
    "random_projector",
    "born_sequential_probabilities",
    "qq_statistic",
    "q_prime_statistic",
    "q_operator",
    "q_operator_norm",
    "q_prime_operator",
    "q_prime_operator_expectation",
]

TOL = 1e-12
IDENTITY = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def as_state(psi):
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise ParameterDomainError(f"a qubit state needs 2 amplitudes, got shape {psi.shape}")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > TOL:
        raise ParameterDomainError(f"state has squared norm {norm2!r}, not 1")
    return psi


def _as_matrix(m, role):
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ParameterDomainError(f"{role} must be 2x2, got shape {m.shape}")
    return m


def as_projector(p):
    """Validate a rank-1 orthogonal projector."""
    p = _as_matrix(p, "projector")
    if np.max(np.abs(p - p.conj().T)) > TOL:
        raise ParameterDomainError("projector is not Hermitian")
    if np.max(np.abs(p @ p - p)) > TOL:
        raise ParameterDomainError("projector is not idempotent")
    if abs(np.trace(p).real - 1.0) > TOL:
        raise ParameterDomainError("projector is not rank 1")
    return p


def as_unitary(u):
    if u is None:
        return IDENTITY
    u = _as_matrix(u, "unitary")
    if np.max(np.abs(u.conj().T @ u - IDENTITY)) > TOL:
        raise ParameterDomainError("operator is not unitary")
    return u


def projector_onto(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def state_from_bloch(n):
    """Unit ket whose Bloch vector is ``n``."""
    x, y, z = (float(c) for c in (n.as_array() if hasattr(n, "as_array") else n))
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def projector_from_bloch(n):
    """``(I + n . sigma) / 2``."""
    n = np.asarray(n.as_array() if hasattr(n, "as_array") else n, dtype=float)
    return 0.5 * (IDENTITY + sum(c * s for c, s in zip(n, PAULI)))


def random_state(rng):
    """Normalized complex Gaussian vector (uniform on the Bloch sphere)."""
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def random_unitary(rng):
    """Haar-distributed 2x2 unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_projector(rng):
    return projector_onto(random_state(rng))


def _sequential(psi, p_first, p_second, u_first, u_second):
    """``|| P_j W_2 P_i W_1 psi ||^2`` for i, j in (yes, no)."""
    out = []
    for pi in (p_first, IDENTITY - p_first):
        after_first = pi @ (u_first @ psi)
        for pj in (p_second, IDENTITY - p_second):
            amp = pj @ (u_second @ after_first)
            out.append(float(np.vdot(amp, amp).real))
    return tuple(out)


def born_sequential_probabilities(psi, proj_a_yes, proj_b_yes, u=None, v=None):
    """Sequential Born-rule probabilities for both orders.

    ``u`` is the context unitary applied before each A measurement and ``v``
    the one applied before each B measurement, so that
    ``p(A_i B_j) = <psi| U+ P_i V+ P_j V P_i U |psi>``.
    """
    psi = as_state(psi)
    pa, pb = as_projector(proj_a_yes), as_projector(proj_b_yes)
    u, v = as_unitary(u), as_unitary(v)
    ab = _sequential(psi, pa, pb, u, v)
    ba = _sequential(psi, pb, pa, v, u)
    return SequentialProbTable(ab, ba)


def qq_statistic(table):
    """``p(AyBy) - p(ByAy) + p(AnBn) - p(BnAn)``."""
    return table.ab[0] - table.ba[0] + table.ab[3] - table.ba[3]


def q_prime_statistic(table):
    """``p(AyBn) p(AnBn) - p(AnBy) p(AyBy)``."""
    yy, yn, ny, nn = table.ab
    return yn * nn - ny * yy


def q_operator(proj_a_yes, proj_b_yes):
    pay, pby = as_projector(proj_a_yes), as_projector(proj_b_yes)
    pan, pbn = IDENTITY - pay, IDENTITY - pby
    return pay @ pby @ pay - pby @ pay @ pby + pan @ pbn @ pan - pbn @ pan @ pbn


def q_operator_norm(proj_a_yes, proj_b_yes):
    """Largest singular value of the QQ operator (zero for every projector pair)."""
    return float(np.linalg.norm(q_operator(proj_a_yes, proj_b_yes), 2))


def q_prime_operator(proj_a_yes, proj_b_yes, u=None, v=None):
    """QQ operator in the presence of context unitaries ``u`` (before A) and ``v`` (before B)."""
    pay, pby = as_projector(proj_a_yes), as_projector(proj_b_yes)
    u, v = as_unitary(u), as_unitary(v)
    ud, vd = u.conj().T, v.conj().T
    pan, pbn = IDENTITY - pay, IDENTITY - pby

    def ctx(w, p):
        return w.conj().T @ p @ w

    return (
        ud @ pay @ ctx(v, pby) @ pay @ u
        - vd @ pby @ ctx(u, pay) @ pby @ v
        + ud @ pan @ ctx(v, pbn) @ pan @ u
        - vd @ pbn @ ctx(u, pan) @ pbn @ v
    )


def q_prime_operator_expectation(psi, proj_a_yes, proj_b_yes, u=None, v=None):
    psi = as_state(psi)
    qp = q_prime_operator(proj_a_yes, proj_b_yes, u, v)
    return float(np.vdot(psi, qp @ psi).real)
