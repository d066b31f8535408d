"""Dense statevector oracle for product ansatzes with Pauli-string generators.

Circuits are U(theta) = prod_j exp(-i theta_j A_j) applied to |0...0>, with
each A_j a Pauli string (unit norm, spectrum {-1,+1}), so every parameter
is 2pi-periodic. Pauli exponentials use the closed form
cos(t) I - i sin(t) A; no matrix-exponential library is involved.

Statevector evaluation (cost, sampling) works to ``STATE_QUBIT_LIMIT``
qubits; operations that materialize dense operators (conjugated
generators, derivative formulas, spectral norms) are capped separately by
``DENSE_QUBIT_LIMIT``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .errors import ResourceLimitError
from .noise import NoiseSpec, NoisyEstimate, hoeffding_radius, substream, STREAM_EVAL

STATE_QUBIT_LIMIT = 12
DENSE_QUBIT_LIMIT = 10

_PAULI_LETTERS = frozenset("IXYZ")

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A Pauli word c * P_1 x ... x P_n, one letter per qubit."""

    n_qubits: int
    letters: str
    coefficient: float = 1.0

    def __post_init__(self):
        if len(self.letters) != self.n_qubits:
            raise ValueError("letter count must equal the qubit count")
        if not set(self.letters) <= _PAULI_LETTERS:
            raise ValueError(f"invalid Pauli letters in {self.letters!r}")


@dataclass(frozen=True)
class AnsatzSpec:
    """Ordered product ansatz; optional tying map groups parameters."""

    n_qubits: int
    generators: tuple
    tying: Optional[tuple] = None

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(gens) < 1:
            raise ValueError("need at least one generator")
        for g in gens:
            if g.n_qubits != self.n_qubits:
                raise ValueError("all generators must act on the same register")
            if g.coefficient != 1.0:
                raise ValueError("generators must have unit coefficient")
        object.__setattr__(self, "generators", gens)
        if self.tying is not None:
            tying = tuple(int(c) for c in self.tying)
            if len(tying) != len(gens):
                raise ValueError("tying map must assign every parameter")
            k = max(tying) + 1
            if set(tying) != set(range(k)):
                raise ValueError("tying classes must be 0..k-1 and all used")
            object.__setattr__(self, "tying", tying)

    @property
    def n_params(self) -> int:
        return len(self.generators)

    @property
    def n_classes(self) -> Optional[int]:
        return None if self.tying is None else max(self.tying) + 1

    def expand_tied(self, phi) -> np.ndarray:
        """Map k tied class values to the full parameter vector."""
        if self.tying is None:
            raise ValueError("ansatz has no tying map")
        phi = np.asarray(phi, dtype=float)
        return phi[list(self.tying)]


@dataclass(frozen=True)
class HamiltonianSpec:
    """Weighted sum of Pauli strings with a known spectral-norm bound."""

    terms: tuple
    lambda_bound: Optional[float] = None

    def __post_init__(self):
        terms = tuple(self.terms)
        if len(terms) < 1:
            raise ValueError("Hamiltonian needs at least one term")
        n = terms[0].n_qubits
        if any(t.n_qubits != n for t in terms):
            raise ValueError("all terms must act on the same register")
        object.__setattr__(self, "terms", terms)
        if self.lambda_bound is None:
            object.__setattr__(self, "lambda_bound", self.coefficient_sum())
        elif self.lambda_bound <= 0:
            raise ValueError("lambda bound must be positive")

    @property
    def n_qubits(self) -> int:
        return self.terms[0].n_qubits

    def coefficient_sum(self) -> float:
        return float(sum(abs(t.coefficient) for t in self.terms))

    def outcome_range(self) -> float:
        """Width of the per-shot outcome interval under per-term sampling."""
        return 2.0 * self.coefficient_sum()


def _check_state_limit(n: int, limit: int = STATE_QUBIT_LIMIT):
    if n > limit:
        raise ResourceLimitError(f"register of {n} qubits exceeds the limit of {limit}")


def zero_state(n_qubits: int, batch: Optional[int] = None) -> np.ndarray:
    _check_state_limit(n_qubits)
    if batch is None:
        state = np.zeros(2**n_qubits, dtype=complex)
        state[0] = 1.0
        return state
    state = np.zeros((batch, 2**n_qubits), dtype=complex)
    state[:, 0] = 1.0
    return state


def apply_pauli(state: np.ndarray, letters: str) -> np.ndarray:
    """Apply a unit-coefficient Pauli string to (batched) state vectors.

    Qubit q corresponds to the q-th letter; qubit 0 is the most
    significant bit of the amplitude index.
    """
    n = len(letters)
    batched = state.ndim == 2
    psi = state if batched else state[None, :]
    work = psi.reshape((psi.shape[0],) + (2,) * n)
    for q, letter in enumerate(letters):
        if letter == "I":
            continue
        axis = 1 + q
        idx0 = (slice(None),) * axis + (0,)
        idx1 = (slice(None),) * axis + (1,)
        a0 = work[idx0]
        a1 = work[idx1]
        out = np.empty_like(work)
        if letter == "X":
            out[idx0] = a1
            out[idx1] = a0
        elif letter == "Y":
            out[idx0] = -1j * a1
            out[idx1] = 1j * a0
        else:  # Z
            out[idx0] = a0
            out[idx1] = -a1
        work = out
    result = work.reshape(psi.shape)
    return result if batched else result[0]


def apply_pauli_rotation(state: np.ndarray, letters: str, angle) -> np.ndarray:
    """exp(-i angle P) |state> = cos(angle) |state> - i sin(angle) P|state>."""
    rotated = apply_pauli(state, letters)
    if state.ndim == 2:
        angle = np.asarray(angle, dtype=float).reshape(-1, 1)
    return np.cos(angle) * state - 1j * np.sin(angle) * rotated


def apply_ansatz(ansatz: AnsatzSpec, theta) -> np.ndarray:
    """U(theta)|0...0>, applying generator factors from last to first."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != ansatz.n_params:
        raise ValueError("parameter vector does not match the ansatz")
    batched = theta.ndim == 2
    state = zero_state(ansatz.n_qubits, batch=theta.shape[0] if batched else None)
    for j in range(ansatz.n_params - 1, -1, -1):
        angle = theta[:, j] if batched else theta[j]
        state = apply_pauli_rotation(state, ansatz.generators[j].letters, angle)
    return state


def expectation(state: np.ndarray, term: PauliString) -> np.ndarray:
    """Real expectation <state| term |state> (per batch row)."""
    acted = apply_pauli(state, term.letters)
    val = np.sum(np.conj(state) * acted, axis=-1).real
    return term.coefficient * val


def cost(ansatz: AnsatzSpec, hamiltonian: HamiltonianSpec, theta) -> np.ndarray:
    """Energy <0|U(theta)^dag H U(theta)|0>; batched over rows of theta."""
    state = apply_ansatz(ansatz, theta)
    total = sum(expectation(state, term) for term in hamiltonian.terms)
    return np.asarray(total, dtype=float)


def lipschitz_bound(ansatz: AnsatzSpec, hamiltonian: HamiltonianSpec) -> float:
    """Global Lipschitz bound 2 * Lambda * sqrt(p) for unit-norm generators."""
    return 2.0 * hamiltonian.lambda_bound * math.sqrt(ansatz.n_params)


def lambda_bound(hamiltonian: HamiltonianSpec, mode: str = "coefficient-sum") -> float:
    """Spectral-norm bound: triangle inequality or a dense eigensolve."""
    if mode == "coefficient-sum":
        return hamiltonian.coefficient_sum()
    if mode == "dense":
        _check_state_limit(hamiltonian.n_qubits, DENSE_QUBIT_LIMIT)
        return float(np.max(np.abs(np.linalg.eigvalsh(dense_operator(hamiltonian)))))
    raise ValueError(f"unknown mode {mode!r}")


# --- dense-operator forms (small registers) ---

def pauli_matrix(term: PauliString) -> np.ndarray:
    _check_state_limit(term.n_qubits, DENSE_QUBIT_LIMIT)
    mat = reduce(np.kron, (_SINGLE[letter] for letter in term.letters))
    return term.coefficient * mat


def dense_operator(hamiltonian: HamiltonianSpec) -> np.ndarray:
    return sum(pauli_matrix(t) for t in hamiltonian.terms)


def _factor(term: PauliString, angle: float) -> np.ndarray:
    mat = pauli_matrix(term)
    dim = mat.shape[0]
    return math.cos(angle) * np.eye(dim) - 1j * math.sin(angle) * mat


def ansatz_unitary(ansatz: AnsatzSpec, theta) -> np.ndarray:
    """Dense U(theta) with the first generator leftmost in the product."""
    _check_state_limit(ansatz.n_qubits, DENSE_QUBIT_LIMIT)
    theta = np.asarray(theta, dtype=float)
    u = np.eye(2**ansatz.n_qubits, dtype=complex)
    for j in range(ansatz.n_params - 1, -1, -1):
        u = _factor(ansatz.generators[j], theta[j]) @ u
    return u


def tail_unitary(ansatz: AnsatzSpec, theta, j: int) -> np.ndarray:
    """Product of the factors after position j (0-based)."""
    _check_state_limit(ansatz.n_qubits, DENSE_QUBIT_LIMIT)
    theta = np.asarray(theta, dtype=float)
    u = np.eye(2**ansatz.n_qubits, dtype=complex)
    for k in range(ansatz.n_params - 1, j, -1):
        u = _factor(ansatz.generators[k], theta[k]) @ u
    return u


def conjugated_generator(ansatz: AnsatzSpec, j: int, theta) -> np.ndarray:
    """Generator j pushed through the tail of the circuit (Hermitian, same spectrum)."""
    if j < 0 or j >= ansatz.n_params:
        raise ValueError("generator index out of range")
    tail = tail_unitary(ansatz, theta, j)
    a_j = pauli_matrix(ansatz.generators[j])
    return tail.conj().T @ a_j @ tail


def _mixing_operator(ansatz: AnsatzSpec, theta, direction: np.ndarray) -> np.ndarray:
    terms = [
        direction[j] * conjugated_generator(ansatz, j, theta)
        for j in range(ansatz.n_params)
        if direction[j] != 0.0
    ]
    dim = 2**ansatz.n_qubits
    return sum(terms) if terms else np.zeros((dim, dim), dtype=complex)


def _conjugated_hamiltonian(
    ansatz: AnsatzSpec, hamiltonian: HamiltonianSpec, theta
) -> np.ndarray:
    u = ansatz_unitary(ansatz, theta)
    return u.conj().T @ dense_operator(hamiltonian) @ u


def directional_derivative(
    ansatz: AnsatzSpec, hamiltonian: HamiltonianSpec, theta, direction
) -> float:
    """d/dt C(theta + t v) at t=0, via i<0|[K_theta(v), U^dag H U]|0>."""
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (ansatz.n_params,):
        raise ValueError("direction dimension must match the parameter count")
    k_op = _mixing_operator(ansatz, theta, direction)
    h_conj = _conjugated_hamiltonian(ansatz, hamiltonian, theta)
    comm = k_op @ h_conj - h_conj @ k_op
    return float((1j * comm[0, 0]).real)


def directional_second_derivative(
    ansatz: AnsatzSpec,
    hamiltonian: HamiltonianSpec,
    theta,
    direction,
    k_dot_step: float = 1e-4,
) -> float:
    """Second directional derivative -<[K,[K,H']]> + i<[K', H']>.

    The derivative K' of the mixing operator along the direction has no
    closed form here; it is taken by central differences with step
    ``k_dot_step``.
    """
    theta = np.asarray(theta, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (ansatz.n_params,):
        raise ValueError("direction dimension must match the parameter count")
    k_op = _mixing_operator(ansatz, theta, direction)
    h_conj = _conjugated_hamiltonian(ansatz, hamiltonian, theta)
    inner = k_op @ h_conj - h_conj @ k_op
    double = k_op @ inner - inner @ k_op
    term1 = float(-double[0, 0].real)
    k_plus = _mixing_operator(ansatz, theta + k_dot_step * direction, direction)
    k_minus = _mixing_operator(ansatz, theta - k_dot_step * direction, direction)
    k_dot = (k_plus - k_minus) / (2.0 * k_dot_step)
    comm = k_dot @ h_conj - h_conj @ k_dot
    term2 = float((1j * comm[0, 0]).real)
    return term1 + term2


def effective_rank(ansatz: AnsatzSpec, theta, tol: float = 1e-8) -> int:
    """Estimated dimension of span{conjugated generators} at theta.

    Counts eigenvalues of the normalized Hilbert-Schmidt Gram matrix above
    tol times the largest eigenvalue.
    """
    if not (0.0 < tol < 1.0):
        raise ValueError("tolerance must lie in (0, 1)")
    p = ansatz.n_params
    dim = 2**ansatz.n_qubits
    conj = [conjugated_generator(ansatz, j, theta) for j in range(p)]
    gram = np.empty((p, p))
    for a in range(p):
        for b in range(a, p):
            val = np.trace(conj[a] @ conj[b]).real / dim
            gram[a, b] = gram[b, a] = val
    eigs = np.linalg.eigvalsh(gram)
    top = eigs[-1]
    if top <= 0:
        return 0
    return int(np.sum(eigs > tol * top))


# --- finite-shot sampling ---

def shot_sample(
    ansatz: AnsatzSpec,
    hamiltonian: HamiltonianSpec,
    theta,
    n_shots: int,
    rng: np.random.Generator,
    alpha: float = 0.05,
) -> NoisyEstimate:
    """Per-term independent sampling: each shot draws an eigenvalue +-1 per term.

    The estimator mean equals the exact cost; per-shot outcomes lie in
    [-sum|c|, +sum|c|], so 2*sum|c| is a valid Hoeffding range.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    state = apply_ansatz(ansatz, theta)
    total = 0.0
    for term in hamiltonian.terms:
        mean = expectation(state, replace(term, coefficient=1.0))
        prob_up = float(np.clip((1.0 + mean) / 2.0, 0.0, 1.0))
        ups = rng.binomial(n_shots, prob_up)
        total += term.coefficient * (2.0 * ups / n_shots - 1.0)
    spread = hamiltonian.outcome_range()
    return NoisyEstimate(
        value=float(total),
        radius=hoeffding_radius(n_shots, alpha, spread),
        level=alpha,
        n_shots=n_shots,
    )


class QuantumShotOracle:
    """Finite-shot quantum oracle for the elimination engine.

    The outcome range is fixed by the Hamiltonian (2 * sum|coefficients|),
    overriding whatever range the noise spec carries.
    """

    noiseless = False

    def __init__(self, ansatz: AnsatzSpec, hamiltonian: HamiltonianSpec, spec: NoiseSpec):
        self.ansatz = ansatz
        self.hamiltonian = hamiltonian
        self.spec = replace(spec, kind="two-point", outcome_range=hamiltonian.outcome_range())

    def evaluate_round(self, thetas, alpha, flat_id, round_index):
        thetas = np.atleast_2d(thetas)
        n = self.spec.shots_for(alpha)
        values = np.empty(thetas.shape[0])
        for idx in range(thetas.shape[0]):
            rng = substream(self.spec.master_seed, STREAM_EVAL, flat_id, round_index, idx)
            est = shot_sample(self.ansatz, self.hamiltonian, thetas[idx], n, rng, alpha)
            values[idx] = est.value
        radius = hoeffding_radius(n, alpha, self.spec.outcome_range)
        return values, radius, n


def fd_gradient_norms(
    ansatz: AnsatzSpec,
    hamiltonian: HamiltonianSpec,
    thetas: np.ndarray,
    step: float = 1e-5,
) -> np.ndarray:
    """Central finite-difference gradient norms, batched over theta rows."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    sq = np.zeros(thetas.shape[0])
    for j in range(ansatz.n_params):
        shift = np.zeros(ansatz.n_params)
        shift[j] = step
        deriv = (cost(ansatz, hamiltonian, thetas + shift) -
                 cost(ansatz, hamiltonian, thetas - shift)) / (2.0 * step)
        sq += deriv**2
    return np.sqrt(sq)
