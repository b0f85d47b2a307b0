"""State-vector simulation of the quantum CRRT-W protocol and its simplified form.

Everything is exact double-precision linear algebra on one or two qubits
(six dimensions for the interviewer-purified joint state). Sampling is used
only by the ``run_*`` functions; every probability reported by the bound
checks comes from amplitudes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

ATOL = 1e-12
SLACK = 1e-9
MALRES_LIMIT = 0.5 + math.sqrt(3) / 4


class QuantumError(ValueError):
    pass


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", a)
        if abs(np.vdot(a, a).real - 1) > ATOL:
            raise QuantumError(f"state norm {np.linalg.norm(a)} is not 1")

    def inner(self, other: "PureState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def flip(self) -> "PureState":
        """Pauli X on a single qubit."""
        return PureState(self.amplitudes[::-1].copy())


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if not np.allclose(m, m.conj().T, atol=ATOL):
            raise QuantumError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > ATOL:
            raise QuantumError("density matrix trace is not 1")
        if np.linalg.eigvalsh(m).min() < -ATOL:
            raise QuantumError("density matrix is not positive semidefinite")

    def expectation(self, state: PureState) -> float:
        """<state|rho|state>, the probability of projecting onto ``state``."""
        return float(np.vdot(state.amplitudes, self.matrix @ state.amplitudes).real)


def basis_state(k: int, dim: int = 2) -> PureState:
    a = np.zeros(dim, dtype=complex)
    a[k] = 1
    return PureState(a)


COMPUTATIONAL = (basis_state(0), basis_state(1))


def _check_p(p: float, lo: float = 0.0, hi: float = 1.0) -> None:
    if not lo < p < hi:
        raise QuantumError(f"p = {p} outside ({lo}, {hi})")


def prepare_psi(u: int, p: float) -> PureState:
    """sqrt(p)|u> + sqrt(1-p)|1-u>."""
    _check_p(p)
    a = np.zeros(2, dtype=complex)
    a[u] = math.sqrt(p)
    a[1 - u] = math.sqrt(1 - p)
    return PureState(a)


def prepare_psi_perp(u: int, p: float) -> PureState:
    """sqrt(1-p)|u> - sqrt(p)|1-u>, orthogonal to prepare_psi(u, p)."""
    _check_p(p)
    a = np.zeros(2, dtype=complex)
    a[u] = math.sqrt(1 - p)
    a[1 - u] = -math.sqrt(p)
    return PureState(a)


def verification_basis(u: int, p: float) -> tuple[PureState, PureState]:
    return prepare_psi(u, p), prepare_psi_perp(u, p)


def _check_basis(basis) -> None:
    gram = np.array([[a.inner(b) for b in basis] for a in basis])
    if not np.allclose(gram, np.eye(len(basis)), atol=1e-10):
        raise QuantumError("measurement basis is not orthonormal")


def outcome_probabilities(state: PureState, basis) -> np.ndarray:
    _check_basis(basis)
    return np.array([abs(b.inner(state)) ** 2 for b in basis])


def measure(state: PureState, basis, rng) -> tuple[int, PureState]:
    """Projective measurement; returns the outcome index and the post-measurement state."""
    probs = outcome_probabilities(state, basis)
    x, acc = rng.random(), 0.0
    for k, pk in enumerate(probs):
        acc += pk
        if x < acc:
            return k, basis[k]
    return len(basis) - 1, basis[-1]


def apply_type(state: PureState, t: int) -> PureState:
    """|0> -> |t>, |1> -> |1-t>."""
    return state.flip() if t else state


@dataclass(frozen=True)
class QuantumRunOutcome:
    r: int | None
    verified: bool
    record: dict = field(default_factory=dict)

    @property
    def halted(self) -> bool:
        return self.r is None


# Full protocol ----------------------------------------------------------------------

def run_protocol3(t: int, p: float, rng, states: tuple[PureState, PureState, int, int] | None = None,
                  i: int | None = None) -> QuantumRunOutcome:
    """One sampled run. ``states`` = (psi_0, psi_1, u_0, u_1) lets a cheating interviewer supply qubits.

    The respondent verifies qubit i against u_i, encodes t into qubit 1-i and
    returns it; the interviewer outputs u_{1-i} xor s.
    """
    if states is None:
        u0, u1 = rng.randrange(2), rng.randrange(2)
        psi = (prepare_psi(u0, p), prepare_psi(u1, p))
        us = (u0, u1)
    else:
        psi, us = states[:2], states[2:]
    if i is None:
        i = rng.randrange(2)
    check, _ = measure(psi[i], verification_basis(us[i], p), rng)
    record = {"u0": us[0], "u1": us[1], "i": i, "check": check}
    if check != 0:
        return QuantumRunOutcome(None, False, record)
    s, _ = measure(apply_type(psi[1 - i], t), COMPUTATIONAL, rng)
    record["s"] = s
    return QuantumRunOutcome(us[1 - i] ^ s, True, record)


def protocol3_law(t: int, p: float) -> float:
    """Exact Pr[r = t] for honest parties, averaging over u_0, u_1, i."""
    total = 0.0
    for u0 in (0, 1):
        for u1 in (0, 1):
            us = (u0, u1)
            for i in (0, 1):
                passed = outcome_probabilities(prepare_psi(us[i], p), verification_basis(us[i], p))[0]
                probs = outcome_probabilities(apply_type(prepare_psi(us[1 - i], p), t), COMPUTATIONAL)
                total += passed * probs[us[1 - i] ^ t] / 8
    return total


# Simplified protocol -------------------------------------------------------------------

SIMPLIFIED_STRATEGIES = ("honest", "send-zero")


def run_simplified(t: int, p: float, rng, interviewer_strategy: str = "honest") -> QuantumRunOutcome:
    """Honest: send psi_u and output u xor s. Send-zero: send |0> and output s, which is t."""
    if interviewer_strategy not in SIMPLIFIED_STRATEGIES:
        raise QuantumError(f"unknown interviewer strategy {interviewer_strategy!r}")
    if interviewer_strategy == "honest":
        u = rng.randrange(2)
        sent = prepare_psi(u, p)
    else:
        u, sent = 0, basis_state(0)
    returned = apply_type(sent, t)
    s, _ = measure(returned, COMPUTATIONAL, rng)
    return QuantumRunOutcome(u ^ s, True, {"u": u, "s": s, "strategy": interviewer_strategy})


def simplified_law(t: int, p: float, interviewer_strategy: str = "honest") -> float:
    """Exact Pr[r = t]."""
    if interviewer_strategy == "send-zero":
        return float(outcome_probabilities(apply_type(basis_state(0), t), COMPUTATIONAL)[t])
    return sum(outcome_probabilities(apply_type(prepare_psi(u, p), t), COMPUTATIONAL)[u ^ t] / 2 for u in (0, 1))


# Distinguishability --------------------------------------------------------------------

def helstrom_pure(state0: PureState, state1: PureState) -> float:
    """Best probability of telling two equiprobable pure states apart."""
    overlap = min(1.0, abs(state0.inner(state1)) ** 2)
    return 0.5 + math.sqrt(1 - overlap) / 2


def trace_norm(m: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(m)).sum())


def helstrom_mixed(rho0: DensityMatrix, rho1: DensityMatrix) -> float:
    return 0.5 + trace_norm(rho0.matrix - rho1.matrix) / 4


# Closed-form bounds -----------------------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    p: float
    epsilon: float
    alpha: float
    interviewer_advantage: float   # p + 2 eps / (2p - 1)
    icheat1: float                 # lower bound on the failure probability
    icheat2: float                 # upper bound on guessing t
    malres: float                  # respondent bias bound (meaningful for p < MALRES_LIMIT)
    simple: float                  # 1/2 + sqrt(2) (p - 1/2)
    detection: float               # (2p - 1) eps / 2

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def malres_bound(p: float) -> float:
    x = 4 * p - 4 * p * p
    return 0.5 + math.sqrt(max(0.0, math.sqrt(x) - x))


def eval_bounds(p: float, epsilon: float = 0.0, alpha: float | None = None) -> Bounds:
    _check_p(p, 0.5, 1.0)
    honest = math.sqrt(p * (1 - p))
    if alpha is None:
        alpha = honest
    if not 0 <= alpha <= honest + ATOL:
        raise QuantumError(f"alpha = {alpha} outside [0, sqrt(p(1-p))]")
    if not 0 <= epsilon <= 1:
        raise QuantumError("epsilon must be a probability")
    return Bounds(
        p=p, epsilon=epsilon, alpha=alpha,
        interviewer_advantage=p + 2 * epsilon / (2 * p - 1),
        icheat1=(honest - alpha) * honest,
        icheat2=0.5 + math.sqrt(max(0.0, 1 - 4 * alpha * alpha)) / 2,
        malres=malres_bound(p),
        simple=0.5 + math.sqrt(2) * (p - 0.5),
        detection=(2 * p - 1) * epsilon / 2,
    )


# Cheating interviewer: the symmetric alpha family ------------------------------------------

def cheating_first_qubit(alpha: float) -> DensityMatrix:
    return DensityMatrix(np.array([[0.5, alpha], [alpha, 0.5]], dtype=complex))


def optimal_diagonal(alpha: float) -> float:
    """Largest a' with [[a', alpha], [alpha, 1-a']] positive; it maximizes the pass probability."""
    return (1 + math.sqrt(max(0.0, 1 - 4 * alpha * alpha))) / 2


def cheating_claimed_part(alpha: float, a_prime: float | None = None) -> DensityMatrix:
    """rho_0, the part of the first qubit the interviewer claims is psi_0."""
    a = optimal_diagonal(alpha) if a_prime is None else a_prime
    return DensityMatrix(np.array([[a, alpha], [alpha, 1 - a]], dtype=complex))


def purified_joint_state(alpha: float, t: int) -> PureState:
    """Interviewer (3-dim) x respondent qubit after the respondent encodes t."""
    w = math.sqrt(max(0.0, 0.5 - alpha))
    a = np.zeros(6, dtype=complex)
    a[0 * 2 + t] = w           # |0>_I |t>_R
    a[1 * 2 + (1 - t)] = w     # |1>_I |1-t>_R
    a[2 * 2 + 0] = a[2 * 2 + 1] = math.sqrt(alpha)   # sqrt(2 alpha) |2>_I |+>_R
    return PureState(a)


def reduced_respondent_state(state: PureState) -> DensityMatrix:
    m = state.amplitudes.reshape(3, 2)
    return DensityMatrix(m.T @ m.conj())


def simulate_cheating_interviewer(alpha: float, p: float, t: int = 0,
                                  a_prime: float | None = None) -> tuple[float, float]:
    """(failure probability when the cheated qubit is tested, probability of learning t).

    Both numbers are exact. The guess probability is the same for t = 0 and t = 1.
    By default the claimed part uses the pass-maximizing diagonal a'; passing
    ``a_prime=p`` reproduces the honest diagonal that the ICheat1 lower bound
    implicitly assumes.
    """
    if not 0 <= alpha <= 0.5:
        raise QuantumError(f"alpha = {alpha} outside [0, 1/2]")
    _check_p(p, 0.5, 1.0)
    failure = 1 - cheating_claimed_part(alpha, a_prime).expectation(prepare_psi(0, p))
    guess = helstrom_pure(purified_joint_state(alpha, t), purified_joint_state(alpha, 1 - t))
    return failure, guess


# Cheating respondent: two-outcome measurement on the first qubit ------------------------------

def theta_basis(theta: float) -> tuple[PureState, PureState]:
    c, s = math.cos(theta), math.sin(theta)
    return PureState(np.array([c, s], dtype=complex)), PureState(np.array([-s, c], dtype=complex))


def simulate_cheating_respondent(theta: float, p: float, protocol: str = "full") -> float:
    """Exact Pr[r = 1] for a respondent who measures in the theta basis and then guesses.

    Full protocol: outcome k on qubit 0 is sent as i = k. If k = 0 the
    interviewer reveals u_0 and qubit 1 is untouched, so u_1 is guessed at the
    Helstrom rate p. If k = 1 the interviewer reveals u_1 and the only
    information about u_0 is the outcome itself.
    Simplified protocol: the returned qubit's outcome determines a guess of u.
    Guessing u correctly is exactly what is needed to force r = 1.
    """
    _check_p(p, 0.5, 1.0)
    basis = theta_basis(theta)
    cond = np.array([outcome_probabilities(prepare_psi(u, p), basis) for u in (0, 1)])  # [u, k]
    if protocol == "simplified":
        return float(sum(cond[:, k].max() / 2 for k in (0, 1)))
    if protocol != "full":
        raise QuantumError(f"unknown protocol {protocol!r}")
    pr_k0 = cond[:, 0].mean()
    guess_untouched = helstrom_pure(prepare_psi(0, p), prepare_psi(1, p))
    return float(pr_k0 * guess_untouched + cond[:, 1].max() / 2)


# Sweeps ------------------------------------------------------------------------------------

SWEEP_COLUMNS = ("family", "p", "param", "achieved", "bound", "slack")


def bound_sweep(p: float, points: int = 100, diagonal: str = "optimal") -> list[dict]:
    """Achieved values of every adversary family on a grid, with the matching bound.

    ``slack`` is positive when the bound holds: bound - achieved for upper
    bounds, achieved - bound for the ICheat1 lower bound. ``diagonal`` is
    "optimal" (the interviewer's best a') or "honest" (a' = p).
    """
    if diagonal not in ("optimal", "honest"):
        raise QuantumError(f"unknown diagonal mode {diagonal!r}")
    rows = []
    honest = math.sqrt(p * (1 - p))
    for j in range(points):
        alpha = honest * j / (points - 1)
        failure, guess = simulate_cheating_interviewer(alpha, p, a_prime=p if diagonal == "honest" else None)
        b = eval_bounds(p, epsilon=min(1.0, failure), alpha=alpha)
        rows.append({"family": "interviewer-detect", "p": p, "param": alpha, "achieved": failure,
                     "bound": b.icheat1, "slack": failure - b.icheat1})
        rows.append({"family": "interviewer-guess", "p": p, "param": alpha, "achieved": guess,
                     "bound": b.icheat2, "slack": b.icheat2 - guess})
        rows.append({"family": "interviewer-advantage", "p": p, "param": alpha, "achieved": guess,
                     "bound": b.interviewer_advantage, "slack": b.interviewer_advantage - guess})
    full_bound = malres_bound(p) if p < MALRES_LIMIT else 1.0
    for j in range(2 * points):
        theta = math.pi * j / (2 * points)
        for protocol, bound in (("full", full_bound), ("simplified", p)):
            got = simulate_cheating_respondent(theta, p, protocol)
            rows.append({"family": f"respondent-{protocol}", "p": p, "param": theta, "achieved": got,
                         "bound": bound, "slack": bound - got})
    return rows


def sweep_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in row.items()})
    return out.getvalue()
