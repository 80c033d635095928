"""Density operators on the truncated qubit x Fock space.

Basis convention: ``|alpha, n>`` sits at index ``2 n + alpha``, i.e. the
ordering ``|0,0>, |1,0>, |0,1>, |1,1>, ...``. With this ordering every
excitation sector ``{|1,n-1>, |0,n>}`` occupies the consecutive indices
``2n - 1, 2n``. ``TotalState.coeff(alpha, n, beta, m)`` is the coefficient
of ``|alpha, n><beta, m|``.

Qubit matrices are indexed by ``alpha`` as well: ``[[rho00, rho01], [rho10, rho11]]``.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import ModelParams, dressed_arrays, ground_level_index, lower_energy
from .numerics import HERMITICITY_TOL, hermitian_eigenvalues

DEFAULT_TAIL_TOL = 1e-12
MAX_N = 4096
_QUBIT_TOL = 1e-12


class TruncationLeakWarning(RuntimeWarning):
    """Evolution pushed weight past the Fock truncation."""


def _index(alpha: int, n: int) -> int:
    return 2 * n + alpha


def _check_hermitian(M: np.ndarray, what: str):
    scale = max(np.abs(M).max(initial=0.0), 1.0)
    gap = np.abs(M - M.conj().T)
    if gap.size and gap.max() > HERMITICITY_TOL * scale:
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        raise ValueError(f"{what} is not Hermitian at entries ({i},{j}): deviation {gap.max():.3e}")


@dataclass(frozen=True, eq=False)
class QubitState:
    """Two-level density matrix with populations ``rho11``, ``rho00`` and coherence ``rho10 = <1|rho|0>``."""

    rho11: float
    rho00: float
    rho10: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "rho11", float(np.real(self.rho11)))
        object.__setattr__(self, "rho00", float(np.real(self.rho00)))
        object.__setattr__(self, "rho10", complex(self.rho10))
        if abs(self.rho11 + self.rho00 - 1.0) > _QUBIT_TOL:
            raise ValueError(f"qubit populations sum to {self.rho11 + self.rho00!r}, not 1")
        if min(self.rho11, self.rho00) < -_QUBIT_TOL:
            raise ValueError(f"negative qubit population: rho11={self.rho11}, rho00={self.rho00}")
        if abs(self.rho10) ** 2 > self.rho11 * self.rho00 + _QUBIT_TOL:
            raise ValueError("qubit coherence violates positivity: |rho10|^2 > rho11 * rho00")

    @classmethod
    def from_matrix(cls, M) -> "QubitState":
        M = np.asarray(M, dtype=complex)
        if M.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
        _check_hermitian(M, "qubit matrix")
        return cls(rho11=M[1, 1].real, rho00=M[0, 0].real, rho10=M[1, 0])

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(1.0, 0.0)

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(0.0, 1.0)

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.rho00, np.conj(self.rho10)], [self.rho10, self.rho11]], dtype=complex)

    def __repr__(self):
        return f"QubitState(rho11={self.rho11:.12g}, rho00={self.rho00:.12g}, rho10={self.rho10:.12g})"


@dataclass(frozen=True, eq=False)
class FieldState:
    """Field-mode density matrix on ``|0>, ..., |n_max>``."""

    matrix: np.ndarray
    truncation_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        M = np.array(self.matrix, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise ValueError(f"field matrix must be square and non-empty, got shape {M.shape}")
        _check_hermitian(M, "field matrix")
        tr = np.trace(M).real
        if abs(tr - 1.0) > max(self.truncation_tol, _QUBIT_TOL):
            raise ValueError(f"field state has trace {tr!r}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_populations(cls, populations, truncation_tol: float = DEFAULT_TAIL_TOL) -> "FieldState":
        return cls(np.diag(np.asarray(populations, dtype=float)), truncation_tol)

    @classmethod
    def number(cls, n: int, n_max: int | None = None) -> "FieldState":
        n_max = n if n_max is None else n_max
        pops = np.zeros(n_max + 1)
        pops[n] = 1.0
        return cls.from_populations(pops)

    @property
    def n_max(self) -> int:
        return self.matrix.shape[0] - 1

    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def padded(self, n_max: int) -> "FieldState":
        if n_max < self.n_max:
            raise ValueError("cannot pad to a smaller truncation")
        M = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        M[: self.n_max + 1, : self.n_max + 1] = self.matrix
        return FieldState(M, self.truncation_tol)


@dataclass(frozen=True, eq=False)
class TotalState:
    """Density operator of qubit x field truncated at ``n_max``.

    ``matrix`` has dimension ``2 (n_max + 1)`` in the interleaved basis
    described in the module docstring.
    """

    n_max: int
    matrix: np.ndarray
    truncation_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        M = np.array(self.matrix, dtype=complex)
        dim = 2 * (self.n_max + 1)
        if self.n_max < 0 or M.shape != (dim, dim):
            raise ValueError(f"matrix shape {M.shape} does not match n_max={self.n_max} (dim {dim})")
        if not self.truncation_tol > 0:
            raise ValueError("truncation_tol must be positive")
        _check_hermitian(M, "total state")
        tr = np.trace(M).real
        if abs(tr - 1.0) > max(self.truncation_tol, _QUBIT_TOL):
            raise ValueError(f"total state has trace {tr!r}, outside truncation_tol={self.truncation_tol}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def coeff(self, alpha: int, n: int, beta: int, m: int) -> complex:
        """Coefficient of ``|alpha, n><beta, m|``; zero beyond the truncation."""
        if max(n, m) > self.n_max or min(n, m) < 0:
            return 0j
        return complex(self.matrix[_index(alpha, n), _index(beta, m)])

    def blocks(self) -> np.ndarray:
        """View of the coefficients as ``[n, alpha, m, beta]``."""
        N = self.n_max + 1
        return self.matrix.reshape(N, 2, N, 2)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def min_eigenvalue(self) -> float:
        return float(hermitian_eigenvalues(self.matrix)[0])

    def check_positive(self) -> None:
        lam = self.min_eigenvalue()
        if lam < -10.0 * self.truncation_tol:
            raise ValueError(f"total state is not positive: smallest eigenvalue {lam:.3e}")

    def padded(self, n_max: int) -> "TotalState":
        """Same operator embedded in a larger truncation."""
        if n_max < self.n_max:
            raise ValueError("cannot pad to a smaller truncation")
        dim = 2 * (n_max + 1)
        M = np.zeros((dim, dim), dtype=complex)
        M[: self.dim, : self.dim] = self.matrix
        return TotalState(n_max, M, self.truncation_tol)

    def weight_above(self, n: int) -> float:
        """Population of all basis states with field number greater than ``n``."""
        diag = self.matrix.diagonal().real
        return float(diag[2 * (n + 1):].sum())

    # plain-text dump: header "n_max truncation_tol", then "alpha n beta m re im"
    def dumps(self) -> str:
        out = io.StringIO()
        out.write(f"{self.n_max} {self.truncation_tol:.17g}\n")
        B = self.blocks()
        for n, alpha, m, beta in zip(*np.nonzero(B)):
            z = B[n, alpha, m, beta]
            out.write(f"{alpha} {n} {beta} {m} {z.real:.17g} {z.imag:.17g}\n")
        return out.getvalue()

    @classmethod
    def loads(cls, text: str) -> "TotalState":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise ValueError("empty state dump")
        head = lines[0].split()
        if len(head) != 2:
            raise ValueError(f"bad header line {lines[0]!r}; expected 'n_max truncation_tol'")
        n_max, tol = int(head[0]), float(head[1])
        N = n_max + 1
        B = np.zeros((N, 2, N, 2), dtype=complex)
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 6:
                raise ValueError(f"line {lineno}: expected 'alpha n beta m re im', got {ln!r}")
            alpha, n, beta, m = (int(x) for x in parts[:4])
            B[n, alpha, m, beta] = complex(float(parts[4]), float(parts[5]))
        return cls(n_max, B.reshape(2 * N, 2 * N), tol)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "TotalState":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def marginals(rho: TotalState) -> tuple[QubitState, FieldState]:
    """Partial traces ``(Tr_E rho, Tr_S rho)``."""
    B = rho.blocks()
    tr = rho.trace()
    qubit = np.einsum("nanb->ab", B) / tr
    field_m = np.einsum("nama->nm", B)
    return QubitState.from_matrix(qubit), FieldState(field_m, rho.truncation_tol)


def product_state(rho_S: QubitState, rho_E: FieldState) -> TotalState:
    """Tensor product with coefficients ``rho_{alpha beta} * rho^{nm}``."""
    M = np.kron(rho_E.matrix, rho_S.to_matrix())
    return TotalState(rho_E.n_max, M, rho_E.truncation_tol)


def product_of_marginals(rho: TotalState) -> TotalState:
    """``rho_S (x) rho_E`` built from the marginals of ``rho``."""
    rho_S, rho_E = marginals(rho)
    return product_state(rho_S, rho_E)


def pure_state(vector, n_max: int | None = None) -> TotalState:
    """Projector onto a state vector given in the interleaved basis."""
    v = np.asarray(vector, dtype=complex)
    if v.ndim != 1 or v.size % 2:
        raise ValueError("state vector must be 1-D with even length")
    norm = np.vdot(v, v).real
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state vector has norm^2 {norm!r}")
    n_max = v.size // 2 - 1 if n_max is None else n_max
    full = np.zeros(2 * (n_max + 1), dtype=complex)
    full[: v.size] = v
    return TotalState(n_max, np.outer(full, full.conj()))


def pure_entangled(alpha: complex, beta_amp: complex, n: int, m: int) -> TotalState:
    """Projector onto ``alpha |0, n> + beta_amp |1, m>``; ``n_max = max(n, m) + 1``."""
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be non-negative")
    norm = abs(alpha) ** 2 + abs(beta_amp) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, must be 1")
    n_max = max(n, m) + 1
    v = np.zeros(2 * (n_max + 1), dtype=complex)
    v[_index(0, n)] += alpha
    v[_index(1, m)] += beta_amp
    return TotalState(n_max, np.outer(v, v.conj()))


def dressed_state_vector(n: int, sign: int, p: ModelParams, n_max: int | None = None) -> np.ndarray:
    """Coefficient vector of ``|Phi_n^+>`` (``sign=+1``) or ``|Phi_n^->`` (``sign=-1``)."""
    n_max = n if n_max is None else n_max
    v = np.zeros(2 * (n_max + 1), dtype=complex)
    if n == 0:
        if sign > 0:
            raise ValueError("there is no |Phi_0^+> level")
        v[_index(0, 0)] = 1.0
        return v
    a, b, _, _ = dressed_arrays(n, p)
    if sign > 0:
        v[_index(1, n - 1)], v[_index(0, n)] = a[n], b[n]
    else:
        v[_index(1, n - 1)], v[_index(0, n)] = -b[n], a[n]
    return v


class GibbsCoefficients(NamedTuple):
    """Normalized Gibbs-state coefficients on the retained levels ``0..n_max``.

    ``p00[n] = rho^{nn}_{00}``, ``p11[n] = rho^{nn}_{11}`` and
    ``coherence[n] = rho^{n,n+1}_{10}`` for ``n = 0..n_max-1``.
    """

    n_max: int
    p00: np.ndarray
    p11: np.ndarray
    coherence: np.ndarray
    tail_tol: float

    def qubit_ground_population(self) -> float:
        return float(self.p00.sum())

    def field_populations(self) -> np.ndarray:
        return self.p00 + self.p11


def _gibbs_truncation(p: ModelParams, beta: float, tail_tol: float, max_n: int) -> int:
    k_ground = ground_level_index(p.g, p).k
    e_ground = lower_energy(k_ground, p)
    size = max(64, 2 * k_ground + 16)
    while True:
        a, b, Ep, Em = dressed_arrays(size, p)
        w = np.exp(-beta * (Em - e_ground)) + np.exp(-beta * (Ep - e_ground))
        z_partial = np.cumsum(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(z_partial[:-1] > 0, w[1:] / z_partial[:-1], np.inf)
        ok = np.nonzero((ratio < tail_tol) & (np.arange(size) >= k_ground))[0]
        if ok.size:
            n_max = int(ok[0])
            if n_max > max_n:
                break
            return n_max
        if size > max_n:
            break
        size *= 2
    raise ValueError(
        f"Gibbs state needs more than {max_n} Fock levels at beta={beta}, tail_tol={tail_tol}; "
        "use a larger tail_tol or a larger beta"
    )


def gibbs_coefficients(p: ModelParams, beta: float, tail_tol: float = DEFAULT_TAIL_TOL,
                       max_n: int = MAX_N) -> GibbsCoefficients:
    """Closed-form matrix elements of ``exp(-beta H) / Z`` in the bare basis.

    Boltzmann factors are taken relative to the ground energy so that large
    ``beta`` and strong coupling do not overflow.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    n_max = _gibbs_truncation(p, beta, tail_tol, max_n)
    e_ground = lower_energy(ground_level_index(p.g, p).k, p)
    a, b, Ep, Em = dressed_arrays(n_max + 1, p)
    wp = np.exp(-beta * (Ep - e_ground))
    wm = np.exp(-beta * (Em - e_ground))
    p00 = wp[: n_max + 1] * b[: n_max + 1] ** 2 + wm[: n_max + 1] * a[: n_max + 1] ** 2
    p11 = wp[1:] * a[1:] ** 2 + wm[1:] * b[1:] ** 2
    coh = (wp[1:n_max + 1] - wm[1:n_max + 1]) * a[1:n_max + 1] * b[1:n_max + 1]
    Z = p00.sum() + p11.sum()
    return GibbsCoefficients(n_max, p00 / Z, p11 / Z, coh / Z, tail_tol)


def gibbs_state(p: ModelParams, beta: float, tail_tol: float = DEFAULT_TAIL_TOL,
                max_n: int = MAX_N) -> TotalState:
    """Thermal state ``exp(-beta H) / Z`` truncated so the dropped weight is below ``tail_tol``."""
    gc = gibbs_coefficients(p, beta, tail_tol, max_n)
    N = gc.n_max + 1
    M = np.zeros((2 * N, 2 * N), dtype=complex)
    idx = np.arange(N)
    M[2 * idx, 2 * idx] = gc.p00
    M[2 * idx + 1, 2 * idx + 1] = gc.p11
    j = np.arange(N - 1)
    M[2 * j + 1, 2 * j + 2] = gc.coherence
    M[2 * j + 2, 2 * j + 1] = gc.coherence
    return TotalState(gc.n_max, M, tail_tol)


def random_state(rng: np.random.Generator, n_max: int, rank: int = 1,
                 support: int | None = None) -> TotalState:
    """Mixture of ``rank`` Haar-ish random pure states on levels ``0..support``.

    Used for property tests and the oracle harness.
    """
    support = n_max if support is None else support
    dim_s = 2 * (support + 1)
    weights = rng.dirichlet(np.ones(rank))
    M = np.zeros((2 * (n_max + 1),) * 2, dtype=complex)
    for w in weights:
        v = rng.normal(size=dim_s) + 1j * rng.normal(size=dim_s)
        v /= np.linalg.norm(v)
        M[:dim_s, :dim_s] += w * np.outer(v, v.conj())
    return TotalState(n_max, M / np.trace(M).real)
