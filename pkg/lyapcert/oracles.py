# Copyright 2026 The lyapcert Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Direct solvers for the discrete Lyapunov equation AᵀQA − Q + CᵀC = 0.

These are independent of the fixed-point construction in `fixed_point.py`
and serve as oracles for it: a Kronecker-vectorized linear solve and the
truncated observability Gramian series.
"""

from __future__ import annotations

import dataclasses
import enum
import logging

import gin
from lyapcert import errors
from lyapcert import linalg
from lyapcert import systems
import numpy as np


# pylint: disable=logging-fstring-interpolation

ACCEPT_RTOL = 1e-8


class Method(enum.Enum):
  FIXED_POINT = 'fixed-point'
  DIRECT = 'direct'
  SERIES = 'series'


class Definiteness(enum.Enum):
  PD = 'PD'
  PSD_SINGULAR = 'PSD-singular'
  INDEFINITE = 'indefinite'


@dataclasses.dataclass(frozen=True, eq=False)
class LyapunovSolution:
  """A candidate solution Q together with its numerical evidence.

  Attributes:
    q: symmetric solution matrix.
    residual: Frobenius norm of AᵀQA − Q + CᵀC.
    method: solver that produced `q`.
    definiteness: PD / PSD-singular / indefinite verdict on `q`.
    min_eigenvalue: smallest eigenvalue of `q`, the evidence for the verdict.
    alpha: scaling α* with λ_α* = 1 (fixed-point method only).
    iterations: series terms or total Picard iterations used, if applicable.
  """

  q: linalg.SymmetricMatrix
  residual: float
  method: Method
  definiteness: Definiteness
  min_eigenvalue: float
  alpha: float | None = None
  iterations: int | None = None

  @property
  def is_positive_definite(self) -> bool:
    return self.definiteness is Definiteness.PD


def lyapunov_residual(sys: systems.LtiSystem, q: linalg.MatrixLike) -> float:
  """Returns the Frobenius norm of AᵀQA − Q + CᵀC."""
  q = linalg.as_square(q, 'Q')
  if q.shape[0] != sys.n:
    raise errors.DimensionError(f'{q.shape=} does not match {sys.n=}')
  return float(np.linalg.norm(sys.a.T @ q @ sys.a - q + sys.output_gram))


def accept_tolerance(sys: systems.LtiSystem) -> float:
  """Largest residual accepted for a solution: 1e-8 · max(1, ‖CᵀC‖_F)."""
  return ACCEPT_RTOL * max(1.0, float(np.linalg.norm(sys.output_gram)))


def classify_definiteness(q: linalg.MatrixLike) -> tuple[Definiteness, float]:
  """Returns the definiteness verdict on `q` and its smallest eigenvalue."""
  min_eig = linalg.min_eigenvalue(q)
  tol = linalg.definiteness_tolerance(q)
  if min_eig > tol:
    verdict = Definiteness.PD
  elif min_eig >= -tol:
    verdict = Definiteness.PSD_SINGULAR
  else:
    verdict = Definiteness.INDEFINITE
  return verdict, min_eig


def make_solution(
    sys: systems.LtiSystem,
    q: linalg.MatrixLike,
    method: Method,
    alpha: float | None = None,
    iterations: int | None = None,
) -> LyapunovSolution:
  """Symmetrizes `q` and attaches residual and definiteness evidence."""
  q = linalg.symmetrize(linalg.as_square(q, 'Q'))
  definiteness, min_eig = classify_definiteness(q)
  return LyapunovSolution(
      q=q,
      residual=lyapunov_residual(sys, q),
      method=method,
      definiteness=definiteness,
      min_eigenvalue=min_eig,
      alpha=alpha,
      iterations=iterations,
  )


def stein_operator(sys: systems.LtiSystem) -> linalg.Matrix:
  """Returns L = Aᵀ⊗Aᵀ, so that vec(AᵀXA) = L vec(X) for row-major vec."""
  return linalg.kron(sys.a.T, sys.a.T)


def solve_direct(sys: systems.LtiSystem) -> LyapunovSolution:
  """Solves (I − Aᵀ⊗Aᵀ) vec(Q) = vec(CᵀC).

  Args:
    sys: system (A, C).

  Returns:
    Symmetrized solution with residual and definiteness evidence.

  Raises:
    SingularSystemError: if λᵢλⱼ = 1 for a pair of eigenvalues of A.
    NumericalFailureError: if the residual exceeds the acceptance tolerance.
  """
  n = sys.n
  lhs = np.eye(n * n) - stein_operator(sys)
  vec_q = linalg.linear_solve(lhs, sys.output_gram.reshape(-1))
  solution = make_solution(sys, vec_q.reshape(n, n), Method.DIRECT)
  if solution.residual > accept_tolerance(sys):
    raise errors.NumericalFailureError(
        f'direct solve residual {solution.residual:.3e} exceeds '
        f'{accept_tolerance(sys):.3e}'
    )
  return solution


@gin.configurable(allowlist=['tol', 'max_terms'])
def solve_series(
    sys: systems.LtiSystem,
    tol: float = 1e-12,
    max_terms: int = 100_000,
) -> LyapunovSolution:
  """Sums the observability Gramian Q = Σ_k (CAᵏ)ᵀ(CAᵏ).

  The partial sum S_K satisfies AᵀS_KA − S_K + CᵀC = T_{K+1}, the next term,
  so summation stops once a term drops below both the geometric tail bound
  `tol · (1 − ρ(A)²)` and the acceptance tolerance.

  Args:
    sys: asymptotically stable system (A, C).
    tol: tail tolerance.
    max_terms: maximum number of terms to sum.

  Returns:
    Truncated Gramian with residual and definiteness evidence.

  Raises:
    PreconditionError: if A is not asymptotically stable.
    NumericalFailureError: if `max_terms` terms do not suffice.
  """
  verdict = systems.is_asymptotically_stable(sys)
  if not verdict.stable:
    raise errors.PreconditionError(
        'series solution requires an asymptotically stable system, got '
        f'spectral radius {verdict.spectral_radius:.17g}'
    )
  threshold = min(
      tol * (1 - verdict.spectral_radius**2), accept_tolerance(sys)
  )
  q = np.zeros((sys.n, sys.n))
  ca = sys.c
  for k in range(max_terms):
    term = ca.T @ ca
    q += term
    ca = ca @ sys.a
    next_term_norm = float(np.linalg.norm(ca.T @ ca))
    if next_term_norm < threshold:
      logging.info(f'Gramian series converged after {k + 1} terms')
      return make_solution(sys, q, Method.SERIES, iterations=k + 1)
  raise errors.NumericalFailureError(
      f'Gramian series did not converge within {max_terms=} terms'
  )
