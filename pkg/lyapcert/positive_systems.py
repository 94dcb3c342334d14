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
"""Linear certificates for internally positive systems.

For A ≥ 0 and a single nonnegative output row c the nonnegative orthant is
invariant, and the quadratic Lyapunov function xᵀQx is replaced by the
linear one q·x with

  q = c + qA,   i.e.   q = c(I − A)⁻¹.

The unit simplex takes the role of the unit-trace PSD slice, and the map

  f(x) = (xA + αc) / λ,   λ = Σ_k (xA + αc)_k

takes the role of the normalized matrix map. Vectors are rows throughout.
"""

from __future__ import annotations

import dataclasses
import logging

import gin
import jax
import jax.numpy as jnp
from lyapcert import errors
from lyapcert import fixed_point
from lyapcert import linalg
from lyapcert import systems
import numpy as np


# pylint: disable=logging-fstring-interpolation

SimplexPoint = np.ndarray

SIMPLEX_SUM_ATOL = 1e-12
SIMPLEX_ENTRY_ATOL = 1e-14
POSITIVITY_RTOL = 1e-9
ACCEPT_RTOL = 1e-8


@dataclasses.dataclass(frozen=True, eq=False)
class PositiveSystem:
  """Internally positive system `x_{k+1} = A x_k`, `y_k = c x_k`.

  Attributes:
    a: entrywise nonnegative matrix of shape (n, n).
    c: entrywise nonnegative, nonzero output row of length n.
  """

  a: linalg.Matrix
  c: linalg.Vector

  def __post_init__(self):
    a = linalg.as_square(self.a, 'A')
    c = linalg.as_vector(self.c, 'c')
    if c.shape[0] != a.shape[0]:
      raise errors.DimensionError(
          f'c must have length {a.shape[0]} to match A, got {c.shape[0]}'
      )
    if np.any(a < 0):
      raise errors.InputError('A must be entrywise nonnegative')
    if np.any(c < 0):
      raise errors.InputError('c must be entrywise nonnegative')
    if not np.any(c > 0):
      raise errors.InputError('c must be nonzero')
    object.__setattr__(self, 'a', a)
    object.__setattr__(self, 'c', c)

  @property
  def n(self) -> int:
    return self.a.shape[0]

  def as_lti(self) -> systems.LtiSystem:
    """Returns the same system with c as a 1×n output matrix."""
    return systems.LtiSystem(a=self.a, c=self.c[np.newaxis, :])


@dataclasses.dataclass(frozen=True, eq=False)
class SimplexState:
  """A point on the unit simplex produced by iterating the simplex map."""

  x: SimplexPoint
  alpha: float
  lam: float
  iterations: int
  map_residual: float
  converged: bool
  source: str = 'picard'


@dataclasses.dataclass(frozen=True, eq=False)
class PositiveCertificate:
  """Linear certificate q with its evidence.

  Attributes:
    q: row vector solving q = c + qA.
    residual: Euclidean norm of q − c − qA.
    positive: whether every entry of q exceeds the positivity tolerance.
    min_entry: smallest entry of q.
    alpha: scaling α* with λ_α* = 1, if obtained by α-bisection.
  """

  q: linalg.Vector
  residual: float
  positive: bool
  min_entry: float
  alpha: float | None = None


def check_simplex_point(x, n: int) -> SimplexPoint:
  """Validates that `x` is a nonnegative length-n vector summing to one."""
  x = linalg.as_vector(x, 'x')
  if x.shape[0] != n:
    raise errors.DimensionError(f'x must have length {n}, got {x.shape[0]}')
  if abs(np.sum(x) - 1) > SIMPLEX_SUM_ATOL:
    raise errors.InputError(f'x must sum to one, got {np.sum(x)!r}')
  if np.min(x) < -SIMPLEX_ENTRY_ATOL:
    raise errors.InputError('x must be entrywise nonnegative')
  return x


def positivity_tolerance(q: linalg.Vector) -> float:
  return POSITIVITY_RTOL * max(1.0, float(np.max(np.abs(q))))


def _apply_simplex_map(a, c, alpha, x):
  numerator = x @ a + alpha * c
  lam = jnp.sum(numerator)
  safe_lam = jnp.where(lam > fixed_point.DENOMINATOR_FLOOR, lam, 1.0)
  return numerator / safe_lam, lam


_apply_simplex_map_jit = jax.jit(_apply_simplex_map)


@jax.jit
def _simplex_loop(a, c, alpha, x0, tol, max_iter):
  """Iterates the simplex map until successive iterates are within `tol`."""

  def cond_fn(carry):
    _, lam, residual, iteration = carry
    return (
        (residual > tol)
        & (iteration < max_iter)
        & (lam > fixed_point.DENOMINATOR_FLOOR)
    )

  def body_fn(carry):
    x, _, _, iteration = carry
    x_next, lam = _apply_simplex_map(a, c, alpha, x)
    return x_next, lam, jnp.linalg.norm(x_next - x), iteration + 1

  inf = jnp.asarray(jnp.inf, dtype=x0.dtype)
  init = (x0, inf, inf, jnp.asarray(0, dtype=jnp.int64))
  return jax.lax.while_loop(cond_fn, body_fn, init)


def _evaluate(ps: PositiveSystem, alpha: float, x: np.ndarray):
  x_next, lam = _apply_simplex_map_jit(ps.a, ps.c, alpha, x)
  lam = float(lam)
  if not lam > fixed_point.DENOMINATOR_FLOOR:
    raise errors.DegenerateMapError(f'simplex normalizer {lam=} vanishes')
  return np.asarray(x_next), lam


def _finalize(ps, alpha, x, iterations, tol, source='picard') -> SimplexState:
  x = np.asarray(x)
  x_next, lam = _evaluate(ps, alpha, x)
  residual = float(np.linalg.norm(x_next - x))
  return SimplexState(
      x=x,
      alpha=alpha,
      lam=lam,
      iterations=int(iterations),
      map_residual=residual,
      converged=residual <= tol,
      source=source,
  )


def simplex_map(
    ps: PositiveSystem, alpha: float, x: SimplexPoint
) -> tuple[SimplexPoint, float]:
  """Applies f(x) = (xA + αc)/λ once; returns `(f(x), λ)`."""
  alpha = fixed_point.check_alpha(alpha)
  x = check_simplex_point(x, ps.n)
  return _evaluate(ps, alpha, x)


@gin.configurable(allowlist=['tol', 'max_iter'])
def simplex_fixed_point(
    ps: PositiveSystem,
    alpha: float,
    x0: SimplexPoint | None = None,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> SimplexState:
  """Iterates the simplex map from `x0` (default: the barycenter)."""
  alpha = fixed_point.check_alpha(alpha)
  if x0 is None:
    x0 = np.full(ps.n, 1 / ps.n)
  else:
    x0 = check_simplex_point(x0, ps.n)
  x, lam, _, iterations = _simplex_loop(ps.a, ps.c, alpha, x0, tol, max_iter)
  if not float(lam) > fixed_point.DENOMINATOR_FLOOR:
    raise errors.DegenerateMapError(
        f'simplex normalizer lam={float(lam)} vanished during iteration'
    )
  state = _finalize(ps, alpha, x, iterations, tol)
  if not state.converged:
    logging.warning(
        f'simplex iteration did not converge: {alpha=}, '
        f'{state.map_residual=:.3e}'
    )
  return state


@gin.configurable(allowlist=['max_doublings'])
def simplex_oracle(
    ps: PositiveSystem, alpha: float, max_doublings: int = 200
) -> SimplexState:
  """Solves λx = xA + αc with Σx = 1 by a root find on λ > ρ(A)."""
  alpha = fixed_point.check_alpha(alpha)
  rho = linalg.spectral_radius(ps.a)
  identity = np.eye(ps.n)

  def resolvent(lam):
    return alpha * np.linalg.solve((lam * identity - ps.a).T, ps.c)

  def sum_defect(lam):
    return float(np.sum(resolvent(lam))) - 1.0

  lower = rho * (1 + 1e-9) + 1e-12
  upper = rho + alpha * float(np.sum(ps.c)) + 1.0
  if not sum_defect(lower) > 0:
    raise errors.NumericalFailureError(
        f'simplex oracle found no root above rho(A)={rho:.6g} for {alpha=}'
    )
  for _ in range(max_doublings):
    if sum_defect(upper) < 0:
      break
    upper *= 2
  else:
    raise errors.NumericalFailureError('simplex oracle failed to bracket λ')
  lam = fixed_point.find_normalizer(sum_defect, lower, upper)
  x = resolvent(lam)
  x /= np.sum(x)
  state = _finalize(ps, alpha, x, 0, fixed_point.ORACLE_ACCEPT_TOL, 'oracle')
  if not state.converged:
    raise errors.NumericalFailureError(
        f'simplex oracle point has map residual {state.map_residual:.3e}'
    )
  return state


def solve_simplex_fixed_point(
    ps: PositiveSystem, alpha: float, x0: SimplexPoint | None = None
) -> SimplexState:
  state = simplex_fixed_point(ps, alpha, x0)
  if state.converged:
    return state
  logging.info(f'falling back to the simplex oracle for {alpha=}')
  return simplex_oracle(ps, alpha)


def is_positive_observable(ps: PositiveSystem) -> systems.ObservabilityVerdict:
  """Rank test on [c; cA; …; cA^{n-1}]."""
  return systems.is_observable(ps.as_lti())


def _certificate(ps, q, alpha=None) -> PositiveCertificate:
  residual = float(np.linalg.norm(q - ps.c - q @ ps.a))
  return PositiveCertificate(
      q=q,
      residual=residual,
      positive=bool(np.all(q > positivity_tolerance(q))),
      min_entry=float(np.min(q)),
      alpha=alpha,
  )


def solve_positive_q(ps: PositiveSystem) -> PositiveCertificate:
  """Solves q(I − A) = c by a direct linear solve.

  Args:
    ps: positive system with ρ(A) < 1.

  Returns:
    The certificate q with residual and positivity verdict.

  Raises:
    PreconditionError: if ρ(A) ≥ 1.
  """
  verdict = systems.is_asymptotically_stable(ps.as_lti())
  if not verdict.stable:
    raise errors.PreconditionError(
        'positive certificate requires rho(A) < 1, got '
        f'{verdict.spectral_radius:.17g}'
    )
  q = linalg.linear_solve((np.eye(ps.n) - ps.a).T, ps.c)
  return _certificate(ps, q)


def solve_positive_via_alpha_bisection(
    ps: PositiveSystem, tol: float | None = None
) -> PositiveCertificate:
  """Finds α* with λ_α* = 1 on the simplex and returns q = x_α*/α*.

  Args:
    ps: asymptotically stable and observable positive system.
    tol: tolerance on |λ − 1|; defaults to the gin-configured value of
      `bisect_alpha`.

  Returns:
    The certificate q with residual and positivity verdict.

  Raises:
    PreconditionError: if `ps` is not stable and observable.
    NumericalFailureError: if bracketing fails or the residual is too large.
  """
  stability = systems.is_asymptotically_stable(ps.as_lti())
  observability = is_positive_observable(ps)
  if not (stability.stable and observability.observable):
    raise errors.PreconditionError(
        'simplex solution requires a stable and observable system, got '
        f'{stability=}, {observability=}'
    )
  last = {'x': None, 'state': None}

  def lambda_fn(alpha):
    state = solve_simplex_fixed_point(ps, alpha, last['x'])
    last['x'] = state.x
    last['state'] = state
    return state.lam

  kwargs = {} if tol is None else {'tol': tol}
  alpha_star, _ = fixed_point.bisect_alpha(lambda_fn, **kwargs)
  certificate = _certificate(ps, last['state'].x / alpha_star, alpha_star)
  accept = ACCEPT_RTOL * max(1.0, float(np.sum(np.abs(certificate.q))))
  if certificate.residual > accept:
    raise errors.NumericalFailureError(
        f'simplex certificate residual {certificate.residual:.3e} exceeds '
        f'{accept:.3e}'
    )
  return certificate


def linear_lyapunov_decrease(
    ps: PositiveSystem, q: linalg.Vector, x0: linalg.Vector, steps: int
) -> np.ndarray:
  """Returns `q·x_{k+1} − q·x_k + y_k` for k < steps; zero when q = c + qA."""
  q = linalg.as_vector(q, 'q')
  if q.shape[0] != ps.n:
    raise errors.DimensionError(f'q must have length {ps.n}, got {q.shape}')
  traj = systems.simulate(ps.as_lti(), x0, steps)
  v = traj.states @ q
  return v[1:] - v[:-1] + traj.outputs[:-1, 0]
