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
"""Lyapunov solutions as fixed points of a trace-normalized map.

On the compact convex slice 𝒞 = {X ⪰ 0, tr X = 1} the map

  f(X) = (AᵀXA + αCᵀC) / λ,    λ = tr(AᵀXA + αCᵀC)

sends 𝒞 to itself for every α > 0. A fixed point X_α satisfies
(λ_α/α) X_α = Aᵀ(X_α/α)A + CᵀC, so Q = X_α/α solves the Lyapunov equation
exactly when λ_α = 1. This module iterates f (Picard iteration, jitted with
JAX), falls back to an affine-eigenproblem oracle when the iteration stalls,
and locates λ_α = 1 by bracketing and bisection on α.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Callable, Sequence

import gin
import jax
import jax.numpy as jnp
from lyapcert import errors
from lyapcert import linalg
from lyapcert import oracles
from lyapcert import systems
import numpy as np
from scipy import optimize


# pylint: disable=logging-fstring-interpolation

DENOMINATOR_FLOOR = 1e-300
SLICE_ATOL = 1e-10
# Map residual below which a slice-oracle point counts as a fixed point.
ORACLE_ACCEPT_TOL = 1e-9
# Second bisection pass on |λ − 1|, started next to the first α*.
REFINED_LAMBDA_TOL = 1e-13
REFINE_FACTOR = 1 + 1e-6
# Smallest relative tolerance brentq accepts.
BRENTQ_RTOL = 4 * np.finfo(float).eps


@dataclasses.dataclass(frozen=True, eq=False)
class FixedPointState:
  """A point on the unit-trace PSD slice produced by iterating the map.

  Attributes:
    x: slice point X (symmetric, PSD, unit trace).
    alpha: map parameter α > 0.
    lam: normalizer λ = tr(AᵀXA + αCᵀC) evaluated at `x`.
    iterations: number of map applications performed.
    map_residual: Frobenius norm ‖f(X) − X‖.
    converged: whether `map_residual` reached the requested tolerance.
    source: 'picard' or 'oracle', whichever produced `x`.
  """

  x: linalg.SymmetricMatrix
  alpha: float
  lam: float
  iterations: int
  map_residual: float
  converged: bool
  source: str = 'picard'


def check_alpha(alpha: float) -> float:
  alpha = float(alpha)
  if not alpha > 0 or not np.isfinite(alpha):
    raise errors.InputError(f'{alpha=} must be a finite positive number')
  return alpha


def check_slice_point(x: linalg.MatrixLike, n: int) -> np.ndarray:
  """Validates that `x` is an n×n symmetric PSD matrix with unit trace."""
  x = linalg.as_symmetric(x, 'X')
  if x.shape[0] != n:
    raise errors.DimensionError(f'X must be {n}x{n}, got shape {x.shape}')
  if abs(np.trace(x) - 1) > SLICE_ATOL:
    raise errors.InputError(f'X must have unit trace, got {np.trace(x)!r}')
  if linalg.min_eigenvalue(x) < -SLICE_ATOL:
    raise errors.InputError('X must be positive semi-definite')
  return linalg.symmetrize(x)


def find_normalizer(
    defect: Callable[[float], float], lower: float, upper: float
) -> float:
  """Root of a decreasing `defect` on the bracket [lower, upper]."""
  try:
    return optimize.brentq(
        defect, lower, upper, xtol=1e-15, rtol=BRENTQ_RTOL
    )
  except (RuntimeError, ValueError) as e:
    raise errors.NumericalFailureError(
        f'root find for λ failed on [{lower:.6g}, {upper:.6g}]: {e}'
    ) from e


def _apply_map(a, gram, alpha, x):
  """One application of f; returns the normalized matrix and its λ."""
  numerator = a.T @ x @ a + alpha * gram
  numerator = (numerator + numerator.T) / 2
  lam = jnp.trace(numerator)
  safe_lam = jnp.where(lam > DENOMINATOR_FLOOR, lam, 1.0)
  return numerator / safe_lam, lam


_apply_map_jit = jax.jit(_apply_map)


@jax.jit
def _picard_loop(a, gram, alpha, x0, tol, max_iter):
  """Iterates f from `x0` until successive iterates are within `tol`."""

  def cond_fn(carry):
    _, lam, residual, iteration = carry
    return (
        (residual > tol)
        & (iteration < max_iter)
        & (lam > DENOMINATOR_FLOOR)
    )

  def body_fn(carry):
    x, _, _, iteration = carry
    x_next, lam = _apply_map(a, gram, alpha, x)
    residual = jnp.linalg.norm(x_next - x)
    return x_next, lam, residual, iteration + 1

  inf = jnp.asarray(jnp.inf, dtype=x0.dtype)
  init = (x0, inf, inf, jnp.asarray(0, dtype=jnp.int64))
  return jax.lax.while_loop(cond_fn, body_fn, init)


_batched_picard_loop = jax.jit(
    jax.vmap(_picard_loop, in_axes=(None, None, None, 0, None, None))
)


def _evaluate(
    sys: systems.LtiSystem, alpha: float, x: np.ndarray
) -> tuple[np.ndarray, float]:
  x_next, lam = _apply_map_jit(sys.a, sys.output_gram, alpha, x)
  lam = float(lam)
  if not lam > DENOMINATOR_FLOOR:
    raise errors.DegenerateMapError(
        f'normalizer {lam=} vanishes; C = 0 and AᵀXA = 0 along the iteration'
    )
  return np.asarray(x_next), lam


def _finalize(
    sys: systems.LtiSystem,
    alpha: float,
    x: np.ndarray,
    iterations: int,
    tol: float,
    source: str = 'picard',
) -> FixedPointState:
  """Re-evaluates f at `x` so that λ and the residual describe `x` itself."""
  x = linalg.symmetrize(np.asarray(x))
  x_next, lam = _evaluate(sys, alpha, x)
  residual = float(np.linalg.norm(x_next - x))
  return FixedPointState(
      x=x,
      alpha=alpha,
      lam=lam,
      iterations=int(iterations),
      map_residual=residual,
      converged=residual <= tol,
      source=source,
  )


def default_start(n: int) -> np.ndarray:
  """The interior slice point I/n."""
  return np.eye(n) / n


def normalized_map(
    sys: systems.LtiSystem, alpha: float, x: linalg.MatrixLike
) -> tuple[np.ndarray, float]:
  """Applies f once to a slice point.

  Args:
    sys: system (A, C).
    alpha: map parameter α > 0.
    x: point on the unit-trace PSD slice.

  Returns:
    Tuple `(f(x), λ)` with λ = tr(AᵀxA + αCᵀC).

  Raises:
    DegenerateMapError: if λ is not above the denominator floor.
  """
  alpha = check_alpha(alpha)
  x = check_slice_point(x, sys.n)
  return _evaluate(sys, alpha, x)


@gin.configurable(allowlist=['tol', 'max_iter'])
def fixed_point_iterate(
    sys: systems.LtiSystem,
    alpha: float,
    x0: linalg.MatrixLike | None = None,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> FixedPointState:
  """Picard iteration X_{k+1} = f(X_k) on the slice.

  Convergence is not guaranteed by the existence argument, so failure to
  converge is reported through `FixedPointState.converged` rather than
  raised.

  Args:
    sys: system (A, C).
    alpha: map parameter α > 0.
    x0: starting slice point, defaults to I/n.
    tol: Frobenius tolerance on successive iterates.
    max_iter: maximum number of map applications.

  Returns:
    The last iterate with its λ and map residual.
  """
  alpha = check_alpha(alpha)
  x0 = default_start(sys.n) if x0 is None else check_slice_point(x0, sys.n)
  x, lam, _, iterations = _picard_loop(
      sys.a, sys.output_gram, alpha, x0, tol, max_iter
  )
  if not float(lam) > DENOMINATOR_FLOOR:
    raise errors.DegenerateMapError(
        f'normalizer lam={float(lam)} vanished during iteration'
    )
  state = _finalize(sys, alpha, x, iterations, tol)
  if not state.converged:
    logging.warning(
        f'Picard iteration did not converge: {alpha=}, '
        f'{state.iterations=}, {state.map_residual=:.3e}'
    )
  return state


def random_slice_points(key: jax.Array, n: int, count: int) -> np.ndarray:
  """Draws `count` random slice points as trace-normalized Gram matrices."""
  g = jax.random.normal(key, (count, n, n), dtype=jnp.float64)
  gram = g @ jnp.swapaxes(g, -1, -2)
  traces = jnp.trace(gram, axis1=-2, axis2=-1)
  return np.asarray(gram / traces[:, None, None])


@gin.configurable(allowlist=['tol', 'max_iter'])
def fixed_points_from_starts(
    sys: systems.LtiSystem,
    alpha: float,
    starts: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> list[FixedPointState]:
  """Runs Picard iteration from each of `starts` (shape (count, n, n))."""
  alpha = check_alpha(alpha)
  starts = np.asarray(starts, dtype=np.float64)
  if starts.ndim != 3 or starts.shape[1:] != (sys.n, sys.n):
    raise errors.DimensionError(
        f'starts must have shape (count, {sys.n}, {sys.n}), got {starts.shape}'
    )
  for start in starts:
    check_slice_point(start, sys.n)
  xs, _, _, iterations = _batched_picard_loop(
      sys.a, sys.output_gram, alpha, starts, tol, max_iter
  )
  return [
      _finalize(sys, alpha, x, it, tol)
      for x, it in zip(np.asarray(xs), np.asarray(iterations))
  ]


@gin.configurable(allowlist=['max_doublings'])
def slice_oracle(
    sys: systems.LtiSystem,
    alpha: float,
    max_doublings: int = 200,
) -> FixedPointState:
  """Computes X_α directly from the affine eigenproblem λX = L(X) + αCᵀC.

  With L = Aᵀ⊗Aᵀ acting on row-major vec(X), the fixed point is
  X(λ) = α(λI − L)⁻¹ vec(CᵀC) at the unique λ > ρ(A)² with tr X(λ) = 1,
  found by a 1-D root find.

  Args:
    sys: system (A, C).
    alpha: map parameter α > 0.
    max_doublings: cap on upper-bracket doublings.

  Returns:
    Fixed point state with `source='oracle'`.

  Raises:
    NumericalFailureError: if no root exists above ρ(A)² (e.g. the dominant
      mode of the Stein operator is unobservable or C = 0).
  """
  alpha = check_alpha(alpha)
  n = sys.n
  stein = oracles.stein_operator(sys)
  rhs = sys.output_gram.reshape(-1)
  identity = np.eye(n * n)
  rho = linalg.spectral_radius(sys.a) ** 2

  def resolvent(lam):
    return alpha * np.linalg.solve(lam * identity - stein, rhs).reshape(n, n)

  def trace_defect(lam):
    return float(np.trace(resolvent(lam))) - 1.0

  lower = rho * (1 + 1e-9) + 1e-12
  upper = rho + alpha * float(np.trace(sys.output_gram)) + 1.0
  if not trace_defect(lower) > 0:
    raise errors.NumericalFailureError(
        f'slice oracle found no root above rho(A)^2={rho:.6g} for {alpha=}'
    )
  for _ in range(max_doublings):
    if trace_defect(upper) < 0:
      break
    upper *= 2
  else:
    raise errors.NumericalFailureError('slice oracle failed to bracket λ')
  lam = find_normalizer(trace_defect, lower, upper)
  x = linalg.symmetrize(resolvent(lam))
  x /= np.trace(x)
  state = _finalize(sys, alpha, x, 0, ORACLE_ACCEPT_TOL, source='oracle')
  if not state.converged:
    raise errors.NumericalFailureError(
        f'slice oracle point has map residual {state.map_residual:.3e}'
    )
  return state


def solve_fixed_point(
    sys: systems.LtiSystem,
    alpha: float,
    x0: linalg.MatrixLike | None = None,
) -> FixedPointState:
  """Picard iteration with the slice oracle as fallback."""
  state = fixed_point_iterate(sys, alpha, x0)
  if state.converged:
    return state
  logging.info(f'falling back to the slice oracle for {alpha=}')
  return slice_oracle(sys, alpha)


def lambda_of_alpha(
    sys: systems.LtiSystem,
    alpha: float,
    x0: linalg.MatrixLike | None = None,
) -> float:
  """Returns λ_α at the converged fixed point for this α."""
  return solve_fixed_point(sys, alpha, x0).lam


def lambda_sweep(
    sys: systems.LtiSystem, alphas: Sequence[float]
) -> np.ndarray:
  """Evaluates α ↦ λ_α on a grid, warm-starting from the previous point."""
  lams = []
  x = None
  for alpha in alphas:
    state = solve_fixed_point(sys, alpha, x)
    lams.append(state.lam)
    x = state.x
  return np.asarray(lams)


@gin.configurable(allowlist=['tol', 'max_bracket', 'max_bisect'])
def bisect_alpha(
    lambda_fn: Callable[[float], float],
    tol: float = 1e-10,
    max_bracket: int = 200,
    max_bisect: int = 200,
    alpha0: float = 1.0,
    factor: float = 2.0,
) -> tuple[float, float]:
  """Finds α* with |λ(α*) − 1| ≤ tol for a continuous increasing λ(α).

  Starting at `alpha0` the bracket is grown by multiplying with `factor`
  (λ ≥ α·tr(CᵀC) makes this terminate) or shrunk by dividing by it
  (asymptotic stability makes λ < 1 for small α), and is then bisected.

  Args:
    lambda_fn: maps α > 0 to λ_α.
    tol: tolerance on |λ − 1|.
    max_bracket: cap on bracket expansions.
    max_bisect: cap on bisection steps.
    alpha0: initial α.
    factor: bracket expansion factor, greater than one.

  Returns:
    Tuple `(alpha_star, lambda_at_alpha_star)`.

  Raises:
    NumericalFailureError: if bracketing or bisection runs out of steps.
  """
  if not factor > 1:
    raise errors.InputError(f'{factor=} must exceed one')
  alpha = check_alpha(alpha0)
  lam = lambda_fn(alpha)
  if abs(lam - 1) <= tol:
    return alpha, lam
  if lam < 1:
    lower = alpha
    for _ in range(max_bracket):
      alpha *= factor
      lam = lambda_fn(alpha)
      if lam >= 1:
        break
      lower = alpha
    else:
      raise errors.NumericalFailureError(
          f'λ_α stayed below 1 after {max_bracket} expansions ({alpha=})'
      )
    upper = alpha
  else:
    upper = alpha
    for _ in range(max_bracket):
      alpha /= factor
      lam = lambda_fn(alpha)
      if lam <= 1:
        break
      upper = alpha
    else:
      raise errors.NumericalFailureError(
          f'λ_α stayed above 1 after {max_bracket} contractions ({alpha=}); '
          'is the system asymptotically stable?'
      )
    lower = alpha
  logging.info(f'bracketed λ_α = 1 in α ∈ [{lower:.6g}, {upper:.6g}]')

  for _ in range(max_bisect):
    if abs(lam - 1) <= tol:
      return alpha, lam
    alpha = (lower + upper) / 2
    lam = lambda_fn(alpha)
    if lam < 1:
      lower = alpha
    else:
      upper = alpha
  if abs(lam - 1) <= tol:
    return alpha, lam
  raise errors.NumericalFailureError(
      f'bisection stopped at {alpha=} with |λ − 1| = {abs(lam - 1):.3e}'
  )


def solve_via_alpha_bisection(
    sys: systems.LtiSystem,
    tol: float | None = None,
) -> oracles.LyapunovSolution:
  """Solves the Lyapunov equation by locating λ_α = 1.

  Args:
    sys: asymptotically stable and observable system (A, C).
    tol: tolerance on |λ − 1|; defaults to the gin-configured value of
      `bisect_alpha`.

  Returns:
    Q = X_α*/α* with residual and definiteness evidence.

  Raises:
    PreconditionError: if `sys` is not stable and observable.
    NumericalFailureError: if bracketing fails or the residual is too large.
  """
  stability = systems.is_asymptotically_stable(sys)
  observability = systems.is_observable(sys)
  if not (stability.stable and observability.observable):
    raise errors.PreconditionError(
        'fixed-point solution requires a stable and observable system, got '
        f'{stability=}, {observability=}'
    )

  last = {'x': None, 'state': None, 'iterations': 0}

  def lambda_fn(alpha):
    state = solve_fixed_point(sys, alpha, last['x'])
    last['x'] = state.x
    last['state'] = state
    last['iterations'] += state.iterations
    return state.lam

  kwargs = {} if tol is None else {'tol': tol}
  alpha_star, lam = bisect_alpha(lambda_fn, **kwargs)
  state = last['state']
  solution = oracles.make_solution(
      sys,
      state.x / alpha_star,
      oracles.Method.FIXED_POINT,
      alpha=alpha_star,
      iterations=last['iterations'],
  )
  accept = oracles.accept_tolerance(sys)
  if solution.residual > accept:
    # Residual ≈ (λ − 1)Q; the oracle resolves λ_α to rounding.
    logging.info(
        f'refining alpha*={alpha_star:.17g} with the slice oracle, '
        f'residual={solution.residual:.3e}'
    )

    def oracle_lambda_fn(alpha):
      state = slice_oracle(sys, alpha)
      last['state'] = state
      return state.lam

    alpha_star, lam = bisect_alpha(
        oracle_lambda_fn,
        tol=REFINED_LAMBDA_TOL,
        alpha0=alpha_star,
        factor=REFINE_FACTOR,
    )
    solution = oracles.make_solution(
        sys,
        last['state'].x / alpha_star,
        oracles.Method.FIXED_POINT,
        alpha=alpha_star,
        iterations=last['iterations'],
    )
  logging.info(
      f'fixed-point solution: alpha*={alpha_star:.17g}, lambda={lam:.17g}, '
      f'residual={solution.residual:.3e}'
  )
  if solution.residual > accept:
    raise errors.NumericalFailureError(
        f'fixed-point residual {solution.residual:.3e} exceeds {accept:.3e}'
    )
  return solution


def unrolled_chain_check(
    sys: systems.LtiSystem, fp: FixedPointState, steps: int
) -> float:
  """Frobenius defect of the fixed point pushed through f `steps + 1` times.

  Returns ‖X − [λ^{−(n+1)} (A^{n+1})ᵀ X A^{n+1}
  + Σ_{k=0..n} α λ^{−(k+1)} (CAᵏ)ᵀ(CAᵏ)]‖ with n = `steps`, which vanishes
  for an exact fixed point.
  """
  if steps < 0:
    raise errors.InputError(f'{steps=} must be non-negative')
  x, lam, alpha = fp.x, fp.lam, fp.alpha
  total = np.zeros_like(x)
  ca = sys.c
  a_power = np.eye(sys.n)
  for k in range(steps + 1):
    total += alpha / lam ** (k + 1) * (ca.T @ ca)
    ca = ca @ sys.a
    a_power = a_power @ sys.a
  total += a_power.T @ x @ a_power / lam ** (steps + 1)
  return float(np.linalg.norm(x - total))
