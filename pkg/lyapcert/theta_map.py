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
"""Scalar dynamics of the normalized map along a line of slice points.

If X and Y are fixed points of f with normalizers λ and γ, then f maps the
line g(θ) = θX + (1 − θ)Y onto itself and acts on θ as

  θ ↦ θλ / (θλ + (1 − θ)γ).

In terms of the odds φ = θ/(1 − θ) this is the linear map φ ↦ (λ/γ)φ.
`cobweb_iterates` applies the map step by step; `escaping_start` inverts the
odds form to place a start a given number of steps from a target.
"""

from __future__ import annotations

import dataclasses

import gin
from lyapcert import errors
from lyapcert import linalg
from lyapcert import systems
import numpy as np


POLE_ATOL = 1e-300


@dataclasses.dataclass(frozen=True)
class ThetaMapParams:
  """Normalizers λ (of X) and γ (of Y), both strictly positive."""

  lam: float
  gamma: float

  def __post_init__(self):
    for name in ('lam', 'gamma'):
      value = getattr(self, name)
      if not (np.isfinite(value) and value > 0):
        raise errors.InputError(f'{name}={value!r} must be positive')


@dataclasses.dataclass(frozen=True, eq=False)
class CobwebResult:
  """Iterates θ_0 … θ_K of the θ-map.

  Attributes:
    thetas: the iterates; shorter than requested if iteration stopped early.
    diverged: True if |θ_k| exceeded the escape bound or a pole was hit.
    hit_pole: True if an iterate landed on the asymptote.
    passed_pole_at: index of the first iterate on the far side of the
      asymptote (the orbit has left every bounded segment of the line), or
      None.
  """

  thetas: np.ndarray
  diverged: bool
  hit_pole: bool
  passed_pole_at: int | None


def theta_map(params: ThetaMapParams, theta: float) -> float:
  """Evaluates θλ / (θλ + (1 − θ)γ), raising `PoleError` at the asymptote."""
  denominator = theta * params.lam + (1 - theta) * params.gamma
  if abs(denominator) <= POLE_ATOL:
    raise errors.PoleError(f'θ-map evaluated at its pole {theta=}')
  return theta * params.lam / denominator


def theta_pole(params: ThetaMapParams) -> float | None:
  """Returns the asymptote −γ/(λ − γ), or None when λ = γ."""
  if params.lam == params.gamma:
    return None
  return -params.gamma / (params.lam - params.gamma)


def theta_fixed_points(params: ThetaMapParams) -> tuple[float, ...] | None:
  """Returns the fixed points (0, 1), or None if every θ is fixed (λ = γ)."""
  if params.lam == params.gamma:
    return None
  return (0.0, 1.0)


def _beyond_pole(params: ThetaMapParams, theta: float) -> bool:
  pole = theta_pole(params)
  if pole is None:
    return False
  if params.lam > params.gamma:
    return theta < pole
  return theta > pole


@gin.configurable(allowlist=['escape_bound'])
def cobweb_iterates(
    params: ThetaMapParams,
    theta0: float,
    steps: int,
    escape_bound: float = 1e6,
) -> CobwebResult:
  """Iterates the θ-map `steps` times from `theta0`.

  Iteration stops early, flagging divergence, once |θ_k| exceeds
  `escape_bound` or an iterate hits the pole.

  Args:
    params: normalizers (λ, γ).
    theta0: starting point.
    steps: number of map applications.
    escape_bound: magnitude beyond which the orbit counts as escaped.

  Returns:
    The iterates with divergence flags.
  """
  if steps < 0:
    raise errors.InputError(f'{steps=} must be non-negative')
  thetas = [float(theta0)]
  diverged = abs(thetas[0]) > escape_bound
  hit_pole = False
  passed_pole_at = 0 if _beyond_pole(params, thetas[0]) else None
  for k in range(1, steps + 1):
    if diverged:
      break
    try:
      theta = theta_map(params, thetas[-1])
    except errors.PoleError:
      hit_pole = diverged = True
      break
    thetas.append(theta)
    if passed_pole_at is None and _beyond_pole(params, theta):
      passed_pole_at = k
    diverged = abs(theta) > escape_bound
  return CobwebResult(
      thetas=np.asarray(thetas),
      diverged=diverged,
      hit_pole=hit_pole,
      passed_pole_at=passed_pole_at,
  )


def escaping_start(params: ThetaMapParams, bound: float, steps: int) -> float:
  """Returns θ_0 < 0 whose iterate θ_steps equals −`bound`.

  For λ > γ such starts exist arbitrarily close to the repelling fixed point
  0, so iterates from the left of 0 grow without bound.

  Args:
    params: normalizers with λ > γ.
    bound: positive magnitude to reach.
    steps: number of iterations after which −`bound` is reached.

  Returns:
    The starting point θ_0.
  """
  if not params.lam > params.gamma:
    raise errors.InputError('escaping starts require lam > gamma')
  if not bound > 0:
    raise errors.InputError(f'{bound=} must be positive')
  odds_final = -bound / (1 + bound)
  odds0 = odds_final * (params.gamma / params.lam) ** steps
  return odds0 / (1 + odds0)


def line_coordinate(
    x: linalg.MatrixLike, y: linalg.MatrixLike, z: linalg.MatrixLike
) -> float:
  """Least-squares θ with z ≈ θX + (1 − θ)Y (the inverse of g)."""
  x, y, z = (np.asarray(m, dtype=np.float64) for m in (x, y, z))
  direction = x - y
  norm_sq = float(np.sum(direction**2))
  if norm_sq == 0:
    raise errors.InputError('X and Y must be distinct')
  return float(np.sum((z - y) * direction) / norm_sq)


def conjugated_theta(
    sys: systems.LtiSystem,
    alpha: float,
    x: linalg.MatrixLike,
    y: linalg.MatrixLike,
    theta: float,
) -> float:
  """Evaluates g⁻¹(f(g(θ))) with the matrix map f.

  g(θ) may leave the slice, so f is applied without slice checks; the
  normalizer may then be negative.

  Args:
    sys: system defining f.
    alpha: map parameter α.
    x: first point defining the line.
    y: second point defining the line.
    theta: coordinate along the line.

  Returns:
    The line coordinate of f(g(θ)).
  """
  x = linalg.as_square(x, 'X')
  y = linalg.as_square(y, 'Y')
  g = theta * x + (1 - theta) * y
  numerator = sys.a.T @ g @ sys.a + alpha * sys.output_gram
  lam = float(np.trace(numerator))
  if abs(lam) <= POLE_ATOL:
    raise errors.PoleError(f'normalizer vanishes at {theta=}')
  return line_coordinate(x, y, numerator / lam)
