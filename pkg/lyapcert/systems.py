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
"""Discrete-time linear systems and their stability/observability tests.

Two system types are supported:

  LtiSystem:      x_{k+1} = A x_k,          y_k = C x_k
  ControlSystem:  x_{k+1} = A x_k + B u_k

A `ControlSystem` is analysed through its dual `LtiSystem` (Aᵀ, Bᵀ), so the
same Lyapunov machinery answers both the observability and the
controllability version of the stability triad.
"""

from __future__ import annotations

import dataclasses

from lyapcert import errors
from lyapcert import linalg
import numpy as np


Matrix = linalg.Matrix

# A system is asymptotically stable iff spectral_radius(A) < 1 - margin.
STABILITY_MARGIN = 0.0


@dataclasses.dataclass(frozen=True, eq=False)
class LtiSystem:
  """Autonomous system `x_{k+1} = A x_k`, `y_k = C x_k`.

  Attributes:
    a: state transition matrix of shape (n, n).
    c: output matrix of shape (p, n).
  """

  a: Matrix
  c: Matrix

  def __post_init__(self):
    a = linalg.as_square(self.a, 'A')
    c = linalg.as_matrix(self.c, 'C')
    if c.shape[1] != a.shape[0]:
      raise errors.DimensionError(
          f'C must have {a.shape[0]} columns to match A, got shape {c.shape}'
      )
    object.__setattr__(self, 'a', a)
    object.__setattr__(self, 'c', c)

  @property
  def n(self) -> int:
    return self.a.shape[0]

  @property
  def p(self) -> int:
    return self.c.shape[0]

  @property
  def output_gram(self) -> Matrix:
    """Returns CᵀC."""
    return self.c.T @ self.c


@dataclasses.dataclass(frozen=True, eq=False)
class ControlSystem:
  """Driven system `x_{k+1} = A x_k + B u_k`."""

  a: Matrix
  b: Matrix

  def __post_init__(self):
    a = linalg.as_square(self.a, 'A')
    b = linalg.as_matrix(self.b, 'B')
    if b.shape[0] != a.shape[0]:
      raise errors.DimensionError(
          f'B must have {a.shape[0]} rows to match A, got shape {b.shape}'
      )
    object.__setattr__(self, 'a', a)
    object.__setattr__(self, 'b', b)

  @property
  def n(self) -> int:
    return self.a.shape[0]


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
  """States `x_0 … x_N` (shape (N+1, n)) and outputs (shape (N+1, p))."""

  states: np.ndarray
  outputs: np.ndarray

  def __len__(self) -> int:
    return self.states.shape[0]


@dataclasses.dataclass(frozen=True)
class StabilityVerdict:
  stable: bool
  spectral_radius: float


@dataclasses.dataclass(frozen=True)
class ObservabilityVerdict:
  observable: bool
  rank: int
  n: int


def is_asymptotically_stable(sys: LtiSystem) -> StabilityVerdict:
  """Tests whether all eigenvalues of A lie strictly inside the unit circle."""
  radius = linalg.spectral_radius(sys.a)
  return StabilityVerdict(
      stable=radius < 1 - STABILITY_MARGIN, spectral_radius=radius
  )


def observability_matrix(sys: LtiSystem) -> Matrix:
  """Returns the stacked matrix [C; CA; …; CA^{n-1}] of shape (n p, n)."""
  blocks = [sys.c]
  for _ in range(sys.n - 1):
    blocks.append(blocks[-1] @ sys.a)
  return np.vstack(blocks)


def is_observable(sys: LtiSystem) -> ObservabilityVerdict:
  rank = linalg.numeric_rank(observability_matrix(sys))
  return ObservabilityVerdict(observable=rank == sys.n, rank=rank, n=sys.n)


def controllability_matrix(cs: ControlSystem) -> Matrix:
  """Returns [B AB … A^{n-1}B] of shape (n, n m)."""
  blocks = [cs.b]
  for _ in range(cs.n - 1):
    blocks.append(cs.a @ blocks[-1])
  return np.hstack(blocks)


def is_controllable(cs: ControlSystem) -> ObservabilityVerdict:
  """Direct rank test on the controllability matrix of (A, B)."""
  rank = linalg.numeric_rank(controllability_matrix(cs))
  return ObservabilityVerdict(observable=rank == cs.n, rank=rank, n=cs.n)


def dualize(cs: ControlSystem) -> LtiSystem:
  """Maps (A, B) to the observability problem (Aᵀ, Bᵀ).

  The Lyapunov solution of the dual system solves A P Aᵀ − P + BBᵀ = 0, so it
  is the controllability Gramian P of (A, B).

  Args:
    cs: driven system.

  Returns:
    The dual autonomous system.
  """
  return LtiSystem(a=cs.a.T, c=cs.b.T)


def simulate(sys: LtiSystem, x0: np.ndarray, steps: int) -> Trajectory:
  """Runs the recursion `x_{k+1} = A x_k` for `steps` steps from `x0`."""
  x0 = linalg.as_vector(x0, 'x0')
  if x0.shape[0] != sys.n:
    raise errors.DimensionError(f'x0 must have length {sys.n}, got {x0.shape}')
  if steps < 0:
    raise errors.InputError(f'{steps=} must be non-negative')
  states = np.empty((steps + 1, sys.n))
  states[0] = x0
  for k in range(steps):
    states[k + 1] = sys.a @ states[k]
  outputs = states @ sys.c.T
  return Trajectory(states=states, outputs=outputs)


def lyapunov_decrease(
    sys: LtiSystem, q: Matrix, x0: np.ndarray, steps: int
) -> np.ndarray:
  """Returns `V(x_{k+1}) - V(x_k) + |y_k|^2` with `V(x) = xᵀQx`, k < steps.

  Every entry vanishes (up to rounding) iff Q solves the Lyapunov equation
  along the sampled trajectory, so V decreases by exactly the output energy.
  """
  q = linalg.as_symmetric(q, 'Q')
  if q.shape[0] != sys.n:
    raise errors.DimensionError(f'{q.shape=} does not match {sys.n=}')
  traj = simulate(sys, x0, steps)
  v = np.einsum('ki,ij,kj->k', traj.states, q, traj.states)
  energy = np.sum(traj.outputs**2, axis=1)
  return v[1:] - v[:-1] + energy[:-1]
