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
"""Dense real matrix primitives shared by every other module.

Matrices are plain 2D float64 `np.ndarray` values. Helpers in this module
validate shapes and finiteness on the way in and never mutate their inputs.
"""

from typing import Sequence, Union

from lyapcert import errors
import numpy as np


Matrix = np.ndarray
SymmetricMatrix = np.ndarray
Vector = np.ndarray
MatrixLike = Union[np.ndarray, Sequence[Sequence[float]]]

SYMMETRY_RTOL = 1e-12
RANK_RTOL = 1e-14
SINGULAR_RTOL = 1e-14
# S is positive definite iff min_eigenvalue(S) > rtol * max(1, trace(S)).
DEFINITENESS_RTOL = 1e-9


def _to_float64(x, name: str) -> np.ndarray:
  try:
    return np.array(x, dtype=np.float64)
  except (OverflowError, TypeError, ValueError) as e:
    raise errors.InputError(f'{name} is not a float64 array: {e}') from e


def as_matrix(x: MatrixLike, name: str = 'matrix') -> Matrix:
  """Returns `x` as a finite 2D float64 array, raising on anything else."""
  m = _to_float64(x, name)
  if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
    raise errors.DimensionError(
        f'{name} must be a non-empty 2D matrix, got shape {m.shape}'
    )
  if not np.all(np.isfinite(m)):
    raise errors.InputError(f'{name} has non-finite entries')
  return m


def as_square(x: MatrixLike, name: str = 'matrix') -> Matrix:
  m = as_matrix(x, name)
  if m.shape[0] != m.shape[1]:
    raise errors.DimensionError(f'{name} must be square, got shape {m.shape}')
  return m


def as_vector(x: Union[np.ndarray, Sequence[float]], name: str = 'vector'):
  v = _to_float64(x, name)
  if v.ndim != 1 or v.size < 1:
    raise errors.DimensionError(
        f'{name} must be a non-empty vector, got shape {v.shape}'
    )
  if not np.all(np.isfinite(v)):
    raise errors.InputError(f'{name} has non-finite entries')
  return v


def symmetry_defect(m: Matrix) -> float:
  return float(np.max(np.abs(m - m.T)))


def is_symmetric(m: Matrix) -> bool:
  scale = max(1.0, float(np.max(np.abs(m))))
  return symmetry_defect(m) <= SYMMETRY_RTOL * scale


def symmetrize(m: Matrix) -> SymmetricMatrix:
  return (m + m.T) / 2


def as_symmetric(x: MatrixLike, name: str = 'matrix') -> SymmetricMatrix:
  """Returns `x` as a validated symmetric matrix."""
  m = as_square(x, name)
  if not is_symmetric(m):
    raise errors.InputError(
        f'{name} is not symmetric: max |M - M^T| = {symmetry_defect(m):.3e}'
    )
  return m


def trace(m: MatrixLike) -> float:
  return float(np.trace(as_square(m)))


def eigenvalues(m: MatrixLike) -> np.ndarray:
  return np.linalg.eigvals(as_square(m))


def spectral_radius(m: MatrixLike) -> float:
  """Returns the largest eigenvalue modulus of a square matrix."""
  return float(np.max(np.abs(eigenvalues(m))))


def min_eigenvalue(s: MatrixLike) -> float:
  """Returns the smallest eigenvalue of a symmetric matrix."""
  s = as_symmetric(s)
  return float(np.linalg.eigvalsh(symmetrize(s))[0])


def max_eigenvalue(s: MatrixLike) -> float:
  s = as_symmetric(s)
  return float(np.linalg.eigvalsh(symmetrize(s))[-1])


def definiteness_tolerance(s: MatrixLike) -> float:
  return DEFINITENESS_RTOL * max(1.0, trace(s))


def is_positive_definite(s: MatrixLike) -> bool:
  return min_eigenvalue(s) > definiteness_tolerance(s)


def singular_values(m: MatrixLike) -> np.ndarray:
  return np.linalg.svd(as_matrix(m), compute_uv=False)


def numeric_rank(m: MatrixLike) -> int:
  """Counts singular values above `max(rows, cols) * 1e-14 * sigma_max`."""
  m = as_matrix(m)
  sigma = singular_values(m)
  sigma_max = sigma[0] if sigma.size else 0.0
  if sigma_max == 0.0:
    return 0
  tol = max(m.shape) * RANK_RTOL * sigma_max
  return int(np.sum(sigma > tol))


def kron(a: MatrixLike, b: MatrixLike) -> Matrix:
  return np.kron(as_matrix(a, 'a'), as_matrix(b, 'b'))


def condition_number(m: MatrixLike) -> float:
  return float(np.linalg.cond(as_square(m)))


def linear_solve(m: MatrixLike, b: Union[np.ndarray, Sequence[float]]):
  """Solves `m @ x = b`, raising `SingularSystemError` if `m` is singular.

  Args:
    m: square coefficient matrix of size n.
    b: right hand side vector of length n.

  Returns:
    Solution vector `x`.
  """
  m = as_square(m, 'm')
  b = as_vector(b, 'b')
  n = m.shape[0]
  if b.shape[0] != n:
    raise errors.DimensionError(f'{m.shape=} incompatible with {b.shape=}')
  cond = condition_number(m)
  if not np.isfinite(cond) or cond > 1 / (n * SINGULAR_RTOL):
    raise errors.SingularSystemError(
        f'linear system is singular to working precision: {cond=:.3e}'
    )
  return np.linalg.solve(m, b)
