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
"""Tests for fixed_point."""
from unittest import mock

from absl.testing import absltest
from absl.testing import parameterized
import chex
import jax
from lyapcert import errors
from lyapcert import fixed_point
from lyapcert import gin_utils
from lyapcert import linalg
from lyapcert import oracles
from lyapcert import systems
from lyapcert import test_util
import numpy as np


NILPOTENT = systems.LtiSystem(a=[[0, 1], [0, 0]], c=[[1, 0]])
SCALAR = systems.LtiSystem(a=[[0.5]], c=[[1]])
ZERO_A = systems.LtiSystem(a=np.zeros((2, 2)), c=np.eye(2))


def relative_difference(x, y):
  return np.linalg.norm(x - y) / np.linalg.norm(y)


def reference_alpha_star(sys):
  return 1 / np.trace(test_util.reference_gramian(sys))


class NormalizedMapTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(
          testcase_name='scalar',
          sys=SCALAR,
          alpha=1.0,
          x=[[1.0]],
          expected_x=[[1.0]],
          expected_lam=1.25,
      ),
      dict(
          testcase_name='zero_a',
          sys=ZERO_A,
          alpha=3.0,
          x=np.diag([0.9, 0.1]),
          expected_x=np.eye(2) / 2,
          expected_lam=6.0,
      ),
      dict(
          testcase_name='nilpotent',
          sys=NILPOTENT,
          alpha=1.0,
          x=np.eye(2) / 2,
          expected_x=np.diag([2 / 3, 1 / 3]),
          expected_lam=1.5,
      ),
  )
  def test_examples(self, sys, alpha, x, expected_x, expected_lam):
    x_next, lam = fixed_point.normalized_map(sys, alpha, x)
    np.testing.assert_allclose(x_next, expected_x, atol=1e-15)
    self.assertAlmostEqual(lam, expected_lam, delta=1e-15)

  def test_maps_slice_into_slice(self):
    rng = np.random.default_rng(0)
    key = jax.random.PRNGKey(0)
    for n in range(1, 7):
      key, subkey = jax.random.split(key)
      sys = systems.LtiSystem(
          a=rng.normal(size=(n, n)), c=rng.normal(size=(2, n))
      )
      for x in fixed_point.random_slice_points(subkey, n, 10):
        with self.subTest(f'{n=}'):
          alpha = rng.uniform(0.01, 10)
          x_next, lam = fixed_point.normalized_map(sys, alpha, x)
          np.testing.assert_allclose(x_next, x_next.T, atol=1e-15)
          self.assertAlmostEqual(np.trace(x_next), 1.0, delta=1e-12)
          self.assertGreaterEqual(linalg.min_eigenvalue(x_next), -1e-12)
          self.assertGreaterEqual(
              lam, alpha * np.trace(sys.output_gram) * (1 - 1e-12)
          )

  def test_zero_normalizer_is_degenerate(self):
    sys = systems.LtiSystem(a=np.zeros((2, 2)), c=np.zeros((1, 2)))
    with self.assertRaises(errors.DegenerateMapError):
      fixed_point.normalized_map(sys, 1.0, np.eye(2) / 2)
    with self.assertRaises(errors.DegenerateMapError):
      fixed_point.fixed_point_iterate(sys, 1.0)

  @parameterized.named_parameters(
      dict(testcase_name='wrong_trace', x=np.eye(2)),
      dict(testcase_name='indefinite', x=np.diag([1.5, -0.5])),
      dict(testcase_name='asymmetric', x=[[0.5, 0.1], [0.0, 0.5]]),
  )
  def test_rejects_points_off_the_slice(self, x):
    with self.assertRaises(errors.InputError):
      fixed_point.normalized_map(NILPOTENT, 1.0, x)

  @parameterized.parameters(0.0, -1.0, np.inf, np.nan)
  def test_rejects_bad_alpha(self, alpha):
    with self.assertRaises(errors.InputError):
      fixed_point.normalized_map(SCALAR, alpha, [[1.0]])

  def test_random_slice_points(self):
    points = fixed_point.random_slice_points(jax.random.PRNGKey(1), 4, 7)
    chex.assert_shape(points, (7, 4, 4))
    for x in points:
      fixed_point.check_slice_point(x, 4)


class FixedPointIterateTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name='scalar', sys=SCALAR, alpha=2.0, expected=[[1.0]]),
      dict(
          testcase_name='zero_a', sys=ZERO_A, alpha=0.3, expected=np.eye(2) / 2
      ),
      dict(
          testcase_name='nilpotent',
          sys=NILPOTENT,
          alpha=0.5,
          expected=np.eye(2) / 2,
      ),
  )
  def test_examples(self, sys, alpha, expected):
    state = fixed_point.fixed_point_iterate(sys, alpha)
    self.assertTrue(state.converged)
    self.assertEqual(state.source, 'picard')
    np.testing.assert_allclose(state.x, expected, atol=1e-11)
    self.assertLessEqual(state.map_residual, 1e-12)

  def test_matches_slice_oracle(self):
    rng = np.random.default_rng(2)
    for n in range(2, 7):
      with self.subTest(f'{n=}'):
        p = int(rng.integers(1, 3))
        sys = test_util.random_stable_observable(rng, n, p)
        alpha = reference_alpha_star(sys) * rng.uniform(0.5, 2.0)
        picard = fixed_point.fixed_point_iterate(sys, alpha)
        oracle = fixed_point.slice_oracle(sys, alpha)
        self.assertTrue(picard.converged)
        self.assertEqual(oracle.source, 'oracle')
        np.testing.assert_allclose(picard.x, oracle.x, atol=1e-9)
        self.assertAlmostEqual(picard.lam, oracle.lam, delta=1e-9)

  def test_slice_oracle_examples(self):
    state = fixed_point.slice_oracle(SCALAR, 2.0)
    np.testing.assert_allclose(state.x, [[1.0]])
    self.assertAlmostEqual(state.lam, 2.25, delta=1e-12)
    state = fixed_point.slice_oracle(ZERO_A, 0.5)
    np.testing.assert_allclose(state.x, np.eye(2) / 2, atol=1e-12)
    self.assertAlmostEqual(state.lam, 1.0, delta=1e-12)

  def test_find_normalizer_without_sign_change(self):
    with self.assertRaises(errors.NumericalFailureError):
      fixed_point.find_normalizer(lambda lam: 1.0, 0.0, 1.0)

  def test_find_normalizer_resolves_to_rounding(self):
    lam = fixed_point.find_normalizer(lambda lam: 1.25 - lam, 0.5, 4.0)
    self.assertAlmostEqual(lam, 1.25, delta=4e-15)

  def test_non_convergence_is_reported(self):
    rng = np.random.default_rng(3)
    sys = test_util.random_stable_observable(rng, 4, p=1)
    with gin_utils.specific_config('fixed_point_iterate.max_iter = 1'):
      state = fixed_point.fixed_point_iterate(sys, 1.0)
      self.assertFalse(state.converged)
      self.assertEqual(state.iterations, 1)
      fallback = fixed_point.solve_fixed_point(sys, 1.0)
    self.assertEqual(fallback.source, 'oracle')
    self.assertLessEqual(fallback.map_residual, fixed_point.ORACLE_ACCEPT_TOL)

  def test_uniqueness_across_starts(self):
    rng = np.random.default_rng(4)
    key = jax.random.PRNGKey(4)
    for trial in range(50):
      with self.subTest(f'{trial=}'):
        n = int(rng.integers(2, 7))
        p = int(rng.integers(1, 3))
        sys = test_util.random_stable_observable(rng, n, p)
        key, subkey = jax.random.split(key)
        starts = fixed_point.random_slice_points(subkey, n, 20)
        states = fixed_point.fixed_points_from_starts(sys, 1.0, starts)
        self.assertLen(states, 20)
        xs = np.stack([s.x for s in states])
        for i in range(1, len(xs)):
          self.assertLessEqual(np.linalg.norm(xs[i] - xs[0]), 1e-6)
        oracle = fixed_point.slice_oracle(sys, 1.0)
        self.assertLessEqual(np.linalg.norm(xs[0] - oracle.x), 1e-6)

  def test_fixed_points_are_positive_definite(self):
    rng = np.random.default_rng(5)
    for trial in range(10):
      n = int(rng.integers(2, 6))
      sys = test_util.random_stable_observable(rng, n, p=1)
      for alpha in (0.1, 1.0, 10.0):
        with self.subTest(f'{trial=}, {alpha=}'):
          state = fixed_point.solve_fixed_point(sys, alpha)
          self.assertGreater(linalg.min_eigenvalue(state.x), 0.0)

  def test_starts_must_match_dimension(self):
    with self.assertRaises(errors.DimensionError):
      fixed_point.fixed_points_from_starts(SCALAR, 1.0, np.ones((3, 2, 2)))


class LambdaOfAlphaTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name='scalar_root', sys=SCALAR, alpha=0.75, expected=1.0),
      dict(testcase_name='scalar', sys=SCALAR, alpha=2.0, expected=2.25),
      dict(testcase_name='zero_a', sys=ZERO_A, alpha=0.5, expected=1.0),
  )
  def test_examples(self, sys, alpha, expected):
    self.assertAlmostEqual(
        fixed_point.lambda_of_alpha(sys, alpha), expected, delta=1e-12
    )

  def test_lower_bound(self):
    rng = np.random.default_rng(6)
    sys = test_util.random_stable_observable(rng, 4, p=2)
    for alpha in (0.01, 0.1, 1.0, 10.0):
      with self.subTest(f'{alpha=}'):
        lam = fixed_point.lambda_of_alpha(sys, alpha)
        bound = alpha * np.trace(sys.output_gram)
        self.assertGreaterEqual(lam, bound * (1 - 1e-12))

  def test_sweep_is_increasing(self):
    rng = np.random.default_rng(7)
    sys = test_util.random_stable_observable(rng, 3, p=1)
    lams = fixed_point.lambda_sweep(sys, [0.25, 0.5, 1.0, 2.0, 4.0])
    chex.assert_shape(lams, (5,))
    self.assertTrue(np.all(np.diff(lams) > 0))
    np.testing.assert_allclose(
        fixed_point.lambda_sweep(SCALAR, [0.5, 1.0]), [0.75, 1.25], atol=1e-12
    )


class BisectAlphaTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name='grow', fn=lambda a: 0.25 * a, expected=4.0),
      dict(testcase_name='shrink', fn=lambda a: 0.25 + a, expected=0.75),
      dict(testcase_name='exact_start', fn=lambda a: a, expected=1.0),
  )
  def test_synthetic(self, fn, expected):
    alpha, lam = fixed_point.bisect_alpha(fn)
    self.assertLessEqual(abs(lam - 1), 1e-10)
    self.assertAlmostEqual(alpha, expected, delta=1e-9)

  def test_custom_start_and_factor(self):
    alpha, lam = fixed_point.bisect_alpha(
        lambda a: a**2, tol=1e-13, alpha0=3.0, factor=1.5
    )
    self.assertAlmostEqual(alpha, 1.0, delta=1e-12)
    self.assertLessEqual(abs(lam - 1), 1e-13)

  @parameterized.named_parameters(
      dict(testcase_name='never_reaches_one', fn=lambda a: 0.5),
      dict(testcase_name='always_above_one', fn=lambda a: 2.0),
  )
  def test_bracketing_failure(self, fn):
    with self.assertRaises(errors.NumericalFailureError):
      fixed_point.bisect_alpha(fn, max_bracket=20)

  def test_rejects_factor(self):
    with self.assertRaises(errors.InputError):
      fixed_point.bisect_alpha(lambda a: a, factor=1.0)

  def test_gin_tolerance(self):
    with gin_utils.specific_config('bisect_alpha.tol = 0.1'):
      _, lam = fixed_point.bisect_alpha(lambda a: 0.25 * a)
    self.assertLessEqual(abs(lam - 1), 0.1)


class SolveViaAlphaBisectionTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(
          testcase_name='scalar',
          sys=SCALAR,
          expected_q=[[4 / 3]],
          expected_alpha=0.75,
      ),
      dict(
          testcase_name='zero_a',
          sys=ZERO_A,
          expected_q=np.eye(2),
          expected_alpha=0.5,
      ),
      dict(
          testcase_name='nilpotent',
          sys=NILPOTENT,
          expected_q=np.eye(2),
          expected_alpha=0.5,
      ),
  )
  def test_examples(self, sys, expected_q, expected_alpha):
    solution = fixed_point.solve_via_alpha_bisection(sys)
    np.testing.assert_allclose(solution.q, expected_q, atol=1e-8)
    self.assertAlmostEqual(solution.alpha, expected_alpha, delta=1e-9)
    self.assertEqual(solution.method, oracles.Method.FIXED_POINT)
    self.assertTrue(solution.is_positive_definite)

  def test_refines_near_the_stability_boundary(self):
    # The coarse pass stops with |λ − 1| ≈ 9e-9 and a residual near 5e-6.
    sys = systems.LtiSystem(a=[[0.999]], c=[[1]])
    spy = mock.patch.object(
        fixed_point, 'slice_oracle', wraps=fixed_point.slice_oracle
    )
    with gin_utils.specific_config('bisect_alpha.tol = 1e-8'), spy as oracle:
      solution = fixed_point.solve_via_alpha_bisection(sys)
    self.assertTrue(oracle.called)
    self.assertLessEqual(solution.residual, oracles.accept_tolerance(sys))
    np.testing.assert_allclose(solution.q, [[1 / (1 - 0.999**2)]], rtol=1e-9)

  @parameterized.named_parameters(
      dict(
          testcase_name='unstable',
          sys=systems.LtiSystem(a=[[1.5]], c=[[1]]),
      ),
      dict(
          testcase_name='unobservable',
          sys=systems.LtiSystem(a=np.diag([0.5, 0.5]), c=[[1, 0]]),
      ),
  )
  def test_preconditions(self, sys):
    with self.assertRaises(errors.PreconditionError):
      fixed_point.solve_via_alpha_bisection(sys)

  def test_agrees_with_other_solvers(self):
    rng = np.random.default_rng(8)
    for trial in range(200):
      with self.subTest(f'{trial=}'):
        n = int(rng.integers(2, 7))
        p = int(rng.integers(1, 3))
        sys = test_util.random_stable_observable(rng, n, p)
        solutions = [
            oracles.solve_direct(sys),
            oracles.solve_series(sys),
            fixed_point.solve_via_alpha_bisection(sys),
        ]
        accept = oracles.accept_tolerance(sys)
        for solution in solutions:
          self.assertLessEqual(solution.residual, accept)
          self.assertEqual(solution.definiteness, oracles.Definiteness.PD)
        for i in range(3):
          for j in range(i + 1, 3):
            self.assertLessEqual(
                relative_difference(solutions[i].q, solutions[j].q), 1e-6
            )

  def test_trace_identity(self):
    rng = np.random.default_rng(9)
    for trial in range(50):
      with self.subTest(f'{trial=}'):
        sys = test_util.random_stable_observable(
            rng, int(rng.integers(2, 7)), p=int(rng.integers(1, 3))
        )
        solution = fixed_point.solve_via_alpha_bisection(sys)
        self.assertAlmostEqual(
            solution.alpha * np.trace(solution.q), 1.0, delta=1e-8
        )
        _, lam = fixed_point.normalized_map(
            sys, solution.alpha, solution.alpha * solution.q
        )
        self.assertLessEqual(abs(lam - 1), 1e-10)


class UnrolledChainTest(parameterized.TestCase):

  def test_exact_examples(self):
    scalar = fixed_point.fixed_point_iterate(SCALAR, 0.75)
    zero_a = fixed_point.fixed_point_iterate(ZERO_A, 0.5)
    for steps in (0, 1, 10):
      with self.subTest(f'{steps=}'):
        self.assertLessEqual(
            fixed_point.unrolled_chain_check(SCALAR, scalar, steps), 1e-14
        )
        self.assertLessEqual(
            fixed_point.unrolled_chain_check(ZERO_A, zero_a, steps), 1e-14
        )

  def test_random_fixed_points(self):
    rng = np.random.default_rng(10)
    for trial in range(50):
      sys = test_util.random_stable_observable(
          rng, int(rng.integers(2, 7)), p=int(rng.integers(1, 3))
      )
      state = fixed_point.fixed_point_iterate(
          sys, reference_alpha_star(sys), tol=1e-14
      )
      # the floor absorbs rounding once the map residual reaches it.
      bound = 10 * max(state.map_residual, 1e-13)
      for steps in range(11):
        with self.subTest(f'{trial=}, {steps=}'):
          self.assertLessEqual(
              fixed_point.unrolled_chain_check(sys, state, steps), bound
          )

  def test_rejects_negative_steps(self):
    state = fixed_point.fixed_point_iterate(SCALAR, 1.0)
    with self.assertRaises(errors.InputError):
      fixed_point.unrolled_chain_check(SCALAR, state, -1)


if __name__ == '__main__':
  absltest.main()
