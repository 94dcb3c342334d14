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
"""Tests for theta_map."""
from absl.testing import absltest
from absl.testing import parameterized
from lyapcert import errors
from lyapcert import fixed_point
from lyapcert import systems
from lyapcert import theta_map
import numpy as np


REPELLING = theta_map.ThetaMapParams(lam=1.2, gamma=0.8)
ATTRACTING = theta_map.ThetaMapParams(lam=0.8, gamma=1.2)


class ThetaMapTest(parameterized.TestCase):

  @parameterized.named_parameters(
      dict(testcase_name='zero', theta=0.0, expected=0.0),
      dict(testcase_name='one', theta=1.0, expected=1.0),
      dict(testcase_name='half', theta=0.5, expected=0.6),
  )
  def test_examples(self, theta, expected):
    self.assertAlmostEqual(
        theta_map.theta_map(REPELLING, theta), expected, delta=1e-15
    )

  def test_pole_and_fixed_points(self):
    self.assertAlmostEqual(theta_map.theta_pole(REPELLING), -2.0, delta=1e-12)
    self.assertAlmostEqual(theta_map.theta_pole(ATTRACTING), 3.0, delta=1e-12)
    self.assertEqual(theta_map.theta_fixed_points(REPELLING), (0.0, 1.0))

  def test_equal_normalizers_fix_every_point(self):
    params = theta_map.ThetaMapParams(lam=2.0, gamma=2.0)
    self.assertIsNone(theta_map.theta_pole(params))
    self.assertIsNone(theta_map.theta_fixed_points(params))
    for theta in (-3.0, 0.3, 7.5):
      self.assertAlmostEqual(
          theta_map.theta_map(params, theta), theta, delta=1e-14
      )

  def test_evaluation_at_pole(self):
    params = theta_map.ThetaMapParams(lam=3.0, gamma=1.0)
    with self.assertRaises(errors.PoleError):
      theta_map.theta_map(params, -0.5)
    result = theta_map.cobweb_iterates(params, -0.5, 10)
    self.assertTrue(result.hit_pole)
    self.assertTrue(result.diverged)
    np.testing.assert_array_equal(result.thetas, [-0.5])

  @parameterized.named_parameters(
      dict(testcase_name='zero_lam', lam=0.0, gamma=1.0),
      dict(testcase_name='negative_gamma', lam=1.0, gamma=-1.0),
      dict(testcase_name='nan', lam=np.nan, gamma=1.0),
      dict(testcase_name='inf', lam=1.0, gamma=np.inf),
  )
  def test_invalid_params(self, lam, gamma):
    with self.assertRaises(errors.InputError):
      theta_map.ThetaMapParams(lam=lam, gamma=gamma)


class CobwebTest(parameterized.TestCase):

  def test_converges_to_one_from_the_right_of_zero(self):
    result = theta_map.cobweb_iterates(REPELLING, 0.09, 80)
    self.assertFalse(result.diverged)
    self.assertLen(result.thetas, 81)
    close = np.flatnonzero(np.abs(result.thetas - 1) <= 1e-6)
    self.assertNotEmpty(close)
    self.assertLessEqual(close[0], 80)
    self.assertAlmostEqual(result.thetas[-1], 1.0, delta=1e-12)

  def test_attracting_zero(self):
    result = theta_map.cobweb_iterates(ATTRACTING, 0.5, 80)
    self.assertFalse(result.diverged)
    self.assertAlmostEqual(result.thetas[-1], 0.0, delta=1e-6)

  def test_left_of_zero_decreases_past_the_pole(self):
    result = theta_map.cobweb_iterates(REPELLING, -0.09, 6)
    self.assertTrue(np.all(np.diff(result.thetas) < 0))
    self.assertEqual(result.passed_pole_at, 6)
    self.assertLess(result.thetas[6], -15)
    self.assertFalse(result.hit_pole)

  def test_orbit_reenters_after_the_pole(self):
    result = theta_map.cobweb_iterates(REPELLING, -0.09, 80)
    self.assertEqual(result.passed_pole_at, 6)
    self.assertGreater(result.thetas[7], 1.0)
    self.assertAlmostEqual(result.thetas[-1], 1.0, delta=1e-6)

  def test_escaping_start_exceeds_bound(self):
    theta0 = theta_map.escaping_start(REPELLING, 1e3 + 1, 60)
    self.assertBetween(theta0, -1e-9, 0.0)
    result = theta_map.cobweb_iterates(REPELLING, theta0, 60, escape_bound=1e3)
    self.assertTrue(result.diverged)
    self.assertFalse(result.hit_pole)
    self.assertLen(result.thetas, 61)
    self.assertTrue(np.all(np.diff(result.thetas) < 0))
    self.assertLess(result.thetas[-1], -1e3)

  def test_escaping_start_requires_repelling_zero(self):
    with self.assertRaises(errors.InputError):
      theta_map.escaping_start(ATTRACTING, 10.0, 5)

  def test_negative_steps(self):
    with self.assertRaises(errors.InputError):
      theta_map.cobweb_iterates(REPELLING, 0.5, -1)

  @parameterized.named_parameters(
      dict(testcase_name='mild', lam=1.2, gamma=0.8),
      dict(testcase_name='strong', lam=3.0, gamma=1.0),
      dict(testcase_name='nearly_equal', lam=1.05, gamma=1.0),
  )
  def test_starts_left_of_zero_decrease_past_the_pole(self, lam, gamma):
    params = theta_map.ThetaMapParams(lam=lam, gamma=gamma)
    pole = theta_map.theta_pole(params)
    rng = np.random.default_rng(5)
    for theta0 in pole * rng.uniform(0.01, 0.99, size=50):
      with self.subTest(f'{theta0=}'):
        result = theta_map.cobweb_iterates(params, theta0, 200)
        k = result.passed_pole_at
        self.assertIsNotNone(k)
        self.assertGreater(k, 0)
        self.assertTrue(np.all(np.diff(result.thetas[: k + 1]) < 0))
        self.assertTrue(np.all(result.thetas[:k] > pole))
        self.assertLess(result.thetas[k], pole)

  def test_iterates_follow_odds_form(self):
    result = theta_map.cobweb_iterates(REPELLING, 0.3, 10)
    odds = (0.3 / 0.7) * 1.5 ** np.arange(11)
    np.testing.assert_allclose(result.thetas, odds / (1 + odds), rtol=1e-12)


NORMALIZER_PAIRS = (
    dict(testcase_name='repelling', lam=1.2, gamma=0.8),
    dict(testcase_name='attracting', lam=0.8, gamma=1.2),
    dict(testcase_name='strongly_repelling', lam=3.0, gamma=1.0),
    dict(testcase_name='strongly_attracting', lam=0.5, gamma=3.0),
    dict(testcase_name='nearly_equal', lam=1.05, gamma=1.0),
)


class ConjugacyTest(parameterized.TestCase):

  def line_through_fixed_points(self, lam, gamma):
    # e1e1ᵀ and e2e2ᵀ are fixed points with normalizers lam and gamma.
    sys = systems.LtiSystem(
        a=np.diag([np.sqrt(lam), np.sqrt(gamma)]), c=np.zeros((1, 2))
    )
    return sys, np.diag([1.0, 0.0]), np.diag([0.0, 1.0])

  @parameterized.named_parameters(*NORMALIZER_PAIRS)
  def test_endpoints_are_fixed_points(self, lam, gamma):
    sys, x, y = self.line_through_fixed_points(lam, gamma)
    for point, expected in ((x, lam), (y, gamma)):
      x_next, normalizer = fixed_point.normalized_map(sys, 1.0, point)
      np.testing.assert_allclose(x_next, point, atol=1e-15)
      self.assertAlmostEqual(normalizer, expected, delta=1e-14)

  @parameterized.named_parameters(*NORMALIZER_PAIRS)
  def test_matrix_map_matches_theta_map(self, lam, gamma):
    sys, x, y = self.line_through_fixed_points(lam, gamma)
    params = theta_map.ThetaMapParams(lam=lam, gamma=gamma)
    pole = theta_map.theta_pole(params)
    for theta in (-1.5, -0.7, 0.0, 0.25, 0.7, 1.0, 1.5, 3.5):
      if abs(theta - pole) < 0.05:
        continue
      with self.subTest(f'{theta=}'):
        expected = theta_map.theta_map(params, theta)
        self.assertAlmostEqual(
            theta_map.conjugated_theta(sys, 1.0, x, y, theta),
            expected,
            delta=1e-9 * max(1.0, abs(expected)),
        )

  def test_line_coordinate(self):
    _, x, y = self.line_through_fixed_points(1.2, 0.8)
    z = 0.3 * x + 0.7 * y
    self.assertAlmostEqual(theta_map.line_coordinate(x, y, z), 0.3, delta=1e-15)
    with self.assertRaises(errors.InputError):
      theta_map.line_coordinate(x, x, z)


if __name__ == '__main__':
  absltest.main()
