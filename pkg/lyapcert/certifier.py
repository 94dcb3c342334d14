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
"""Certificates for the stability / observability / Lyapunov triad.

For a system (A, C) any two of

  (i)   A is asymptotically stable,
  (ii)  (A, C) is observable,
  (iii) AᵀQA − Q + CᵀC = 0 has a positive definite solution Q,

imply the third. `run_triad` decides each condition by an independent
numerical test and records whether the three verdicts respect this rule.
Documents with B are answered through the dual system (Aᵀ, Bᵀ); documents
with a nonnegative row c use the linear certificate q = c + qA instead of Q.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import logging
import math
from typing import Any, Union

from lyapcert import errors
from lyapcert import fixed_point
from lyapcert import linalg
from lyapcert import oracles
from lyapcert import positive_systems
from lyapcert import systems
import numpy as np


# pylint: disable=logging-fstring-interpolation

ALLOWED_KEYS = ('A', 'C', 'B', 'c')
# A verdict whose margin is this close to its boundary may flip under
# rounding, so an inconsistent pattern there is not reported as a violation.
BOUNDARY_MARGIN = 1e-6


class Mode(enum.Enum):
  OBSERVABILITY = 'C'
  CONTROLLABILITY = 'B'
  POSITIVE = 'c'


class Format(enum.Enum):
  JSON = 'json'
  TEXT = 'text'


EQUATIONS = {
    Mode.OBSERVABILITY: 'A^T Q A - Q + C^T C = 0',
    Mode.CONTROLLABILITY: 'A P A^T - P + B B^T = 0',
    Mode.POSITIVE: 'q = c + q A',
}


@dataclasses.dataclass(frozen=True, eq=False)
class InputDocument:
  """A validated input: A and exactly one of C, B or c."""

  a: linalg.Matrix
  mode: Mode
  output: np.ndarray

  @property
  def n(self) -> int:
    return self.a.shape[0]

  def system(self) -> systems.LtiSystem:
    """Returns (A, C), or the dual (Aᵀ, Bᵀ) of a controllability document."""
    if self.mode is Mode.OBSERVABILITY:
      return systems.LtiSystem(a=self.a, c=self.output)
    if self.mode is Mode.CONTROLLABILITY:
      return systems.dualize(systems.ControlSystem(a=self.a, b=self.output))
    return positive_systems.PositiveSystem(a=self.a, c=self.output).as_lti()

  def positive_system(self) -> positive_systems.PositiveSystem:
    if self.mode is not Mode.POSITIVE:
      raise errors.InputError('a positive system requires a "c" document')
    return positive_systems.PositiveSystem(a=self.a, c=self.output)


@dataclasses.dataclass(frozen=True)
class SolverFailure:
  """A solver error captured into a report instead of being raised."""

  error: str
  message: str

  @classmethod
  def from_exception(cls, e: errors.LyapcertError) -> SolverFailure:
    return cls(error=type(e).__name__, message=str(e))


Outcome = Union[
    oracles.LyapunovSolution,
    positive_systems.PositiveCertificate,
    SolverFailure,
]


@dataclasses.dataclass(frozen=True)
class TriadMargins:
  """Distance of each verdict from its decision boundary.

  Attributes:
    stability: 1 − ρ(A).
    observability: σ_n / σ_1 of the observability matrix.
    definiteness: λ_min(Q) / max(1, tr Q) of the direct solution, or
      min(q) / max(1, Σ|q|) for positive systems; None if the solve failed.
  """

  stability: float
  observability: float
  definiteness: float | None

  def near_boundary(self) -> bool:
    values = (self.stability, self.observability, self.definiteness)
    return any(v is not None and abs(v) <= BOUNDARY_MARGIN for v in values)


@dataclasses.dataclass(frozen=True, eq=False)
class TriadReport:
  """Verdicts on (i), (ii), (iii) with their numerical evidence.

  Attributes:
    mode: which kind of document produced the report.
    stability: verdict (i) with the spectral radius.
    observability: verdict (ii) with the rank; for B documents this is the
      controllability rank of (A, B).
    solutions: outcome of each solver that was run, keyed by method name.
    lyapunov: verdict (iii), taken from the direct solver.
    agreement: relative Frobenius (or Euclidean, for q) difference between
      the cross-checked and the direct solution, if both were computed.
    consistent: False iff exactly two of the three verdicts hold.
    margins: distances of the three verdicts from their boundaries.
    ill_conditioned: the verdicts are inconsistent and at least one margin
      is within `BOUNDARY_MARGIN`, so float64 cannot separate them.
  """

  mode: Mode
  stability: systems.StabilityVerdict
  observability: systems.ObservabilityVerdict
  solutions: dict[str, Outcome]
  lyapunov: bool
  agreement: float | None
  consistent: bool
  margins: TriadMargins | None = None
  ill_conditioned: bool = False

  @property
  def verdicts(self) -> tuple[bool, bool, bool]:
    return (self.stability.stable, self.observability.observable, self.lyapunov)

  @property
  def violates_triad(self) -> bool:
    """Inconsistent verdicts on data far from every decision boundary."""
    return not self.consistent and not self.ill_conditioned


def is_consistent(verdicts: tuple[bool, bool, bool]) -> bool:
  """Any two conditions imply the third, so two-true-one-false never occurs."""
  return sum(verdicts) != 2


def _is_number(x: Any) -> bool:
  return isinstance(x, (int, float)) and not isinstance(x, bool)


def _parse_matrix(value: Any, name: str) -> np.ndarray:
  if not isinstance(value, list) or not value:
    raise errors.InputError(f'matrix {name} must be a non-empty list of rows')
  if not all(isinstance(row, list) for row in value):
    raise errors.InputError(f'matrix {name} must be a list of rows')
  if len({len(row) for row in value}) != 1:
    raise errors.InputError(f'ragged matrix {name}')
  if not all(_is_number(x) for row in value for x in row):
    raise errors.InputError(f'matrix {name} has non-numeric entries')
  return linalg.as_matrix(value, name)


def _parse_row(value: Any, name: str) -> np.ndarray:
  if isinstance(value, list) and len(value) == 1 and isinstance(value[0], list):
    value = value[0]
  if not isinstance(value, list) or not all(_is_number(x) for x in value):
    raise errors.InputError(f'row vector {name} must be a list of numbers')
  return linalg.as_vector(value, name)


def parse_input(text: Union[bytes, str]) -> InputDocument:
  """Parses a UTF-8 JSON document with "A" and exactly one of "C", "B", "c".

  Args:
    text: document contents.

  Returns:
    The validated document.

  Raises:
    InputError: on malformed JSON or missing, extra or malformed keys.
    DimensionError: if the shapes of the matrices are inconsistent.
  """
  if isinstance(text, bytes):
    try:
      text = text.decode('utf-8')
    except UnicodeDecodeError as e:
      raise errors.InputError(f'input is not valid UTF-8: {e}') from e
  try:
    obj = json.loads(text)
  except ValueError as e:
    raise errors.InputError(f'malformed JSON: {e}') from e
  if not isinstance(obj, dict):
    raise errors.InputError('input must be a JSON object')
  if 'A' not in obj:
    raise errors.InputError('missing required key A')
  a = _parse_matrix(obj['A'], 'A')
  if a.shape[0] != a.shape[1]:
    raise errors.DimensionError(f'matrix A must be square, got shape {a.shape}')
  extra = sorted(set(obj) - set(ALLOWED_KEYS))
  if extra:
    raise errors.InputError(f'unexpected key {extra[0]!r}')
  present = [key for key in ALLOWED_KEYS[1:] if key in obj]
  if len(present) != 1:
    raise errors.InputError('exactly one of C, B, c required')
  (key,) = present
  mode = Mode(key)
  if mode is Mode.POSITIVE:
    output = _parse_row(obj[key], key)
  else:
    output = _parse_matrix(obj[key], key)
  doc = InputDocument(a=a, mode=mode, output=output)
  if mode is Mode.POSITIVE:
    doc.positive_system()
  else:
    doc.system()
  return doc


def _relative_difference(x: np.ndarray, reference: np.ndarray) -> float:
  scale = max(float(np.linalg.norm(reference)), np.finfo(float).tiny)
  return float(np.linalg.norm(x - reference)) / scale


def _observability_margin(sys: systems.LtiSystem) -> float:
  sigma = linalg.singular_values(systems.observability_matrix(sys))
  if not sigma[0] > 0:
    return 0.0
  return float(sigma[sys.n - 1] / sigma[0])


def _build_report(
    mode: Mode,
    stability: systems.StabilityVerdict,
    observability: systems.ObservabilityVerdict,
    solutions: dict[str, Outcome],
    certified: bool,
    agreement: float | None,
    margins: TriadMargins,
) -> TriadReport:
  verdicts = (stability.stable, observability.observable, certified)
  consistent = is_consistent(verdicts)
  report = TriadReport(
      mode=mode,
      stability=stability,
      observability=observability,
      solutions=solutions,
      lyapunov=certified,
      agreement=agreement,
      consistent=consistent,
      margins=margins,
      ill_conditioned=not consistent and margins.near_boundary(),
  )
  _log_report(report)
  return report


def run_triad(doc: InputDocument) -> TriadReport:
  """Evaluates conditions (i), (ii) and (iii) for a document.

  (i) is decided by the spectral radius, (ii) by the rank of the
  observability matrix and (iii) by the direct Kronecker solve. When (i) and
  (ii) hold, the fixed-point solution is computed as a cross-check. Solver
  errors are recorded in the report.

  Args:
    doc: validated input document.

  Returns:
    The triad report.
  """
  if doc.mode is Mode.POSITIVE:
    return run_positive_triad(doc)
  sys = doc.system()
  stability = systems.is_asymptotically_stable(sys)
  observability = systems.is_observable(sys)
  solutions: dict[str, Outcome] = {}
  try:
    direct = oracles.solve_direct(sys)
    solutions[oracles.Method.DIRECT.value] = direct
  except errors.LyapcertError as e:
    direct = None
    solutions[oracles.Method.DIRECT.value] = SolverFailure.from_exception(e)
  lyapunov = direct is not None and direct.is_positive_definite

  agreement = None
  if stability.stable and observability.observable:
    try:
      fp = fixed_point.solve_via_alpha_bisection(sys)
      solutions[oracles.Method.FIXED_POINT.value] = fp
      if direct is not None:
        agreement = _relative_difference(fp.q, direct.q)
    except errors.LyapcertError as e:
      solutions[oracles.Method.FIXED_POINT.value] = (
          SolverFailure.from_exception(e)
      )
  definiteness = None
  if direct is not None:
    definiteness = direct.min_eigenvalue / max(1.0, linalg.trace(direct.q))
  margins = TriadMargins(
      stability=1.0 - stability.spectral_radius,
      observability=_observability_margin(sys),
      definiteness=definiteness,
  )
  return _build_report(
      doc.mode,
      stability,
      observability,
      solutions,
      lyapunov,
      agreement,
      margins,
  )


def run_positive_triad(doc: InputDocument) -> TriadReport:
  """Triad for a positive system with (iii) replaced by q = c(I − A)⁻¹ > 0."""
  ps = doc.positive_system()
  stability = systems.is_asymptotically_stable(ps.as_lti())
  observability = positive_systems.is_positive_observable(ps)
  solutions: dict[str, Outcome] = {}
  try:
    direct = positive_systems.solve_positive_q(ps)
    solutions[oracles.Method.DIRECT.value] = direct
  except errors.LyapcertError as e:
    direct = None
    solutions[oracles.Method.DIRECT.value] = SolverFailure.from_exception(e)
  positive = direct is not None and direct.positive

  agreement = None
  if stability.stable and observability.observable:
    try:
      fp = positive_systems.solve_positive_via_alpha_bisection(ps)
      solutions[oracles.Method.FIXED_POINT.value] = fp
      if direct is not None:
        agreement = _relative_difference(fp.q, direct.q)
    except errors.LyapcertError as e:
      solutions[oracles.Method.FIXED_POINT.value] = (
          SolverFailure.from_exception(e)
      )
  definiteness = None
  if direct is not None:
    scale = max(1.0, float(np.sum(np.abs(direct.q))))
    definiteness = direct.min_entry / scale
  margins = TriadMargins(
      stability=1.0 - stability.spectral_radius,
      observability=_observability_margin(ps.as_lti()),
      definiteness=definiteness,
  )
  return _build_report(
      doc.mode,
      stability,
      observability,
      solutions,
      positive,
      agreement,
      margins,
  )


def _log_report(report: TriadReport):
  logging.info(
      f'triad ({report.mode.value}-mode): verdicts={report.verdicts}, '
      f'consistent={report.consistent}'
  )
  if report.ill_conditioned:
    logging.warning(
        f'triad verdicts {report.verdicts} are inconsistent on '
        f'ill-conditioned data: {report.margins}'
    )
  elif not report.consistent:
    logging.error(f'triad verdicts {report.verdicts} violate the triad rule')
def outcome_to_dict(outcome: Outcome) -> dict[str, Any]:
  """Returns a JSON-ready dict for a solver outcome."""
  if isinstance(outcome, SolverFailure):
    return {'error': outcome.error, 'message': outcome.message}
  if isinstance(outcome, positive_systems.PositiveCertificate):
    return {
        'q': outcome.q.tolist(),
        'residual': outcome.residual,
        'positive': outcome.positive,
        'min_entry': outcome.min_entry,
        'alpha': outcome.alpha,
    }
  return {
      'Q': outcome.q.tolist(),
      'residual': outcome.residual,
      'method': outcome.method.value,
      'definiteness': outcome.definiteness.value,
      'min_eigenvalue': outcome.min_eigenvalue,
      'alpha': outcome.alpha,
      'iterations': outcome.iterations,
  }


def report_to_dict(report: TriadReport) -> dict[str, Any]:
  return {
      'stability': {
          'verdict': report.stability.stable,
          'spectral_radius': report.stability.spectral_radius,
      },
      'observability': {
          'verdict': report.observability.observable,
          'rank': report.observability.rank,
          'n': report.observability.n,
          'test': (
              'controllability'
              if report.mode is Mode.CONTROLLABILITY
              else 'observability'
          ),
      },
      'lyapunov': {
          'verdict': report.lyapunov,
          'equation': EQUATIONS[report.mode],
          'solutions': {
              name: outcome_to_dict(outcome)
              for name, outcome in report.solutions.items()
          },
          'agreement': report.agreement,
      },
      'consistency': {
          'verdict': report.consistent,
          'pattern': list(report.verdicts),
          'ill_conditioned': report.ill_conditioned,
          'margins': (
              None
              if report.margins is None
              else dataclasses.asdict(report.margins)
          ),
      },
  }


def format_float(x: float) -> str:
  return format(x, '.17g')


def to_json(value: Any) -> str:
  """Serializes with sorted keys and floats at 17 significant digits.

  Non-finite floats become null.

  Args:
    value: nested dicts, lists, strings, numbers, booleans and None.

  Returns:
    Compact, deterministic JSON text.
  """
  if value is None:
    return 'null'
  if isinstance(value, (bool, np.bool_)):
    return 'true' if value else 'false'
  if isinstance(value, (int, np.integer)):
    return str(int(value))
  if isinstance(value, (float, np.floating)):
    value = float(value)
    return format_float(value) if math.isfinite(value) else 'null'
  if isinstance(value, str):
    return json.dumps(value, ensure_ascii=False)
  if isinstance(value, dict):
    items = sorted(value.items())
    return '{' + ','.join(f'{to_json(k)}:{to_json(v)}' for k, v in items) + '}'
  if isinstance(value, (list, tuple)):
    return '[' + ','.join(to_json(v) for v in value) + ']'
  raise TypeError(f'cannot serialize {type(value)}')


def _text_outcome(name: str, outcome: Outcome) -> str:
  if isinstance(outcome, SolverFailure):
    return f'{name}: {outcome.error}: {outcome.message}'
  if isinstance(outcome, positive_systems.PositiveCertificate):
    return (
        f'{name}: q={to_json(outcome.q.tolist())}, '
        f'positive={to_json(outcome.positive)}, '
        f'residual={format_float(outcome.residual)}'
    )
  return (
      f'{name}: {outcome.definiteness.value}, '
      f'min eigenvalue={format_float(outcome.min_eigenvalue)}, '
      f'residual={format_float(outcome.residual)}'
  )


def render_report(report: TriadReport, fmt: Format = Format.JSON) -> bytes:
  """Serializes a report deterministically as JSON or as text lines."""
  fmt = Format(fmt)
  if fmt is Format.JSON:
    return (to_json(report_to_dict(report)) + '\n').encode('utf-8')
  test = (
      'controllable' if report.mode is Mode.CONTROLLABILITY else 'observable'
  )
  outcomes = '; '.join(
      _text_outcome(name, outcome)
      for name, outcome in report.solutions.items()
  )
  lines = [
      f'(i) stable: {to_json(report.stability.stable)} '
      f'(spectral radius {format_float(report.stability.spectral_radius)})',
      f'(ii) {test}: {to_json(report.observability.observable)} '
      f'(rank {report.observability.rank} of {report.observability.n})',
      f'(iii) {EQUATIONS[report.mode]} certified: '
      f'{to_json(report.lyapunov)} ({outcomes})',
      f'consistent: {to_json(report.consistent)}',
  ]
  if report.ill_conditioned:
    margins = to_json(dataclasses.asdict(report.margins))
    lines[-1] += f' (ill-conditioned, margins {margins})'
  return ('\n'.join(lines) + '\n').encode('utf-8')
