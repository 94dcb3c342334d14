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
"""Command line entry point.

Usage:

  lyapcert triad <file> [--format=json|text]
  lyapcert solve <file> --method=fixed-point|direct|series
  lyapcert check-stability <file>
  lyapcert check-observability <file>
  lyapcert positive-solve <file>
  lyapcert theta-map --lambda=1.2 --gamma=0.8 --theta0=0.09 --steps=80
  lyapcert lambda-sweep <file> --alphas=0.25,0.5,1,2

`<file>` is a JSON document (see `certifier.parse_input`) or `demo:<name>`
for a bundled example. Solver tolerances can be overridden with
`--gin_file` and `--gin_bindings`.
"""

from __future__ import annotations

import dataclasses
import sys
from typing import Sequence

from absl import app
from absl import flags
from absl import logging
from lyapcert import certifier
from lyapcert import demo
from lyapcert import errors
from lyapcert import fixed_point
from lyapcert import gin_utils
from lyapcert import oracles
from lyapcert import positive_systems
from lyapcert import systems
from lyapcert import theta_map


_FORMAT = flags.DEFINE_enum(
    'format', 'json', ['json', 'text'], 'Output format for reports.'
)
_METHOD = flags.DEFINE_enum(
    'method',
    oracles.Method.FIXED_POINT.value,
    [m.value for m in oracles.Method],
    'Solver used by the `solve` command.',
)
_LAMBDA = flags.DEFINE_float('lambda', None, 'θ-map normalizer λ of X.')
_GAMMA = flags.DEFINE_float('gamma', None, 'θ-map normalizer γ of Y.')
_THETA0 = flags.DEFINE_float('theta0', 0.0, 'Starting θ for the θ-map.')
_STEPS = flags.DEFINE_integer('steps', 50, 'Number of θ-map iterations.')
_ALPHAS = flags.DEFINE_list(
    'alphas', ['0.25', '0.5', '1', '2', '4'], 'α grid for `lambda-sweep`.'
)
_GIN_FILE = flags.DEFINE_multi_string(
    'gin_file', [], 'Gin files with solver overrides.'
)
_GIN_BINDINGS = flags.DEFINE_multi_string(
    'gin_bindings', [], 'Individual gin bindings.'
)

DEMO_PREFIX = 'demo:'


@dataclasses.dataclass(frozen=True)
class CommandResult:
  output: bytes
  exit_code: int = errors.EXIT_SUCCESS


def read_document(path: str) -> certifier.InputDocument:
  """Reads and parses an input file or a `demo:<name>` example."""
  if path.startswith(DEMO_PREFIX):
    return certifier.parse_input(
        demo.load_example_bytes(path.removeprefix(DEMO_PREFIX))
    )
  try:
    with open(path, 'rb') as f:
      contents = f.read()
  except OSError as e:
    raise errors.InputError(f'cannot read input file {path!r}: {e}') from e
  return certifier.parse_input(contents)


def _render_dict(value: dict, fmt: certifier.Format) -> bytes:
  if fmt is certifier.Format.JSON:
    return (certifier.to_json(value) + '\n').encode('utf-8')
  lines = [f'{key}: {certifier.to_json(value[key])}' for key in sorted(value)]
  return ('\n'.join(lines) + '\n').encode('utf-8')


def _single_path(command: str, args: Sequence[str]) -> str:
  if len(args) != 1:
    raise errors.InputError(f'{command} expects exactly one input file')
  return args[0]


def triad(path: str, fmt: certifier.Format) -> CommandResult:
  report = certifier.run_triad(read_document(path))
  exit_code = errors.EXIT_SUCCESS
  if report.violates_triad:
    exit_code = errors.EXIT_INCONSISTENCY
  return CommandResult(certifier.render_report(report, fmt), exit_code)


def solve(
    path: str, method: oracles.Method, fmt: certifier.Format
) -> CommandResult:
  sys_ = read_document(path).system()
  if method is oracles.Method.FIXED_POINT:
    solution = fixed_point.solve_via_alpha_bisection(sys_)
  elif method is oracles.Method.DIRECT:
    solution = oracles.solve_direct(sys_)
  else:
    solution = oracles.solve_series(sys_)
  return CommandResult(_render_dict(certifier.outcome_to_dict(solution), fmt))


def check_stability(path: str, fmt: certifier.Format) -> CommandResult:
  verdict = systems.is_asymptotically_stable(read_document(path).system())
  return CommandResult(_render_dict(dataclasses.asdict(verdict), fmt))


def check_observability(path: str, fmt: certifier.Format) -> CommandResult:
  verdict = systems.is_observable(read_document(path).system())
  return CommandResult(_render_dict(dataclasses.asdict(verdict), fmt))


def positive_solve(path: str, fmt: certifier.Format) -> CommandResult:
  ps = read_document(path).positive_system()
  certificate = positive_systems.solve_positive_q(ps)
  output = _render_dict(certifier.outcome_to_dict(certificate), fmt)
  return CommandResult(output)


def theta(
    lam: float | None, gamma: float | None, theta0: float, steps: int
) -> CommandResult:
  """Cobweb iterates as CSV with header `k,theta`."""
  if lam is None or gamma is None:
    raise errors.InputError('theta-map requires --lambda and --gamma')
  params = theta_map.ThetaMapParams(lam=lam, gamma=gamma)
  result = theta_map.cobweb_iterates(params, theta0, steps)
  if result.diverged:
    logging.info('θ-map iterates diverged after %d steps', len(result.thetas))
  rows = ['k,theta'] + [
      f'{k},{certifier.format_float(t)}' for k, t in enumerate(result.thetas)
  ]
  return CommandResult(('\n'.join(rows) + '\n').encode('utf-8'))


def lambda_sweep(path: str, alphas: Sequence[str]) -> CommandResult:
  """λ_α on a grid of α as CSV with header `alpha,lambda`."""
  try:
    values = [float(a) for a in alphas]
  except ValueError as e:
    raise errors.InputError(f'--alphas must be numbers: {e}') from e
  lams = fixed_point.lambda_sweep(read_document(path).system(), values)
  rows = ['alpha,lambda'] + [
      f'{certifier.format_float(a)},{certifier.format_float(lam)}'
      for a, lam in zip(values, lams)
  ]
  return CommandResult(('\n'.join(rows) + '\n').encode('utf-8'))


COMMANDS = (
    'triad',
    'solve',
    'check-stability',
    'check-observability',
    'positive-solve',
    'theta-map',
    'lambda-sweep',
)


def dispatch(args: Sequence[str]) -> CommandResult:
  """Runs the command named by `args[0]` with the current flag values."""
  if not args or args[0] not in COMMANDS:
    raise errors.InputError(f'expected one of the commands {COMMANDS}')
  command, rest = args[0], list(args[1:])
  fmt = certifier.Format(_FORMAT.value)
  if command == 'theta-map':
    if rest:
      raise errors.InputError('theta-map takes no positional arguments')
    return theta(_LAMBDA.value, _GAMMA.value, _THETA0.value, _STEPS.value)
  path = _single_path(command, rest)
  if command == 'triad':
    return triad(path, fmt)
  if command == 'solve':
    return solve(path, oracles.Method(_METHOD.value), fmt)
  if command == 'check-stability':
    return check_stability(path, fmt)
  if command == 'check-observability':
    return check_observability(path, fmt)
  if command == 'positive-solve':
    return positive_solve(path, fmt)
  return lambda_sweep(path, _ALPHAS.value)


def main(argv: Sequence[str]) -> int:
  try:
    gin_utils.parse_config(_GIN_FILE.value, _GIN_BINDINGS.value)
    result = dispatch(argv[1:])
  except errors.LyapcertError as e:
    print(f'error: {e}', file=sys.stderr)
    return e.exit_code
  sys.stdout.buffer.write(result.output)
  sys.stdout.flush()
  return result.exit_code


def run():
  app.run(main)


if __name__ == '__main__':
  run()
