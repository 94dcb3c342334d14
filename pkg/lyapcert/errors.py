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
"""Exceptions raised by lyapcert, each tagged with a CLI exit code."""

EXIT_SUCCESS = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2
EXIT_INCONSISTENCY = 3


class LyapcertError(Exception):
  """Base class for all errors raised by lyapcert."""

  exit_code: int = EXIT_NUMERICAL_FAILURE


class InputError(LyapcertError, ValueError):
  """Raised for malformed input documents or command line arguments."""

  exit_code = EXIT_INPUT_ERROR


class DimensionError(LyapcertError, ValueError):
  """Raised if matrix or vector shapes are incompatible."""

  exit_code = EXIT_INPUT_ERROR


class SingularSystemError(LyapcertError):
  """Raised if a linear system is (numerically) singular."""


class DegenerateMapError(LyapcertError):
  """Raised if a normalizing denominator vanishes."""


class PreconditionError(LyapcertError):
  """Raised if a solver is called outside the regime it is defined for."""


class NumericalFailureError(LyapcertError):
  """Raised if an iteration, bracket or series fails to reach tolerance."""


class PoleError(LyapcertError):
  """Raised if the scalar θ-map is evaluated at its asymptote."""

