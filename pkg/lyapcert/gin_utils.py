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
"""Helpers for overriding solver tolerances with gin."""

import contextlib
import logging
import threading
from typing import Sequence, Union

import gin
from lyapcert import errors


_GIN_LOCK = threading.RLock()


def parse_config(
    gin_files: Sequence[str] = (),
    gin_bindings: Sequence[str] = (),
):
  """Parses `gin_files` and then `gin_bindings`, later values winning.

  Args:
    gin_files: paths of gin files with solver overrides.
    gin_bindings: individual bindings such as
      `'fixed_point_iterate.tol = 1e-13'`.
  """
  with _GIN_LOCK:
    try:
      gin.parse_config_files_and_bindings(
          list(gin_files), list(gin_bindings)
      )
    except (IOError, SyntaxError, ValueError) as e:
      raise errors.InputError(f'invalid gin configuration: {e}') from e
  if gin_files or gin_bindings:
    logging.info('Active solver config:\n%s', gin.config_str())


@contextlib.contextmanager
def specific_config(bindings: Union[str, Sequence[str]]):
  """Runs the body with only `bindings` active, then restores the config."""
  with _GIN_LOCK:
    # keep each binding on one line so it re-parses verbatim.
    saved = gin.config_str(max_line_length=max(80, len(gin.config_str())))
    gin.clear_config()
    try:
      gin.parse_config(bindings)
      yield
    finally:
      gin.clear_config()
      gin.parse_config(saved)
