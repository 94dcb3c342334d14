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
"""Configure FLAGS with default values for absltest."""
import sys

from absl import flags
import pytest


@pytest.fixture(scope='session', autouse=True)
def parse_flags():
  # Only pass the first item, because pytest flags shouldn't be parsed as absl
  # flags. Importing cli defines the flags that its tests override.
  import lyapcert.cli  # pylint: disable=g-import-not-at-top,unused-import
  flags.FLAGS(sys.argv[:1])


@pytest.fixture(autouse=True)
def reset_gin_config():
  # cli.main parses (and locks) the global gin config; reset it between tests
  # so each test sees a fresh, unlocked config.
  import gin  # pylint: disable=g-import-not-at-top
  yield
  gin.clear_config()
