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
import importlib.resources

import lyapcert
from lyapcert import certifier
from lyapcert import errors


def example_names() -> list[str]:
  """Names of the bundled example documents."""
  package = importlib.resources.files(lyapcert)
  return sorted(
      entry.name.removesuffix('.json')
      for entry in package.joinpath('data').iterdir()
      if entry.name.endswith('.json')
  )


def load_example_bytes(name: str) -> bytes:
  """Load the raw JSON of a bundled example document."""
  if name not in example_names():
    raise errors.InputError(
        f'unknown example {name!r}, expected one of {example_names()}'
    )
  package = importlib.resources.files(lyapcert)
  return package.joinpath(f'data/{name}.json').read_bytes()


def load_example(name: str) -> certifier.InputDocument:
  """Load and validate a bundled example document."""
  return certifier.parse_input(load_example_bytes(name))
