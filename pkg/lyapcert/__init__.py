# Copyright 2026 The lyapcert Authors.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     https://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Defines the lyapcert module."""

# pylint: disable=unused-import
# pylint: disable=g-bad-import-order

import jax

# All arrays, including those traced by jax, are float64.
jax.config.update('jax_enable_x64', True)

import lyapcert.errors
import lyapcert.linalg
import lyapcert.systems
import lyapcert.oracles
import lyapcert.fixed_point
import lyapcert.theta_map
import lyapcert.positive_systems
import lyapcert.certifier
import lyapcert.gin_utils
import lyapcert.demo

from lyapcert.certifier import parse_input
from lyapcert.certifier import render_report
from lyapcert.certifier import run_triad
from lyapcert.fixed_point import solve_via_alpha_bisection
from lyapcert.oracles import solve_direct
from lyapcert.oracles import solve_series
from lyapcert.systems import LtiSystem

__version__ = "0.1.0"  # keep in sync with pyproject.toml
