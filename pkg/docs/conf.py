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

# Sphinx configuration for the lyapcert docs, written in MyST markdown.

import lyapcert  # verify this works

print(f"lyapcert: {lyapcert.__version__}, {lyapcert.__file__}")

project = 'lyapcert'
copyright = '2026, The lyapcert Authors'
author = 'lyapcert authors'
release = lyapcert.__version__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'myst_parser',
]
source_suffix = {'.md': 'markdown'}
exclude_patterns = ['_build', 'requirements.txt']

html_theme = 'furo'

# Google-style docstrings with types taken from signatures.
napoleon_google_docstring = True
napoleon_numpy_docstring = False
autodoc_typehints = 'signature'
autodoc_member_order = 'bysource'
