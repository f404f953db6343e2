# Copyright 2026 The msim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Trace-driven simulator for proactive GPU memory scheduling."""

from ._msim import (
    ConfigError,
    Error,
    HwConfig,
    ParseError,
    ScenarioConfig,
    analyze,
    load_config,
    main,
    parse_config,
    preset,
    preset_names,
    sweep,
)

__all__ = [
    "ConfigError",
    "Error",
    "HwConfig",
    "ParseError",
    "ScenarioConfig",
    "analyze",
    "load_config",
    "main",
    "parse_config",
    "preset",
    "preset_names",
    "sweep",
]
