# Copyright 2026 The riskbatch Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Risk-aware batch testing simulator."""

from riskbatch._core import (
    CommitStream,
    ConfigError,
    Error,
    InvariantError,
    ParseError,
    ValidationError,
    aged_risk,
    batch_fail_prob,
    generate,
    linear_risk_sum,
    run_cli,
    simulate,
    split,
    tune,
    valid_kinds,
)

__all__ = [
    "CommitStream",
    "ConfigError",
    "Error",
    "InvariantError",
    "ParseError",
    "ValidationError",
    "aged_risk",
    "batch_fail_prob",
    "generate",
    "linear_risk_sum",
    "run_cli",
    "simulate",
    "split",
    "tune",
    "valid_kinds",
]
