# Copyright 2026 The repcheck Authors. All rights reserved.
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

"""Python access to the repcheck replication pipeline."""

from ._core import (
    EXIT_ABORTED,
    EXIT_EXHAUSTED,
    EXIT_SUCCESS,
    EXIT_USAGE,
    RepcheckError,
    discrepancy_report,
    main,
    normalize_label,
    normalize_result,
    parse_harness_error,
    render_run_report,
    result_kind,
    score,
)

__all__ = [
    "EXIT_ABORTED",
    "EXIT_EXHAUSTED",
    "EXIT_SUCCESS",
    "EXIT_USAGE",
    "RepcheckError",
    "discrepancy_report",
    "main",
    "normalize_label",
    "normalize_result",
    "parse_harness_error",
    "render_run_report",
    "result_kind",
    "score",
]
