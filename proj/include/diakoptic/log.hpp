// Copyright 2026 The Diakoptic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

namespace diak {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Active log threshold.  Initialized once from the DIAKOPTIC_LOG environment
/// variable ("error", "warn", "info", "debug"; default "warn").
LogLevel log_level();

/// Emit a single line to stderr when `level` is at or below the active
/// threshold.  Deliberately tiny: diagnostics never go to stdout, so machine
/// output stays clean.
void log(LogLevel level, const std::string& message);

}  // namespace diak
