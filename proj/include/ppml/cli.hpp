// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// The ppml-sim command line: scenario in, static reports out.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ppml {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;      // bad flags, files or names
inline constexpr int kExitInfeasible = 2;  // e.g. a starved key pool
inline constexpr int kExitVerify = 3;      // kernels-verify found a mismatch

// `args` excludes the program name. The report goes to `out` (Markdown by
// default) and, when a report directory is configured through
// --report-dir or $PPML_REPORT_DIR, to files there. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppml
