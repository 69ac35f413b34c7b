// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Static reports: named tables rendered as CSV, JSON and Markdown.

#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ppml {

inline constexpr std::string_view kReportSchema = "ppml-report/1";

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::string name;  // file-name safe
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool detail = false;  // long series: written to files, left out of summaries

  // Throws ConfigError when the row width does not match the columns.
  void add(std::vector<Cell> row);
};

struct Report {
  std::string command;
  // Echoed verbatim; always carries "seed" and "calibration_sha256".
  std::map<std::string, std::string> meta;
  std::vector<Table> tables;
  std::vector<std::string> notes;

  Table& table(std::string name, std::string title, std::vector<std::string> columns);
};

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Report& r);
void write_markdown(std::ostream& os, const Report& r, bool include_detail = true);

// Writes <command>.json, <command>.md and one <command>[_<table>].csv per
// table into `dir`, creating it if needed. Returns the paths written.
std::vector<std::string> write_report_files(const Report& r, const std::string& dir);

}  // namespace ppml
