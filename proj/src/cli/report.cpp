// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ppml/error.hpp"

namespace ppml {

namespace {

std::string number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string text(const Cell& c, int digits) {
  struct V {
    int digits;
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double d) const { return number(d, digits); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(V{digits}, c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

nlohmann::json to_json(const Cell& c) {
  struct V {
    nlohmann::json operator()(const std::string& s) const { return s; }
    nlohmann::json operator()(double d) const {
      return std::isfinite(d) ? nlohmann::json(d) : nlohmann::json(number(d, 17));
    }
    nlohmann::json operator()(std::int64_t i) const { return i; }
    nlohmann::json operator()(bool b) const { return b; }
  };
  return std::visit(V{}, c);
}

void write_file(const std::filesystem::path& p, const std::string& body,
                std::vector<std::string>& written) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError(p.string() + ": cannot open for writing");
  f << body;
  if (!f) throw ConfigError(p.string() + ": write failed");
  written.push_back(p.string());
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw ConfigError("table " + name + ": row has " + std::to_string(row.size()) +
                      " cells, expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

Table& Report::table(std::string name, std::string title, std::vector<std::string> columns) {
  tables.push_back({std::move(name), std::move(title), std::move(columns), {}, false});
  return tables.back();
}

void write_csv(std::ostream& os, const Table& t) {
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(text(row[i], 10));
    os << '\n';
  }
}

void write_json(std::ostream& os, const Report& r) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["command"] = r.command;
  j["meta"] = r.meta;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : r.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = to_json(row[i]);
      rows.push_back(std::move(obj));
    }
    j["tables"].push_back({{"name", t.name}, {"title", t.title}, {"columns", t.columns},
                           {"rows", std::move(rows)}});
  }
  j["notes"] = r.notes;
  os << j.dump(2) << '\n';
}

void write_markdown(std::ostream& os, const Report& r, bool include_detail) {
  os << "# ppml-sim " << r.command << "\n\n";
  for (const auto& [k, v] : r.meta) os << "- " << k << ": `" << v << "`\n";
  for (const auto& t : r.tables) {
    if (t.detail && !include_detail) {
      os << "\n## " << t.title << "\n\n" << t.rows.size() << " rows, see " << r.command << '_'
         << t.name << ".csv\n";
      continue;
    }
    os << "\n## " << t.title << "\n\n|";
    for (const auto& c : t.columns) os << ' ' << c << " |";
    os << "\n|";
    for (size_t i = 0; i < t.columns.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& row : t.rows) {
      os << '|';
      for (const auto& c : row) os << ' ' << text(c, 4) << " |";
      os << '\n';
    }
  }
  if (!r.notes.empty()) {
    os << '\n';
    for (const auto& n : r.notes) os << "> " << n << '\n';
  }
}

std::vector<std::string> write_report_files(const Report& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(dir + ": " + ec.message());
  std::vector<std::string> written;
  auto render = [](auto f) {
    std::ostringstream ss;
    f(ss);
    return ss.str();
  };
  write_file(fs::path(dir) / (r.command + ".json"), render([&](auto& os) { write_json(os, r); }),
             written);
  write_file(fs::path(dir) / (r.command + ".md"), render([&](auto& os) { write_markdown(os, r); }),
             written);
  for (size_t i = 0; i < r.tables.size(); ++i) {
    const std::string stem = i == 0 ? r.command : r.command + "_" + r.tables[i].name;
    write_file(fs::path(dir) / (stem + ".csv"),
               render([&](auto& os) { write_csv(os, r.tables[i]); }), written);
  }
  return written;
}

}  // namespace ppml
