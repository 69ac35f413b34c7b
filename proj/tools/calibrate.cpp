// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fits data/calibration.yaml from the reference anchors and hand-set priors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "ppml/config.hpp"
#include "ppml/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fit the calibration file against reference measurements"};
  std::string anchors_path = ppml::default_anchors_path();
  std::string base_path;
  std::string out_path;
  app.add_option("--anchors", anchors_path, "anchors YAML")->capture_default_str();
  app.add_option("--base", base_path, "calibration priors YAML")->required();
  app.add_option("--out", out_path, "output calibration YAML (stdout when omitted)");
  CLI11_PARSE(app, argc, argv);
  try {
    const ppml::Anchors anchors = ppml::load_anchors_file(anchors_path);
    const ppml::CalibrationBundle base = ppml::load_calibration_file(base_path);
    std::vector<std::string> log;
    const ppml::CalibrationBundle fitted = ppml::fit_calibration(anchors, base, &log);
    for (const auto& line : log) std::cerr << line << '\n';
    const std::string text =
        "# Generated by ppml-calibrate from " + anchors_path + " and " + base_path + ".\n" +
        ppml::emit_calibration(fitted);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      out << text;
      if (!out) throw ppml::ConfigError(out_path + ":0:0: cannot write file");
    }
  } catch (const ppml::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
