#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>

#include "cavity/errors.hpp"

namespace cavity {

/// Comma-separated output with a header row; floating-point values go out
/// with 15 significant digits.
class CsvWriter {
public:
  CsvWriter(const std::string& path, std::initializer_list<const char*> columns) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path);
    bool first = true;
    for (const char* c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Values>
  void row(Values... values) {
    begin_row();
    (field(values), ...);
    end_row();
  }

  void begin_row() { first_in_row_ = true; }

  void field(double v) {
    separator();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    out_ << buf;
  }
  void field(int v) {
    separator();
    out_ << v;
  }

  void end_row() { out_ << '\n'; }

private:
  void separator() {
    if (!first_in_row_) out_ << ',';
    first_in_row_ = false;
  }

  std::ofstream out_;
  bool first_in_row_ = true;
};

}  // namespace cavity
