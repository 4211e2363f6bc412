/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include <cstdio>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

/// CSV dialect shared by every table the library emits: comma separator,
/// header row, LF endings, reals in scientific notation with 17 significant
/// digits, booleans as true/false.
namespace qecdecay::csv {

inline std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

inline std::string boolean(bool b) { return b ? "true" : "false"; }

class Table {
public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string> &header() const { return header_; }
  const std::vector<std::vector<std::string>> &rows() const { return rows_; }

  std::string str() const {
    std::string out;
    append_line(out, header_);
    for (const auto &r : rows_)
      append_line(out, r);
    return out;
  }

private:
  static void append_line(std::string &out, const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i)
        out += ',';
      out += cells[i];
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace qecdecay::csv
