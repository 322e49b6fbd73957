// Copyright 2026 The qbm Authors
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

#include "qbm/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "qbm/error.hpp"
#include "qbm/types.hpp"

namespace qbm {

TimeGrid TimeGrid::covering(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::Domain, "time step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::Domain, "t_end must be non-negative");
  const double ratio = t_end / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::Domain, "t_end must be an integer multiple of dt");
  }
  return TimeGrid{dt, static_cast<std::size_t>(steps)};
}

TimeSeries::TimeSeries(std::vector<std::string> column_names)
    : names_(std::move(column_names)), columns_(names_.size()) {}

void TimeSeries::append(double t, const std::vector<double>& row) {
  if (row.size() != names_.size()) throw Error(ErrorCode::Domain, "row width does not match columns");
  if (!time_.empty() && !(t > time_.back())) throw Error(ErrorCode::Domain, "time column must be strictly increasing");
  time_.push_back(t);
  for (std::size_t c = 0; c < row.size(); ++c) columns_[c].push_back(row[c]);
}

const std::vector<double>& TimeSeries::column(std::string_view name) const {
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (names_[c] == name) return columns_[c];
  }
  throw Error(ErrorCode::Domain, "no column named " + std::string(name));
}

bool TimeSeries::has_column(std::string_view name) const {
  for (const auto& n : names_) {
    if (n == name) return true;
  }
  return false;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error(ErrorCode::Io, "number formatting failed");
  return std::string(buf, end);
}

std::string TimeSeries::to_csv() const {
  std::string out = "t";
  for (const auto& n : names_) {
    out += ',';
    out += n;
  }
  out += '\n';
  for (std::size_t r = 0; r < time_.size(); ++r) {
    out += format_number(time_[r]);
    for (const auto& col : columns_) {
      out += ',';
      out += format_number(col[r]);
    }
    out += '\n';
  }
  return out;
}

void TimeSeries::write_csv(const std::filesystem::path& path) const { write_text_file(path, to_csv()); }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace qbm
