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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qbm {

/// Named real columns over a shared, strictly increasing time column.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> column_names);

  void append(double t, const std::vector<double>& row);

  std::size_t rows() const { return time_.size(); }
  const std::vector<double>& time() const { return time_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  /// RFC-4180 style: header row, '.' decimal separator, shortest round-trip
  /// representation, independent of the global locale.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> time_;
  std::vector<std::vector<double>> columns_;
};

/// Locale-independent shortest round-trip formatting; "nan"/"inf" for non-finite.
std::string format_number(double value);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace qbm
