// Copyright 2026 The cpseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cpseq/analysis.hpp"
#include "cpseq/design.hpp"

namespace cpseq {

/// Published sixth-order coefficients for correctors of a pi pulse about -X.
struct ReferenceCoefficient {
  const char* label;
  FamilySpec family;
  double c;
};

inline const std::vector<ReferenceCoefficient>& table1_reference() {
  static const std::vector<ReferenceCoefficient> rows{
      {"W1", FamilySpec::wm(1), 4.7},
      {"W2", FamilySpec::wm(2), 59.1},
      {"W3", FamilySpec::wm(3), 283.4},
      {"W121", FamilySpec::five_pulse(1, 2, 1), 72.3},
      {"W112", FamilySpec::five_pulse(1, 1, 2), 190.6},
      {"W222", FamilySpec::five_pulse(2, 2, 2), 877.8},
  };
  return rows;
}

inline constexpr double kTable1Tolerance = 0.01;

struct Table1Row {
  std::string label;
  FitReport fit;
  double reference_c = 0.0;
  double rel_err = 0.0;
  bool within_tolerance = false;
  std::vector<double> phases;
  std::size_t solutions_considered = 1;
};

inline TargetRotation table1_target() { return TargetRotation(kPi, kPi); }

/// Fits every reference-table family for a pi pulse about -X. Families with a closed
/// form use it; W112, which has only root-finder solutions, reports the
/// solution whose coefficient is closest to the published value.
inline std::vector<Table1Row> reproduce_table1(double tolerance = kTable1Tolerance) {
  const TargetRotation target = table1_target();
  std::vector<Table1Row> out;
  for (const auto& ref : table1_reference()) {
    const auto designs = design_all(ref.family, target);
    const auto closed = closed_form_solution(designs);
    Table1Row row{ref.label, {}, ref.c, std::numeric_limits<double>::infinity(), false, {}, 0};
    for (const auto& d : designs) {
      if (closed && !(d.closed_form && d.branch == +1)) continue;
      const FitReport fit = fit_sequence(d.sequence, target);
      const double err = std::abs(fit.coefficient - ref.c) / ref.c;
      ++row.solutions_considered;
      if (err < row.rel_err) {
        row.rel_err = err;
        row.fit = fit;
        row.phases = d.phases;
      }
    }
    row.within_tolerance = row.rel_err <= tolerance;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cpseq
