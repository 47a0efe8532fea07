// Copyright 2026 The ettc Authors
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

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

namespace ettc {

std::optional<double> mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); needs at least two values.
std::optional<double> sample_std(std::span<const double> values);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-tailed p-value of a Student-t statistic with `df` degrees of freedom.
double students_t_two_tailed(double t, double df);

struct PearsonStats {
  double r = 0.0;
  double r_squared = 0.0;
  double ci_low = 0.0;   // Fisher z interval, 95 %
  double ci_high = 0.0;
  double p_two_tailed = 1.0;
  std::size_t n = 0;
};

inline constexpr double kFisherZ95 = 1.96;

/// Sample Pearson correlation with its Fisher-z confidence interval and the
/// two-tailed t-test p-value. Throws kTooFewPairs for n < 4 and kUndefined
/// when either coordinate has zero variance.
PearsonStats pearson_stats(std::span<const std::pair<double, double>> pairs);

}  // namespace ettc
