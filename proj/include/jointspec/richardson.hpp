#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace jointspec {

template <class T>
struct Extrapolated {
  T value;
  double error = std::numeric_limits<double>::infinity();
  int levels = 0;  ///< tableau rows consumed before stopping
};

/// Neville-style Richardson tableau (as in Ridders' method). `estimates[k]`
/// is an approximation computed with step h_k, steps shrinking by a fixed
/// ratio, whose error expands in powers of h^p; `factor` = ratio^p.
/// Returns the tableau entry with the smallest error estimate and stops
/// once the error grows past twice the best seen (roundoff has taken over).
template <class T, class Norm>
Extrapolated<T> richardson(const std::vector<T>& estimates, double factor, Norm norm) {
  Extrapolated<T> best{estimates.empty() ? T{} : estimates.front(),
                       std::numeric_limits<double>::infinity(), 0};
  if (estimates.empty()) return best;

  std::vector<T> prev{estimates.front()};
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    std::vector<T> row{estimates[i]};
    double fac = factor;
    for (std::size_t j = 1; j <= i; ++j) {
      const T& a = row[j - 1];
      const T& b = prev[j - 1];
      row.push_back(a + (a - b) * (1.0 / (fac - 1.0)));
      fac *= factor;
      const double err = std::max(norm(row[j] - row[j - 1]), norm(row[j] - prev[j - 1]));
      if (err <= best.error) {
        best.value = row[j];
        best.error = err;
        best.levels = static_cast<int>(i) + 1;
      }
    }
    if (norm(row[i] - prev[i - 1]) >= 2.0 * best.error) break;
    prev = std::move(row);
  }
  return best;
}

}  // namespace jointspec
