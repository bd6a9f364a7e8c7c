#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

inline double bessel_j1(double x) { return std::cyl_bessel_j(1.0, x); }

/// Power series of J1, fine for |x| < ~20.
inline double bessel_j1_series(double x) {
  double term = x / 2.0;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0) / (double(k) * double(k + 1));
    sum += term;
  }
  return sum;
}

/// Root of f in [a, b] by bisection; f(a), f(b) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// First positive zero of J1, bracketed in [3, 4.5].
inline double first_j1_zero() { return bisect(bessel_j1, 3.0, 4.5); }

/// |field at the center| of an opaque disk: limit of r/(2 rho) J1(2 pi r rho/(lambda z)).
inline double center_magnitude(double r, double z, double lambda) {
  const double rho = 1e-15;
  return r / (2.0 * rho) * bessel_j1_series(2.0 * std::numbers::pi * r * rho / (lambda * z));
}

/// Maximum number of disjoint admissible (det, gt) pairs, by exhaustive
/// search over subsets of detections.
inline int optimal_matching(const std::vector<std::vector<bool>>& admissible, std::size_t n_det,
                            std::size_t n_gt) {
  std::map<std::pair<std::size_t, std::uint32_t>, int> memo;
  std::function<int(std::size_t, std::uint32_t)> best = [&](std::size_t g, std::uint32_t used) {
    if (g == n_gt) return 0;
    auto key = std::make_pair(g, used);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int value = best(g + 1, used);
    for (std::size_t d = 0; d < n_det; ++d)
      if (!(used >> d & 1u) && admissible[d][g])
        value = std::max(value, 1 + best(g + 1, used | (1u << d)));
    memo[key] = value;
    return value;
  };
  return best(0, 0);
}

/// Type-7 quantile computed from a sorted copy, written independently of
/// the library version.
inline double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double pos = p * double(v.size() - 1);
  const std::size_t i = std::size_t(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] * (1.0 - (pos - double(i))) + v[i + 1] * (pos - double(i));
}

/// Relative path -> bytes of every regular file under root.
inline std::map<std::string, std::string> tree_bytes(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[std::filesystem::relative(e.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
