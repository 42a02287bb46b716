#ifndef MENUFORGE_NUMERIC_HPP
#define MENUFORGE_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace menuforge {

// Absolute tolerance for "these two reals are the same number".
inline constexpr double kAbsTol = 1e-9;
// Relative tolerance for comparisons between computed quantities.
inline constexpr double kRelTol = 1e-7;
// Default feasibility tolerance used by the verifier and the CLI.
inline constexpr double kDefaultVerifyTol = 1e-7;

inline bool approx_equal(double a, double b, double abs_tol = kAbsTol, double rel_tol = kRelTol) {
    double diff = std::fabs(a - b);
    if (diff <= abs_tol) return true;
    double scale = std::fmax(std::fabs(a), std::fabs(b));
    return diff <= rel_tol * scale;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace menuforge

#endif
