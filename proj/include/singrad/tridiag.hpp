#pragma once

#include "singrad/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace singrad {

/// Tridiagonal system; lower[0] and upper[n-1] are ignored.
struct Tridiag {
    std::vector<double> lower, diag, upper, rhs;

    std::size_t size() const { return diag.size(); }
};

/// Thomas elimination. Throws SingularSystemError when a pivot collapses
/// relative to the row scale.
inline std::vector<double> solve_tridiag(Tridiag sys) {
    const std::size_t n = sys.size();
    if (n == 0 || sys.lower.size() != n || sys.upper.size() != n ||
        sys.rhs.size() != n)
        throw DomainError("solve_tridiag: inconsistent band sizes");

    for (std::size_t i = 1; i < n; ++i) {
        const double scale = std::abs(sys.diag[i - 1]) + std::abs(sys.upper[i - 1]) +
                             (i >= 2 ? std::abs(sys.lower[i - 1]) : 0.0);
        if (std::abs(sys.diag[i - 1]) < 1e-300 + 1e-14 * scale)
            throw SingularSystemError("solve_tridiag: vanishing pivot");
        const double m = sys.lower[i] / sys.diag[i - 1];
        sys.diag[i] -= m * sys.upper[i - 1];
        sys.rhs[i] -= m * sys.rhs[i - 1];
    }
    const double tail_scale = std::abs(sys.lower[n - 1]) + std::abs(sys.diag[n - 1]);
    if (std::abs(sys.diag[n - 1]) < 1e-300 + 1e-14 * tail_scale)
        throw SingularSystemError("solve_tridiag: vanishing final pivot");

    std::vector<double> x(n);
    x[n - 1] = sys.rhs[n - 1] / sys.diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] = (sys.rhs[i] - sys.upper[i] * x[i + 1]) / sys.diag[i];
    return x;
}

} // namespace singrad
