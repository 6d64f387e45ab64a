#pragma once

#include <cmath>
#include <utility>

namespace mdiqkd::detail {

// Golden-section maximization of a unimodal function on [lo, hi].
// Stops when the bracket width drops below abs_tol + rel_tol*|x|.
// Returns {argmax, max}.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double rel_tol,
                                     double abs_tol = 0.0, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;  // 1/phi
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter; ++it) {
        if (b - a <= abs_tol + rel_tol * std::abs(0.5 * (a + b))) break;
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace mdiqkd::detail
