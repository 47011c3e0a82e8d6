// quadrature.hpp - adaptive Gauss-Kronrod integration (real or complex valued)
// with oscillation-aware panel splitting and a principal-value helper.

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>

#include "decomc/errors.hpp"

namespace decomc::quad {

struct Options {
    double rtol{1e-9};        // relative error target on the accumulated value
    double atol{0.0};         // absolute floor for the target
    unsigned max_depth{15};   // adaptive bisection depth per panel
    std::size_t max_panels{2'000'000};
};

template <class F>
using value_t = std::remove_cvref_t<std::invoke_result_t<F, double>>;

// Adaptive Gauss-Kronrod 7-15 on a finite interval.
template <class F>
value_t<F> integrate(F&& f, double a, double b, const Options& opts = {}) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0, l1 = 0.0;
    auto v = gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b,
                                                  opts.max_depth, opts.rtol, &err, &l1);
    const double target = std::max(opts.rtol * std::max(std::abs(v), l1 * 1e-3), opts.atol);
    if (!(err <= std::max(target, opts.rtol * l1)))
        throw QuadratureFailure("integrate: error estimate " + std::to_string(err) +
                                " above target on [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
    return v;
}

// Integrate over [a, b] in contiguous panels no wider than max_panel.
// Use a panel width of about half the integrand's oscillation period.
template <class F>
value_t<F> integrate_panels(F&& f, double a, double b, double max_panel,
                            const Options& opts = {}) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(b > a)) return value_t<F>{};
    const std::size_t n =
        (max_panel > 0.0 && max_panel < (b - a))
            ? static_cast<std::size_t>(std::ceil((b - a) / max_panel))
            : 1;
    if (n > opts.max_panels)
        throw QuadratureFailure("integrate_panels: " + std::to_string(n) +
                                " panels exceed the configured limit");
    const double h = (b - a) / static_cast<double>(n);
    value_t<F> sum{};
    double err_sum = 0.0, l1_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = a + h * static_cast<double>(k);
        const double hi = (k + 1 == n) ? b : lo + h;
        double err = 0.0, l1 = 0.0;
        sum += gauss_kronrod<double, 15>::integrate(f, lo, hi, opts.max_depth,
                                                    opts.rtol, &err, &l1);
        err_sum += err;
        l1_sum += l1;
    }
    const double target =
        std::max(opts.rtol * std::max(std::abs(sum), 1e-3 * l1_sum), opts.atol);
    if (!(err_sum <= target))
        throw QuadratureFailure("integrate_panels: accumulated error " +
                                std::to_string(err_sum) + " above target");
    return sum;
}

// P int_{c-delta}^{c+delta} g(w) / (w - c) dw via the odd-pair form
// int_0^delta [g(c+u) - g(c-u)] / u du, which is regular at u = 0.
template <class G>
value_t<G> pv_window(G&& g, double c, double delta, const Options& opts = {},
                     double max_panel = 0.0) {
    auto odd = [&](double u) { return (g(c + u) - g(c - u)) / u; };
    return integrate_panels(odd, 0.0, delta, max_panel, opts);
}

} // namespace decomc::quad
