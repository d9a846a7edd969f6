#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "process.hpp"

namespace ppdepth {

enum class DistanceMethod { closed_form, quadrature };

inline constexpr std::size_t default_quadrature_grid = 4096;
/// Distances below this are reported as exactly zero.
inline constexpr double distance_floor = 1e-12;

/// f(t) = sum_i K(t - e_i). The event list is the representation; a grid
/// cache is optional and only used for plotting.
class SmoothedCurve {
public:
    SmoothedCurve(KernelSpec spec, std::vector<double> events)
        : spec_(spec), events_(std::move(events)) {}

    const KernelSpec& spec() const { return spec_; }
    const std::vector<double>& events() const { return events_; }
    double T() const { return spec_.T(); }

    double operator()(double t) const {
        double v = 0.0;
        for (double e : events_) v += spec_(t - e);
        return v;
    }

    /// Values at grid_size uniform points 0, T/(grid_size-1), ..., T.
    std::vector<double> evaluate_grid(std::size_t grid_size) const {
        require(grid_size >= 2, "evaluate_grid: grid_size must be >= 2");
        if (grid_cache_ && grid_cache_->size() == grid_size) return *grid_cache_;
        std::vector<double> out(grid_size);
        const double step = T() / static_cast<double>(grid_size - 1);
        for (std::size_t i = 0; i < grid_size; ++i) out[i] = (*this)(step * static_cast<double>(i));
        return out;
    }

    /// Copy of this curve carrying a precomputed grid.
    SmoothedCurve cached(std::size_t grid_size) const {
        SmoothedCurve c = *this;
        c.grid_cache_ = std::make_shared<const std::vector<double>>(evaluate_grid(grid_size));
        return c;
    }

private:
    KernelSpec spec_;
    std::vector<double> events_;
    std::shared_ptr<const std::vector<double>> grid_cache_;
};

inline SmoothedCurve smooth(const PointProcess& p, const KernelSpec& spec) {
    require(p.T == spec.T(), "smooth: process T (" + std::to_string(p.T) + ") differs from kernel T (" +
                                 std::to_string(spec.T()) + ")");
    return SmoothedCurve(spec, p.events);
}

/// I(u, v) = int_0^T K(t - u) K(t - v) dt for the Gaussian family:
/// the product of two Gaussians is a Gaussian centred at (u + v) / 2 with
/// precision 2 c2 / T^2, scaled by exp(-c2 (u - v)^2 / (2 T^2)).
inline double gram_cross_integral(double u, double v, const KernelSpec& spec) {
    require(spec.family() == KernelFamily::gaussian, "gram_cross_integral: Gaussian family only");
    const double T = spec.T();
    const double c2 = spec.c2();
    const double c1 = spec.c1();
    const double d = u - v;
    const double m = 0.5 * (u + v);
    const double s = 2.0 * std::sqrt(c2) / T;
    const double mass = numeric::normal_cdf_diff(s * (T - m), -s * m);
    return c1 * c1 * std::exp(-c2 * d * d / (2.0 * T * T)) * T * std::sqrt(std::numbers::pi / (2.0 * c2)) * mass;
}

/// sum_i sum_j I(a_i, b_j).
inline double pair_integral_sum(std::span<const double> a, std::span<const double> b, const KernelSpec& spec) {
    numeric::kahan_sum s;
    for (double x : a)
        for (double y : b) s.add(gram_cross_integral(x, y, spec));
    return s.value();
}

/// sum_i sum_j I(a_i, a_j), exploiting symmetry.
inline double self_integral_sum(std::span<const double> a, const KernelSpec& spec) {
    numeric::kahan_sum diag, off;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diag.add(gram_cross_integral(a[i], a[i], spec));
        for (std::size_t j = i + 1; j < a.size(); ++j) off.add(gram_cross_integral(a[i], a[j], spec));
    }
    return diag.value() + 2.0 * off.value();
}

/// ||f_a - f_b||_2^2 in closed form. Non-negative; exactly symmetric.
inline double squared_l2_distance(std::span<const double> a, std::span<const double> b, const KernelSpec& spec) {
    if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 0.0;
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) std::swap(a, b);
    const double v = self_integral_sum(a, spec) + self_integral_sum(b, spec) - 2.0 * pair_integral_sum(a, b, spec);
    return std::max(v, 0.0);
}

namespace detail {
// f_a(t) - f_b(t); equal-size lists are differenced pairwise, which keeps
// nearby processes from cancelling catastrophically.
inline double curve_difference(std::span<const double> a, std::span<const double> b, const KernelSpec& k, double t) {
    numeric::kahan_sum s;
    if (a.size() == b.size()) {
        for (std::size_t i = 0; i < a.size(); ++i) s.add(k(t - a[i]) - k(t - b[i]));
    } else {
        for (double x : a) s.add(k(t - x));
        for (double y : b) s.add(-k(t - y));
    }
    return s.value();
}
} // namespace detail

/// int_0^T |f_a - f_b|^p by composite Simpson on grid_size + 1 points.
inline double lp_integral_quadrature(std::span<const double> a, std::span<const double> b, const KernelSpec& spec,
                                     double p, std::size_t grid_size) {
    return numeric::simpson(
        [&](double t) { return std::pow(std::abs(detail::curve_difference(a, b, spec, t)), p); }, 0.0, spec.T(),
        grid_size);
}

inline double lp_distance(std::span<const double> a, std::span<const double> b, const KernelSpec& spec,
                          double p = 2.0, DistanceMethod method = DistanceMethod::closed_form,
                          std::size_t grid_size = default_quadrature_grid) {
    require(std::isfinite(p) && p >= 1.0, "lp_distance: p must be >= 1");
    double d = 0.0;
    if (method == DistanceMethod::closed_form) {
        require(p == 2.0 && spec.family() == KernelFamily::gaussian,
                "lp_distance: closed form is only available for p = 2 with the Gaussian family");
        d = std::sqrt(squared_l2_distance(a, b, spec));
    } else {
        require(grid_size >= 2 && grid_size % 2 == 0, "lp_distance: grid_size must be even and >= 2");
        if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 0.0;
        d = std::pow(lp_integral_quadrature(a, b, spec, p, grid_size), 1.0 / p);
    }
    return d < distance_floor ? 0.0 : d;
}

inline double lp_distance(const SmoothedCurve& a, const SmoothedCurve& b, double p = 2.0,
                          DistanceMethod method = DistanceMethod::closed_form,
                          std::size_t grid_size = default_quadrature_grid) {
    require(a.spec() == b.spec(), "lp_distance: curves use different kernels");
    return lp_distance(a.events(), b.events(), a.spec(), p, method, grid_size);
}

/// Picks the closed form whenever it applies.
inline DistanceMethod preferred_method(const KernelSpec& spec, double p) {
    return (p == 2.0 && spec.family() == KernelFamily::gaussian) ? DistanceMethod::closed_form
                                                                : DistanceMethod::quadrature;
}

/// d_{K,p} between two processes.
inline double distance(const PointProcess& a, const PointProcess& b, const KernelSpec& spec, double p = 2.0) {
    require(a.T == spec.T() && b.T == spec.T(), "distance: process T differs from kernel T");
    return lp_distance(a.events, b.events, spec, p, preferred_method(spec, p));
}

using Matrix = std::vector<std::vector<double>>;

/// Pairwise d_{K,p}; rows from `rows`, columns from `cols`.
inline Matrix distance_matrix(const std::vector<PointProcess>& rows, const std::vector<PointProcess>& cols,
                              const KernelSpec& spec, double p = 2.0) {
    Matrix m(rows.size(), std::vector<double>(cols.size()));
    parallel_for(rows.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j) m[i][j] = distance(rows[i], cols[j], spec, p);
    });
    return m;
}

/// Symmetric pairwise matrix with an exactly zero diagonal.
inline Matrix distance_matrix(const std::vector<PointProcess>& ps, const KernelSpec& spec, double p = 2.0) {
    const std::size_t n = ps.size();
    Matrix m(n, std::vector<double>(n, 0.0));
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) m[i][j] = distance(ps[i], ps[j], spec, p);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) m[i][j] = m[j][i];
    return m;
}

} // namespace ppdepth
