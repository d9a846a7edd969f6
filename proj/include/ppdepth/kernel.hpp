#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace ppdepth {

/// Smoothing kernel families. Only families with closed-form pair
/// integrals belong here; adding one means extending smoothfn.hpp too.
enum class KernelFamily { gaussian };

inline std::string to_string(KernelFamily f) {
    switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    }
    return "unknown";
}

inline KernelFamily parse_kernel_family(const std::string& s) {
    if (s == "gaussian" || s == "Gaussian") return KernelFamily::gaussian;
    throw invalid_input("unknown kernel family '" + s + "'");
}

/// K(x; T) = c1 * exp(-c2 x^2 / T^2). Immutable after construction.
class KernelSpec {
public:
    KernelSpec(double c1, double c2, double T, KernelFamily family = KernelFamily::gaussian)
        : family_(family), c1_(c1), c2_(c2), T_(T) {
        require(std::isfinite(c1) && c1 > 0.0, "kernel: c1 must be positive");
        require(std::isfinite(c2) && c2 > 0.0, "kernel: c2 must be positive");
        require(std::isfinite(T) && T > 0.0, "kernel: T must be positive");
    }

    /// Skips validation. Only for exercising the properness checker on
    /// deliberately broken constants.
    static KernelSpec unchecked(double c1, double c2, double T,
                                KernelFamily family = KernelFamily::gaussian) {
        KernelSpec k;
        k.family_ = family;
        k.c1_ = c1;
        k.c2_ = c2;
        k.T_ = T;
        return k;
    }

    KernelFamily family() const { return family_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double T() const { return T_; }

    /// Same constants on a different interval length.
    KernelSpec with_T(double T) const { return {c1_, c2_, T, family_}; }

    double operator()(double x) const { return c1_ * std::exp(-c2_ * (x * x) / (T_ * T_)); }

    /// dK/dx.
    double derivative(double x) const { return -2.0 * c2_ * x / (T_ * T_) * (*this)(x); }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
    KernelSpec() = default;

    KernelFamily family_ = KernelFamily::gaussian;
    double c1_ = 1.0;
    double c2_ = 1.0;
    double T_ = 1.0;
};

inline double evaluate(const KernelSpec& spec, double x) { return spec(x); }

struct ConditionResult {
    bool pass = false;
    double value = 0.0; // the statistic the verdict is based on
    std::string evidence;
};

struct PropernessReport {
    ConditionResult continuous_nonnegative; // condition 1
    ConditionResult positive_at_zero;       // condition 2
    ConditionResult linear_independence;    // condition 3 (Gram surrogate)
    ConditionResult scale_invariance;       // condition 4

    bool all_pass() const {
        return continuous_nonnegative.pass && positive_at_zero.pass &&
               linear_independence.pass && scale_invariance.pass;
    }
};

inline constexpr double gram_singular_floor = 1e-10;

/// Gram matrix G_ij = int_0^T K(x - s_i) K(x - s_j) dx by Simpson quadrature,
/// rows normalized to unit length; returns its smallest singular value.
inline double gram_min_singular_value(const KernelSpec& spec, const std::vector<double>& shifts,
                                      std::size_t grid_size = 2048) {
    const auto n = static_cast<Eigen::Index>(shifts.size());
    if (n == 0) return 0.0;
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double si = shifts[static_cast<std::size_t>(i)];
            const double sj = shifts[static_cast<std::size_t>(j)];
            const double v = numeric::simpson(
                [&](double x) { return spec(x - si) * spec(x - sj); }, 0.0, spec.T(), grid_size);
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = G.row(i).norm();
        if (norm > 0.0) G.row(i) /= norm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    return svd.singularValues()(n - 1);
}

/// Numerically checks the four properness conditions. Failures are
/// reported, never thrown.
inline PropernessReport check_properness(const KernelSpec& spec, std::size_t n_shift_points = 5,
                                         std::size_t grid_size = 512, std::uint64_t seed = 0) {
    require(n_shift_points >= 2, "check_properness: need at least 2 shift points");
    require(grid_size >= 16, "check_properness: grid_size must be >= 16");
    PropernessReport rep;
    const double T = spec.T();
    Rng rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // 1. Non-negative and continuous over [-2T, 2T]: no negative values and
    // no adjacent jump above the Lipschitz bound (times a safety factor).
    {
        const double lo = -2.0 * T, hi = 2.0 * T;
        const double step = (hi - lo) / static_cast<double>(grid_size);
        const double lipschitz = 2.0 * std::abs(spec.c1()) * std::abs(spec.c2()) / T;
        const double allowed = lipschitz * step * 10.0;
        double min_val = std::numeric_limits<double>::infinity();
        double max_jump = 0.0;
        double prev = spec(lo);
        bool finite = std::isfinite(prev);
        min_val = std::min(min_val, prev);
        for (std::size_t i = 1; i <= grid_size; ++i) {
            const double v = spec(lo + step * static_cast<double>(i));
            finite = finite && std::isfinite(v);
            min_val = std::min(min_val, v);
            max_jump = std::max(max_jump, std::abs(v - prev));
            prev = v;
        }
        auto& c = rep.continuous_nonnegative;
        c.pass = finite && min_val >= 0.0 && max_jump <= allowed;
        c.value = max_jump;
        std::ostringstream os;
        os << "min=" << min_val << " max_jump=" << max_jump << " allowed=" << allowed;
        c.evidence = os.str();
    }

    // 2. K(0) > 0.
    {
        auto& c = rep.positive_at_zero;
        c.value = spec(0.0);
        c.pass = std::isfinite(c.value) && c.value > 0.0;
        c.evidence = "K(0)=" + std::to_string(c.value);
    }

    // 3. Gram nonsingularity at stratified random shifts (one per stratum,
    // jittered inside its middle half).
    {
        std::vector<double> shifts(n_shift_points);
        const double width = T / static_cast<double>(n_shift_points);
        for (std::size_t i = 0; i < n_shift_points; ++i)
            shifts[i] = width * (static_cast<double>(i) + 0.25 + 0.5 * unit(rng));
        auto& c = rep.linear_independence;
        const std::size_t quad = std::max<std::size_t>(grid_size + grid_size % 2, 256);
        c.value = gram_min_singular_value(spec, shifts, quad);
        c.pass = std::isfinite(c.value) && c.value > gram_singular_floor;
        std::ostringstream os;
        os << "sigma_min=" << c.value << " floor=" << gram_singular_floor << " n=" << n_shift_points;
        c.evidence = os.str();
    }

    // 4. K(a x; a T) == K(x; T).
    {
        double worst = 0.0;
        for (double alpha : {0.5, 2.0, 10.0}) {
            const KernelSpec scaled = KernelSpec::unchecked(spec.c1(), spec.c2(), alpha * T, spec.family());
            for (int k = 0; k < 100; ++k) {
                const double x = T * unit(rng);
                const double a = spec(x);
                const double b = scaled(alpha * x);
                const double denom = std::max(std::abs(a), std::numeric_limits<double>::min());
                worst = std::max(worst, std::abs(a - b) / denom);
            }
        }
        auto& c = rep.scale_invariance;
        c.value = worst;
        c.pass = worst <= 1e-12;
        c.evidence = "max_rel_err=" + std::to_string(worst);
    }
    return rep;
}

} // namespace ppdepth
