#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

#include "error.hpp"

namespace ppdepth::numeric {

/// Neumaier compensated accumulator.
class kahan_sum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    kahan_sum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double sum(std::span<const double> xs) {
    kahan_sum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Phi(a) - Phi(b) without cancellation in either tail.
inline double normal_cdf_diff(double a, double b) {
    constexpr double r = std::numbers::sqrt2;
    if (b >= 0.0) return 0.5 * (std::erfc(b / r) - std::erfc(a / r));
    if (a <= 0.0) return 0.5 * (std::erfc(-a / r) - std::erfc(-b / r));
    return 1.0 - 0.5 * std::erfc(a / r) - 0.5 * std::erfc(-b / r);
}

/// Composite Simpson rule for fn on [lo, hi] with `intervals` (even) panels.
template <typename Fn>
double simpson(Fn&& fn, double lo, double hi, std::size_t intervals) {
    require(intervals >= 2 && intervals % 2 == 0, "simpson: interval count must be even and >= 2");
    const double h = (hi - lo) / static_cast<double>(intervals);
    kahan_sum odd, even;
    for (std::size_t i = 1; i < intervals; ++i) {
        const double v = fn(lo + h * static_cast<double>(i));
        (i % 2 ? odd : even).add(v);
    }
    return h / 3.0 * (fn(lo) + fn(hi) + 4.0 * odd.value() + 2.0 * even.value());
}

} // namespace ppdepth::numeric
