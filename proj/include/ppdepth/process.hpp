#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ppdepth {

/// A realization on [0, T]: sorted event times, possibly empty.
struct PointProcess {
    std::vector<double> events;
    double T = 1.0;
    std::string id;
    std::optional<std::string> label;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }

    /// Throws unless 0 <= e1 <= ... <= el <= T.
    void validate() const {
        require(std::isfinite(T) && T > 0.0, "process '" + id + "': T must be positive");
        for (std::size_t i = 0; i < events.size(); ++i) {
            const double e = events[i];
            require(std::isfinite(e) && e >= 0.0 && e <= T,
                    "process '" + id + "': event " + std::to_string(e) + " outside [0, T]");
            require(i == 0 || events[i - 1] <= e, "process '" + id + "': events not sorted");
        }
    }

    bool same_events(const PointProcess& o) const { return events == o.events; }
};

inline PointProcess make_process(std::vector<double> events, double T, std::string id = {}) {
    std::sort(events.begin(), events.end());
    PointProcess p{std::move(events), T, std::move(id), std::nullopt};
    p.validate();
    return p;
}

/// Zero-padded id for generated processes, so lexicographic order matches index order.
inline std::string indexed_id(std::string_view prefix, std::size_t i, std::size_t n) {
    std::size_t width = 1;
    for (std::size_t m = n > 0 ? n - 1 : 0; m >= 10; m /= 10) ++width;
    std::string digits = std::to_string(i);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return std::string(prefix) + digits;
}

/// One w * phi(t; mu, sigma) term of a mixture intensity.
struct GaussianBump {
    double weight;
    double mu;
    double sigma;
};

/// Poisson intensity on [0, T]: constant, or a positive Gaussian mixture.
class IntensitySpec {
public:
    enum class Kind { constant, gaussian_mixture };

    static IntensitySpec constant(double lambda, double T) {
        require(std::isfinite(lambda) && lambda > 0.0, "intensity: lambda must be positive");
        require(std::isfinite(T) && T > 0.0, "intensity: T must be positive");
        IntensitySpec s;
        s.kind_ = Kind::constant;
        s.lambda_ = lambda;
        s.T_ = T;
        return s;
    }

    static IntensitySpec mixture(std::vector<GaussianBump> bumps, double T) {
        require(!bumps.empty(), "intensity: mixture needs at least one component");
        require(std::isfinite(T) && T > 0.0, "intensity: T must be positive");
        for (const auto& b : bumps) {
            require(std::isfinite(b.weight) && b.weight > 0.0, "intensity: mixture weights must be positive");
            require(std::isfinite(b.sigma) && b.sigma > 0.0, "intensity: mixture sigma must be positive");
            require(std::isfinite(b.mu), "intensity: mixture mu must be finite");
        }
        IntensitySpec s;
        s.kind_ = Kind::gaussian_mixture;
        s.bumps_ = std::move(bumps);
        s.T_ = T;
        return s;
    }

    Kind kind() const { return kind_; }
    double T() const { return T_; }
    const std::vector<GaussianBump>& bumps() const { return bumps_; }

    double operator()(double t) const {
        if (kind_ == Kind::constant) return lambda_;
        double v = 0.0;
        for (const auto& b : bumps_) {
            const double z = (t - b.mu) / b.sigma;
            v += b.weight * std::exp(-0.5 * z * z) / (b.sigma * std::sqrt(2.0 * std::numbers::pi));
        }
        return v;
    }

    /// Upper bound of lambda on [0, T]; sum of the component peaks for mixtures.
    double upper_bound() const {
        if (kind_ == Kind::constant) return lambda_;
        double m = 0.0;
        for (const auto& b : bumps_) m += b.weight / (b.sigma * std::sqrt(2.0 * std::numbers::pi));
        return m;
    }

private:
    IntensitySpec() = default;

    Kind kind_ = Kind::constant;
    double lambda_ = 0.0;
    std::vector<GaussianBump> bumps_;
    double T_ = 1.0;
};

/// Parses "w:mu:sigma[,w:mu:sigma...]" into mixture components.
inline std::vector<GaussianBump> parse_mixture(const std::string& text) {
    std::vector<GaussianBump> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ',')) {
        if (item.empty()) continue;
        std::stringstream parts(item);
        std::string tok;
        std::vector<double> v;
        try {
            while (std::getline(parts, tok, ':')) {
                std::size_t pos = 0;
                v.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            }
        } catch (const std::exception&) {
            throw invalid_input("mixture component '" + item + "': malformed number");
        }
        if (v.size() != 3) throw invalid_input("mixture component '" + item + "': expected w:mu:sigma");
        out.push_back({v[0], v[1], v[2]});
    }
    require(!out.empty(), "mixture: no components given");
    return out;
}

namespace detail {
// HPP on [0, T] via exponential inter-arrival gaps: the count is Poisson(lambda T)
// and, given the count, the times are sorted iid uniforms.
inline std::vector<double> hpp_events(double lambda, double T, Rng& rng) {
    std::exponential_distribution<double> gap(lambda);
    std::vector<double> ev;
    double t = gap(rng);
    while (t <= T) {
        ev.push_back(t);
        t += gap(rng);
    }
    return ev;
}
} // namespace detail

/// n independent HPP(lambda) realizations; stream i is derived from (seed, i).
inline std::vector<PointProcess> simulate_hpp(double lambda, double T, std::size_t n, std::uint64_t seed) {
    require(std::isfinite(lambda) && lambda > 0.0, "simulate_hpp: lambda must be positive");
    require(std::isfinite(T) && T > 0.0, "simulate_hpp: T must be positive");
    require(n >= 1, "simulate_hpp: n must be >= 1");
    std::vector<PointProcess> out(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        out[i] = PointProcess{detail::hpp_events(lambda, T, rng), T, indexed_id("p", i, n), std::nullopt};
    });
    return out;
}

/// n IPP realizations by thinning an HPP at the intensity's upper bound.
inline std::vector<PointProcess> simulate_ipp(const IntensitySpec& intensity, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "simulate_ipp: n must be >= 1");
    const double lmax = intensity.upper_bound();
    require(std::isfinite(lmax) && lmax > 0.0, "simulate_ipp: intensity upper bound must be positive");
    const double T = intensity.T();
    std::vector<PointProcess> out(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> kept;
        for (double u : detail::hpp_events(lmax, T, rng))
            if (unit(rng) * lmax < intensity(u)) kept.push_back(u);
        out[i] = PointProcess{std::move(kept), T, indexed_id("p", i, n), std::nullopt};
    });
    return out;
}

/// Sum of event counts over a sample.
inline std::size_t total_events(const std::vector<PointProcess>& sample) {
    std::size_t n = 0;
    for (const auto& p : sample) n += p.size();
    return n;
}

} // namespace ppdepth
