#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "process.hpp"
#include "smoothfn.hpp"

namespace ppdepth {

enum class DepthMethod { h_depth, modified_h_depth, modified_band_depth };
enum class HRule { fixed, proportional_to_T };

inline std::string to_string(DepthMethod m) {
    switch (m) {
    case DepthMethod::h_depth: return "h_depth";
    case DepthMethod::modified_h_depth: return "modified_h_depth";
    case DepthMethod::modified_band_depth: return "modified_band_depth";
    }
    return "unknown";
}

inline DepthMethod parse_depth_method(const std::string& s) {
    if (s == "h_depth" || s == "h") return DepthMethod::h_depth;
    if (s == "modified_h_depth" || s == "modified") return DepthMethod::modified_h_depth;
    if (s == "modified_band_depth" || s == "mbd") return DepthMethod::modified_band_depth;
    throw invalid_input("unknown depth method '" + s + "'");
}

inline std::string to_string(HRule r) { return r == HRule::fixed ? "fixed" : "proportional_to_T"; }

inline HRule parse_h_rule(const std::string& s) {
    if (s == "fixed") return HRule::fixed;
    if (s == "proportional_to_T" || s == "proportional") return HRule::proportional_to_T;
    throw invalid_input("unknown h rule '" + s + "'");
}

struct DepthConfig {
    DepthMethod method = DepthMethod::h_depth;
    HRule h_rule = HRule::proportional_to_T;
    double h = 100.0;        // used when h_rule == fixed
    double h_constant = 1.0; // C in h = C T
    double p = 2.0;
    bool leave_one_out = false;
    std::size_t band_grid_size = 1024;

    /// Bandwidth on an interval of length T.
    double bandwidth(double T) const {
        const double v = h_rule == HRule::fixed ? h : h_constant * T;
        require(std::isfinite(v) && v > 0.0, "depth: h must be positive");
        return v;
    }

    void validate() const {
        require(std::isfinite(p) && p >= 1.0, "depth: p must be >= 1");
        if (h_rule == HRule::fixed) require(std::isfinite(h) && h > 0.0, "depth: h must be positive");
        else require(std::isfinite(h_constant) && h_constant > 0.0, "depth: C must be positive");
        require(band_grid_size >= 2, "depth: band grid size must be >= 2");
    }
};

struct DepthEntry {
    std::string id;
    double depth = 0.0;
    double log_depth = 0.0; // exact even where depth underflows (band depth: log of value)
    std::size_t rank = 0;   // 1 = deepest
};

struct DepthReport {
    std::vector<DepthEntry> entries; // input order
    DepthConfig config;
    std::optional<PointProcess> center;

    /// Indices of entries ordered by rank.
    std::vector<std::size_t> order() const {
        std::vector<std::size_t> idx(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) idx[entries[i].rank - 1] = i;
        return idx;
    }
};

namespace detail {

inline double squared_distance(const PointProcess& a, const PointProcess& b, const KernelSpec& spec, double p) {
    require(a.T == spec.T() && b.T == spec.T(), "depth: process T differs from kernel T");
    if (p == 2.0 && spec.family() == KernelFamily::gaussian) {
        const double d2 = squared_l2_distance(a.events, b.events, spec);
        return d2 < distance_floor * distance_floor ? 0.0 : d2;
    }
    const double d = lp_distance(a.events, b.events, spec, p, DistanceMethod::quadrature);
    return d * d;
}

inline double log_mean_exp(const std::vector<double>& xs) {
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    numeric::kahan_sum s;
    for (double x : xs) s.add(std::exp(x - m));
    return m + std::log(s.value() / static_cast<double>(xs.size()));
}

// log of the empirical h-depth of s, optionally skipping one sample index.
inline double log_h_depth(const PointProcess& s, const std::vector<PointProcess>& sample, const DepthConfig& cfg,
                          const KernelSpec& spec, std::optional<std::size_t> skip = std::nullopt) {
    const double h = cfg.bandwidth(spec.T());
    std::vector<double> terms;
    terms.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (skip && *skip == i) continue;
        terms.push_back(-squared_distance(s, sample[i], spec, cfg.p) / (2.0 * h));
    }
    require(!terms.empty(), "h_depth: sample is empty");
    return log_mean_exp(terms);
}

inline double band_depth_on_grid(const std::vector<double>& fs, const std::vector<std::vector<double>>& grids,
                                 std::optional<std::size_t> skip = std::nullopt) {
    const std::size_t n = grids.size() - (skip ? 1 : 0);
    require(n >= 2, "modified_band_depth: sample must have at least 2 members");
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    numeric::kahan_sum total;
    for (std::size_t g = 0; g < fs.size(); ++g) {
        double below = 0.0, above = 0.0;
        for (std::size_t i = 0; i < grids.size(); ++i) {
            if (skip && *skip == i) continue;
            if (grids[i][g] < fs[g]) below += 1.0;
            else if (grids[i][g] > fs[g]) above += 1.0;
        }
        const double outside = below * (below - 1.0) / 2.0 + above * (above - 1.0) / 2.0;
        total.add((pairs - outside) / pairs);
    }
    return total.value() / static_cast<double>(fs.size());
}

inline std::vector<std::vector<double>> sample_grids(const std::vector<PointProcess>& sample, const KernelSpec& spec,
                                                     std::size_t grid_size) {
    std::vector<std::vector<double>> grids(sample.size());
    parallel_for(sample.size(), [&](std::size_t i) { grids[i] = smooth(sample[i], spec).evaluate_grid(grid_size); });
    return grids;
}

inline void assign_ranks(std::vector<DepthEntry>& entries) {
    std::vector<std::size_t> idx(entries.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (entries[a].log_depth != entries[b].log_depth) return entries[a].log_depth > entries[b].log_depth;
        return entries[a].id < entries[b].id;
    });
    for (std::size_t r = 0; r < idx.size(); ++r) entries[idx[r]].rank = r + 1;
}

} // namespace detail

/// Empirical h-depth: mean over the sample of exp(-||f_s - f_Si||^2 / (2h)).
inline double h_depth(const PointProcess& s, const std::vector<PointProcess>& sample, const DepthConfig& cfg,
                      const KernelSpec& spec) {
    require(!sample.empty(), "h_depth: sample is empty");
    return std::exp(detail::log_h_depth(s, sample, cfg, spec));
}

/// Center-based depth exp(-||f_s - f_c||^2 / (2h)).
inline double modified_h_depth(const PointProcess& s, const PointProcess& center, const DepthConfig& cfg,
                               const KernelSpec& spec) {
    return std::exp(-detail::squared_distance(s, center, spec, cfg.p) / (2.0 * cfg.bandwidth(spec.T())));
}

/// Two-curve modified band depth of f_s within the smoothed sample.
inline double modified_band_depth(const PointProcess& s, const std::vector<PointProcess>& sample,
                                  const KernelSpec& spec, std::size_t grid_size = 1024) {
    require(sample.size() >= 2, "modified_band_depth: sample must have at least 2 members");
    const auto grids = detail::sample_grids(sample, spec, grid_size);
    return detail::band_depth_on_grid(smooth(s, spec).evaluate_grid(grid_size), grids);
}

/// Depth of each observation with respect to `sample`. If the observations
/// are the sample itself, pass `self_sample = true` to honour leave_one_out.
inline DepthReport depth_report(const std::vector<PointProcess>& observations, const std::vector<PointProcess>& sample,
                                const DepthConfig& cfg, const KernelSpec& spec,
                                const std::optional<PointProcess>& center = std::nullopt, bool self_sample = false) {
    cfg.validate();
    DepthReport rep;
    rep.config = cfg;
    rep.entries.resize(observations.size());
    const bool loo = self_sample && cfg.leave_one_out;
    auto skip_for = [&](std::size_t i) { return loo ? std::optional<std::size_t>(i) : std::nullopt; };

    switch (cfg.method) {
    case DepthMethod::h_depth: {
        require(!sample.empty(), "h_depth: sample is empty");
        parallel_for(observations.size(), [&](std::size_t i) {
            rep.entries[i].log_depth = detail::log_h_depth(observations[i], sample, cfg, spec, skip_for(i));
        });
        break;
    }
    case DepthMethod::modified_h_depth: {
        if (!center) throw invalid_input("modified_h_depth requires a center");
        const double h = cfg.bandwidth(spec.T());
        parallel_for(observations.size(), [&](std::size_t i) {
            rep.entries[i].log_depth = -detail::squared_distance(observations[i], *center, spec, cfg.p) / (2.0 * h);
        });
        rep.center = center;
        break;
    }
    case DepthMethod::modified_band_depth: {
        require(sample.size() >= 2, "modified_band_depth: sample must have at least 2 members");
        const auto grids = detail::sample_grids(sample, spec, cfg.band_grid_size);
        parallel_for(observations.size(), [&](std::size_t i) {
            const auto fs = smooth(observations[i], spec).evaluate_grid(cfg.band_grid_size);
            rep.entries[i].log_depth = std::log(detail::band_depth_on_grid(fs, grids, skip_for(i)));
        });
        break;
    }
    }
    for (std::size_t i = 0; i < observations.size(); ++i) {
        rep.entries[i].id = observations[i].id;
        rep.entries[i].depth = std::exp(rep.entries[i].log_depth);
    }
    detail::assign_ranks(rep.entries);
    return rep;
}

/// Depth of every sample member against the whole sample, ranked
/// descending with ties broken by id.
inline DepthReport rank(const std::vector<PointProcess>& sample, const DepthConfig& cfg, const KernelSpec& spec,
                        const std::optional<PointProcess>& center = std::nullopt) {
    if (cfg.method == DepthMethod::modified_h_depth && !center)
        throw invalid_input("rank: modified_h_depth requires a center");
    return depth_report(sample, sample, cfg, spec, center, true);
}

} // namespace ppdepth
