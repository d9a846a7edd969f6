#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "log.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "process.hpp"
#include "rng.hpp"
#include "smoothfn.hpp"

namespace ppdepth {

/// Sum of squared d_{K,2} distances from a candidate to a fixed sample,
/// evaluated through closed-form pair integrals.
///
///   SSD(t) = N sum_{a,b} I(t_a, t_b) - 2 sum_a sum_{s in pool} I(t_a, s) + sum_i ||f_{S_i}||^2
///
/// where `pool` is every event of every sample member.
class SsdObjective {
public:
    SsdObjective(std::vector<PointProcess> sample, KernelSpec spec) : sample_(std::move(sample)), spec_(spec) {
        require(!sample_.empty(), "SsdObjective: sample is empty");
        self_.resize(sample_.size());
        for (std::size_t i = 0; i < sample_.size(); ++i) {
            const auto& s = sample_[i];
            require(s.T == spec_.T(), "SsdObjective: sample member '" + s.id + "' has a different T");
            pool_.insert(pool_.end(), s.events.begin(), s.events.end());
            self_[i] = self_integral_sum(s.events, spec_);
        }
        std::sort(pool_.begin(), pool_.end());
        numeric::kahan_sum c;
        for (double v : self_) c.add(v);
        constant_ = c.value();
    }

    const KernelSpec& spec() const { return spec_; }
    const std::vector<PointProcess>& sample() const { return sample_; }
    std::size_t size() const { return sample_.size(); }
    double T() const { return spec_.T(); }
    const std::vector<double>& pooled_events() const { return pool_; }
    /// ||f_{S_i}||^2 per member.
    const std::vector<double>& member_norms_sq() const { return self_; }

    /// SSD of the empty process.
    double empty_ssd() const { return constant_; }

    /// sum over pooled events s of I(u, s).
    double pool_cross(double u) const {
        numeric::kahan_sum s;
        for (double e : pool_) s.add(gram_cross_integral(u, e, spec_));
        return s.value();
    }

    double operator()(std::span<const double> t) const {
        check_domain(t);
        if (t.empty()) return constant_;
        const double n = static_cast<double>(size());
        numeric::kahan_sum cross;
        for (double u : t) cross.add(pool_cross(u));
        numeric::kahan_sum total;
        total.add(n * self_integral_sum(t, spec_));
        total.add(-2.0 * cross.value());
        total.add(constant_);
        return std::max(total.value(), 0.0);
    }

    /// SSD change from inserting u into `others` (skipping index `skip`).
    double insertion_delta(double u, std::span<const double> others,
                           std::size_t skip = std::numeric_limits<std::size_t>::max()) const {
        numeric::kahan_sum with_t;
        for (std::size_t b = 0; b < others.size(); ++b)
            if (b != skip) with_t.add(gram_cross_integral(u, others[b], spec_));
        const double n = static_cast<double>(size());
        return n * (gram_cross_integral(u, u, spec_) + 2.0 * with_t.value()) - 2.0 * pool_cross(u);
    }

    void check_domain(std::span<const double> t) const {
        for (double e : t)
            require(std::isfinite(e) && e >= 0.0 && e <= spec_.T(), "SSD: candidate event outside [0, T]");
    }

private:
    std::vector<PointProcess> sample_;
    KernelSpec spec_;
    std::vector<double> pool_;
    std::vector<double> self_;
    double constant_ = 0.0;
};

inline double ssd(const PointProcess& t, const SsdObjective& obj) {
    require(t.T == obj.T(), "ssd: candidate T differs from sample T");
    return obj(t.events);
}

/// The g(x, y) term of the Gaussian-kernel SSD gradient; equals
/// -2 T^2 / (4 c1^2 c2) int_0^T K'(u - x) K(u - y) du.
inline double gradient_kernel_term(double x, double y, const KernelSpec& spec) {
    const double T = spec.T();
    const double c2 = spec.c2();
    const double m = 0.5 * (x + y);
    const double d = x - y;
    const double a = 2.0 * c2 / (T * T);
    const double edge = T * T / (4.0 * c2) * (std::exp(-a * m * m) - std::exp(-a * (T - m) * (T - m)));
    const double s = 2.0 * std::sqrt(c2) / T;
    const double mass = numeric::normal_cdf_diff(s * (T - m), -std::sqrt(c2) * (x + y) / T);
    const double shift = std::sqrt(std::numbers::pi / (8.0 * c2)) * T * d * mass;
    return std::exp(-c2 / (2.0 * T * T) * d * d) * (edge - shift);
}

namespace detail {
inline double gradient_scale(const KernelSpec& spec) {
    return 4.0 * spec.c1() * spec.c1() * spec.c2() / (spec.T() * spec.T());
}
} // namespace detail

/// dSSD/dt, one component per event of t.
inline std::vector<double> ssd_gradient(std::span<const double> t, const SsdObjective& obj) {
    const auto& spec = obj.spec();
    require(spec.family() == KernelFamily::gaussian, "ssd_gradient: Gaussian family only");
    require(!t.empty(), "ssd_gradient: candidate must have at least one event");
    obj.check_domain(t);
    const double n = static_cast<double>(obj.size());
    const double scale = detail::gradient_scale(spec);
    std::vector<double> grad(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        numeric::kahan_sum self, pool;
        for (double tj : t) self.add(gradient_kernel_term(t[k], tj, spec));
        for (double s : obj.pooled_events()) pool.add(gradient_kernel_term(t[k], s, spec));
        grad[k] = scale * (n * self.value() - pool.value());
    }
    return grad;
}

inline std::vector<double> ssd_gradient(const PointProcess& t, const SsdObjective& obj) {
    require(t.T == obj.T(), "ssd_gradient: candidate T differs from sample T");
    return ssd_gradient(t.events, obj);
}

/// Gradient of the batch-mean objective (1/|B|) sum_{i in B} d^2(t, S_i).
inline std::vector<double> batch_mean_gradient(std::span<const double> t, const SsdObjective& obj,
                                               std::span<const std::size_t> batch) {
    const auto& spec = obj.spec();
    const double scale = detail::gradient_scale(spec);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> grad(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        numeric::kahan_sum self, members;
        for (double tj : t) self.add(gradient_kernel_term(t[k], tj, spec));
        for (std::size_t i : batch)
            for (double s : obj.sample()[i].events) members.add(gradient_kernel_term(t[k], s, spec));
        grad[k] = scale * (self.value() - inv_b * members.value());
    }
    return grad;
}

struct DimensionBound {
    std::size_t proven = 0;      // no SSD minimizer has more events than this
    std::size_t search_hint = 0; // heuristic cap, never above `proven`
    double max_member_norm = 0.0;
    double min_kernel_mass = 0.0; // min over x in [0,T] of int_0^T K(u - x) du
};

/// int_0^T K(u - x) du for the Gaussian family.
inline double kernel_mass(double x, const KernelSpec& spec) {
    const double T = spec.T();
    const double s = std::sqrt(2.0 * spec.c2()) / T;
    return spec.c1() * T * std::sqrt(std::numbers::pi / spec.c2()) * numeric::normal_cdf_diff(s * (T - x), -s * x);
}

/// Cap on the event count of any SSD minimizer.
///
/// With m1 = min_x int_0^T K(u - x) du and M = max_i ||f_{S_i}||_2:
/// ||f_t||_2 >= ||f_t||_1 / sqrt(T) >= |t| m1 / sqrt(T). If |t| > 2 sqrt(T) M / m1
/// then ||f_t - f_{S_i}|| >= ||f_t|| - M > M >= ||f_{S_i}|| for every i, so
/// SSD(t) > SSD(empty) and t cannot be a minimizer.
inline DimensionBound dimension_bound(const SsdObjective& obj) {
    DimensionBound b;
    const auto& spec = obj.spec();
    // K * 1_[0,T] is symmetric and unimodal about T/2, so the minimum sits at the ends.
    b.min_kernel_mass = std::min(kernel_mass(0.0, spec), kernel_mass(spec.T(), spec));
    double max_sq = 0.0;
    std::size_t max_count = 0;
    for (std::size_t i = 0; i < obj.size(); ++i) {
        max_sq = std::max(max_sq, obj.member_norms_sq()[i]);
        max_count = std::max(max_count, obj.sample()[i].size());
    }
    b.max_member_norm = std::sqrt(max_sq);
    if (max_count == 0) return b;
    const double raw = 2.0 * std::sqrt(spec.T()) * b.max_member_norm / b.min_kernel_mass;
    require(std::isfinite(raw), "dimension_bound: non-finite bound");
    b.proven = static_cast<std::size_t>(std::ceil(raw));
    b.search_hint = std::min(b.proven, 2 * max_count);
    return b;
}

enum class CoolingRule { logarithmic, constant };

/// Temperature schedule and proposal mix for the annealing chain.
struct AnnealSchedule {
    double c = 1.0;
    CoolingRule rule = CoolingRule::logarithmic;
    std::size_t n_max = 4000;
    double p_birth = 0.25;
    double p_death = 0.25;
    double p_move = 0.5;
    double sigma_move = 5.0;

    /// T_i = c / log(1 + i) for i >= 1.
    double temperature(std::size_t i) const {
        if (rule == CoolingRule::constant) return c;
        return c / std::log1p(static_cast<double>(std::max<std::size_t>(i, 1)));
    }

    void validate() const {
        require(std::isfinite(c) && c > 0.0, "anneal: c must be positive");
        require(n_max >= 1, "anneal: n_max must be >= 1");
        require(p_birth > 0.0 && p_death > 0.0 && p_move > 0.0, "anneal: proposal probabilities must be positive");
        require(std::abs(p_birth + p_death + p_move - 1.0) < 1e-12, "anneal: proposal probabilities must sum to 1");
        require(std::isfinite(sigma_move) && sigma_move > 0.0, "anneal: sigma_move must be positive");
    }

    /// Defaults scaled to the objective: sigma = T/20, and c set so the
    /// first temperature is a small fraction of the cost of one kernel bump.
    static AnnealSchedule defaults_for(const SsdObjective& obj) {
        AnnealSchedule s;
        const double T = obj.T();
        const double bump = gram_cross_integral(0.5 * T, 0.5 * T, obj.spec());
        s.c = default_c_fraction * static_cast<double>(obj.size()) * bump;
        s.sigma_move = T / 20.0;
        return s;
    }

    static constexpr double default_c_fraction = 0.01;
};

/// Best state seen in one dimension.
struct DimensionState {
    std::size_t dim = 0;
    std::vector<double> events;
    double ssd = std::numeric_limits<double>::infinity();
};

struct AnnealResult {
    std::vector<DimensionState> top;      // best d_r dimensions, ascending SSD
    std::vector<DimensionState> per_dim;  // every visited dimension, ascending dim
    std::vector<double> best_trace;       // best SSD so far, per iteration
    std::vector<std::size_t> dim_trace;   // current dimension, per iteration
    std::size_t moves_proposed = 0, moves_accepted = 0;
    std::size_t births_proposed = 0, births_accepted = 0;
    std::size_t deaths_proposed = 0, deaths_accepted = 0;

    const DimensionState& best() const { return top.front(); }
    double move_acceptance() const {
        return moves_proposed ? static_cast<double>(moves_accepted) / static_cast<double>(moves_proposed) : 0.0;
    }
};

namespace detail {

inline double reflect_into(double x, double T) {
    const double period = 2.0 * T;
    x = std::fmod(x, period);
    if (x < 0.0) x += period;
    return x <= T ? x : period - x;
}

struct ProposalMix {
    double birth, death, move;
};

inline ProposalMix proposal_mix(const AnnealSchedule& s, std::size_t k, std::size_t cap) {
    const double b = k < cap ? s.p_birth : 0.0;
    const double d = k > 0 ? s.p_death : 0.0;
    const double m = k > 0 ? s.p_move : 0.0;
    const double tot = b + d + m;
    if (tot <= 0.0) return {0.0, 0.0, 0.0};
    return {b / tot, d / tot, m / tot};
}

} // namespace detail

/// Reversible-jump Metropolis-Hastings chain targeting exp(-SSD(t) / T_i),
/// with birth, death and reflected-Gaussian move proposals. Dimension stays
/// in [0, dim_cap]. Returns the lowest-SSD state of each of the best d_r
/// dimensions.
inline AnnealResult rjmcmc_anneal(const SsdObjective& obj, const AnnealSchedule& schedule, const PointProcess& x0,
                                  std::uint64_t seed, std::size_t d_r = 3,
                                  std::optional<std::size_t> dim_cap = std::nullopt) {
    schedule.validate();
    require(d_r >= 1, "rjmcmc_anneal: d_r must be >= 1");
    const double T = obj.T();
    const std::size_t cap = dim_cap ? *dim_cap : dimension_bound(obj).proven;
    require(x0.T == T, "rjmcmc_anneal: x0 has a different T");
    x0.validate();
    require(x0.size() <= cap, "rjmcmc_anneal: x0 has more events than the dimension bound");

    Rng rng = make_stream(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> x = x0.events;
    double cur = obj(x);
    std::map<std::size_t, DimensionState> best;
    auto record = [&] {
        auto& b = best[x.size()];
        if (cur < b.ssd) {
            b.dim = x.size();
            b.ssd = cur;
            b.events = x;
        }
    };
    record();

    AnnealResult res;
    res.best_trace.reserve(schedule.n_max);
    res.dim_trace.reserve(schedule.n_max);
    double best_so_far = cur;

    for (std::size_t it = 1; it <= schedule.n_max; ++it) {
        const double temp = schedule.temperature(it);
        const std::size_t k = x.size();
        const auto mix = detail::proposal_mix(schedule, k, cap);
        const double r = unit(rng);
        if (r < mix.birth) {
            ++res.births_proposed;
            const double u = T * unit(rng);
            const double delta = obj.insertion_delta(u, x);
            const auto back = detail::proposal_mix(schedule, k + 1, cap);
            const double log_q = std::log(back.death * T / (static_cast<double>(k + 1) * mix.birth));
            if (std::log(unit(rng)) < -delta / temp + log_q) {
                x.insert(std::upper_bound(x.begin(), x.end(), u), u);
                cur += delta;
                ++res.births_accepted;
            }
        } else if (r < mix.birth + mix.death) {
            ++res.deaths_proposed;
            const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(k)) % k;
            const double delta = -obj.insertion_delta(x[j], x, j);
            const auto back = detail::proposal_mix(schedule, k - 1, cap);
            const double log_q = std::log(back.birth * static_cast<double>(k) / (T * mix.death));
            if (std::log(unit(rng)) < -delta / temp + log_q) {
                x.erase(x.begin() + static_cast<std::ptrdiff_t>(j));
                cur += delta;
                ++res.deaths_accepted;
            }
        } else if (mix.move > 0.0) {
            ++res.moves_proposed;
            const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(k)) % k;
            const double y = detail::reflect_into(x[j] + schedule.sigma_move * gauss(rng), T);
            const double delta = obj.insertion_delta(y, x, j) - obj.insertion_delta(x[j], x, j);
            if (std::log(unit(rng)) < -delta / temp) {
                x.erase(x.begin() + static_cast<std::ptrdiff_t>(j));
                x.insert(std::upper_bound(x.begin(), x.end(), y), y);
                cur += delta;
                ++res.moves_accepted;
            }
        }
        if (it % 256 == 0) cur = obj(x); // shed accumulated rounding
        cur = std::max(cur, 0.0);
        record();
        best_so_far = std::min(best_so_far, cur);
        res.best_trace.push_back(best_so_far);
        res.dim_trace.push_back(x.size());
    }

    for (auto& [dim, st] : best) {
        st.ssd = obj(st.events);
        res.per_dim.push_back(st);
    }
    res.top = res.per_dim;
    std::sort(res.top.begin(), res.top.end(), [](const DimensionState& a, const DimensionState& b) {
        return a.ssd != b.ssd ? a.ssd < b.ssd : a.dim < b.dim;
    });
    if (res.top.size() > d_r) res.top.resize(d_r);
    return res;
}

struct SgdOptions {
    std::size_t batch = 16;       // clipped to N
    double rate = 0.0;            // <= 0: curvature-based default
    std::size_t epochs = 200;     // ep_max
    double eps = 0.0;             // <= 0: 1e-6 * SSD(empty)
    std::size_t max_halvings = 40;
};

/// Step size 0.5 / kappa, kappa = 2 int K'(x)^2 dx: the per-event curvature
/// of the batch-mean objective from the candidate's own bump.
inline double default_rate(const KernelSpec& spec) {
    const double kappa = 2.0 * spec.c1() * spec.c1() * std::sqrt(std::numbers::pi * spec.c2() / 2.0) / spec.T();
    return 0.5 / kappa;
}

struct DimensionRun {
    std::size_t dim = 0;
    std::vector<double> events;
    double ssd = 0.0;
    std::size_t epochs = 0;
    bool converged = false;
    double final_rate = 0.0;
    std::vector<double> epoch_ssd; // SSD after each epoch (before any revert)
};

struct LineSearchResult {
    std::vector<DimensionRun> runs; // in the order of the requested dimensions
    std::size_t best_index = 0;
    const DimensionRun& best() const { return runs[best_index]; }
};

/// k evenly spaced quantiles of the pooled sample events.
inline std::vector<double> quantile_init(const SsdObjective& obj, std::size_t k) {
    std::vector<double> out(k);
    const auto& pool = obj.pooled_events();
    for (std::size_t j = 0; j < k; ++j) {
        const double q = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
        if (pool.empty()) {
            out[j] = q * obj.T();
            continue;
        }
        const double pos = q * static_cast<double>(pool.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, pool.size() - 1);
        const double w = pos - static_cast<double>(lo);
        out[j] = (1.0 - w) * pool[lo] + w * pool[hi];
    }
    return out;
}

/// Minibatch gradient descent on SSD within a single dimension. Events are
/// clamped to [0, T] and re-sorted after every step; an epoch that fails to
/// improve reverts to the best state and halves the rate.
inline DimensionRun optimize_dimension(const SsdObjective& obj, std::size_t dim,
                                       std::optional<std::vector<double>> init, const SgdOptions& opts,
                                       std::uint64_t seed) {
    DimensionRun run;
    run.dim = dim;
    if (dim == 0) {
        run.ssd = obj.empty_ssd();
        run.converged = true;
        return run;
    }
    std::vector<double> x = init ? *init : quantile_init(obj, dim);
    require(x.size() == dim, "line_search: init has the wrong dimension");
    for (double& e : x) e = std::clamp(e, 0.0, obj.T());
    std::sort(x.begin(), x.end());

    const std::size_t n = obj.size();
    const std::size_t b = std::max<std::size_t>(1, std::min(opts.batch, n));
    double rate = opts.rate > 0.0 ? opts.rate : default_rate(obj.spec());
    const double eps = opts.eps > 0.0 ? opts.eps : 1e-6 * obj.empty_ssd();

    Rng rng = make_stream(seed, dim);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> best = x;
    double best_ssd = obj(x);
    std::size_t halvings = 0;
    for (std::size_t ep = 0; ep < opts.epochs; ++ep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += b) {
            const std::size_t len = std::min(b, n - start);
            const auto grad = batch_mean_gradient(x, obj, std::span<const std::size_t>(order).subspan(start, len));
            for (std::size_t k = 0; k < dim; ++k) x[k] = std::clamp(x[k] - rate * grad[k], 0.0, obj.T());
            std::sort(x.begin(), x.end());
        }
        const double f = obj(x);
        if (!std::isfinite(f)) throw numerical_failure("line_search: non-finite SSD");
        run.epoch_ssd.push_back(f);
        run.epochs = ep + 1;
        if (f < best_ssd) {
            const double gain = best_ssd - f;
            best = x;
            best_ssd = f;
            if (gain < eps) {
                run.converged = true;
                break;
            }
        } else {
            x = best;
            rate *= 0.5;
            if (++halvings > opts.max_halvings) {
                run.converged = true;
                break;
            }
        }
    }
    run.events = std::move(best);
    run.ssd = best_ssd;
    run.final_rate = rate;
    return run;
}

/// Optimizes each requested dimension independently (in parallel) and
/// reports the best across dimensions; ties go to the smaller dimension.
inline LineSearchResult line_search(const SsdObjective& obj, const std::vector<std::size_t>& dimensions,
                                    const std::vector<std::optional<std::vector<double>>>& inits,
                                    const SgdOptions& opts, std::uint64_t seed) {
    require(!dimensions.empty(), "line_search: empty dimension list");
    require(inits.empty() || inits.size() == dimensions.size(), "line_search: inits must match dimensions");
    require(opts.epochs >= 1, "line_search: epochs must be >= 1");
    require(obj.spec().family() == KernelFamily::gaussian, "line_search: gradient path needs the Gaussian family");
    LineSearchResult res;
    res.runs.resize(dimensions.size());
    parallel_for(dimensions.size(), [&](std::size_t i) {
        res.runs[i] = optimize_dimension(obj, dimensions[i], inits.empty() ? std::nullopt : inits[i], opts, seed);
    });
    for (std::size_t i = 1; i < res.runs.size(); ++i) {
        const auto& r = res.runs[i];
        const auto& b = res.runs[res.best_index];
        if (r.ssd < b.ssd || (r.ssd == b.ssd && r.dim < b.dim)) res.best_index = i;
    }
    return res;
}

inline LineSearchResult line_search(const SsdObjective& obj, const std::vector<std::size_t>& dimensions,
                                    const SgdOptions& opts, std::uint64_t seed) {
    return line_search(obj, dimensions, {}, opts, seed);
}

enum class CenterMethod { rjmcmc, line_search, combined };

inline std::string to_string(CenterMethod m) {
    switch (m) {
    case CenterMethod::rjmcmc: return "rjmcmc";
    case CenterMethod::line_search: return "line_search";
    case CenterMethod::combined: return "combined";
    }
    return "unknown";
}

inline CenterMethod parse_center_method(const std::string& s) {
    if (s == "rjmcmc" || s == "anneal") return CenterMethod::rjmcmc;
    if (s == "line" || s == "line_search") return CenterMethod::line_search;
    if (s == "combined") return CenterMethod::combined;
    throw invalid_input("unknown center method '" + s + "'");
}

struct NearTie {
    std::size_t dim;
    double ssd;
};

struct CenterEstimate {
    PointProcess events;
    double ssd = 0.0;
    std::size_t dimension_bound = 0;
    CenterMethod method = CenterMethod::combined;
    std::vector<double> trace;                 // best SSD so far, non-increasing
    std::vector<std::size_t> visited_dimensions;
    std::vector<DimensionState> candidates;    // best state per evaluated dimension
    std::vector<NearTie> near_ties;            // other dimensions within 0.1% of the best SSD
    std::uint64_t seed = 0;
    bool converged = true;
    double wall_seconds = 0.0;
};

/// Knobs shared by all three estimators.
struct CenterOptions {
    AnnealSchedule schedule;
    SgdOptions sgd;
    std::size_t d_r = 3;
    std::optional<PointProcess> x0; // default: quantiles at the rounded mean count
};

inline CenterOptions default_center_options(const SsdObjective& obj) {
    CenterOptions o;
    o.schedule = AnnealSchedule::defaults_for(obj);
    return o;
}

namespace detail {

inline void running_min(std::vector<double>& trace) {
    for (std::size_t i = 1; i < trace.size(); ++i) trace[i] = std::min(trace[i], trace[i - 1]);
}

inline void finalize_estimate(CenterEstimate& est, const SsdObjective& obj) {
    std::sort(est.candidates.begin(), est.candidates.end(),
              [](const DimensionState& a, const DimensionState& b) { return a.dim < b.dim; });
    const auto best = std::min_element(est.candidates.begin(), est.candidates.end(),
                                       [](const DimensionState& a, const DimensionState& b) {
                                           return a.ssd != b.ssd ? a.ssd < b.ssd : a.dim < b.dim;
                                       });
    est.events = PointProcess{best->events, obj.T(), "center", std::nullopt};
    est.ssd = obj(best->events);
    for (const auto& c : est.candidates) {
        if (c.dim != best->dim && c.ssd <= est.ssd * 1.001) {
            est.near_ties.push_back({c.dim, c.ssd});
            log::info("center: dimension " + std::to_string(c.dim) + " is within 0.1% of the best SSD");
        }
    }
    if (!est.trace.empty()) est.trace.push_back(std::min(est.trace.back(), est.ssd));
    running_min(est.trace);
}

inline PointProcess default_x0(const SsdObjective& obj, std::size_t cap) {
    const double mean = static_cast<double>(total_events(obj.sample())) / static_cast<double>(obj.size());
    const auto k = std::min(cap, static_cast<std::size_t>(std::llround(mean)));
    return PointProcess{quantile_init(obj, k), obj.T(), "x0", std::nullopt};
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Center from the annealing chain alone.
inline CenterEstimate anneal_center(const SsdObjective& obj, const CenterOptions& opts, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto bound = dimension_bound(obj);
    CenterEstimate est;
    est.method = CenterMethod::rjmcmc;
    est.seed = seed;
    est.dimension_bound = bound.proven;
    const PointProcess x0 = opts.x0 ? *opts.x0 : detail::default_x0(obj, bound.proven);
    auto ann = rjmcmc_anneal(obj, opts.schedule, x0, derive_seed(seed, 1), opts.d_r, bound.proven);
    est.trace = std::move(ann.best_trace);
    est.visited_dimensions = std::move(ann.dim_trace);
    est.candidates = ann.per_dim;
    detail::finalize_estimate(est, obj);
    est.wall_seconds = detail::seconds_since(t0);
    return est;
}

/// Center from a line search over every dimension 0..bound.
inline CenterEstimate line_search_center(const SsdObjective& obj, const CenterOptions& opts, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto bound = dimension_bound(obj);
    CenterEstimate est;
    est.method = CenterMethod::line_search;
    est.seed = seed;
    est.dimension_bound = bound.proven;
    std::vector<std::size_t> dims(bound.proven + 1);
    std::iota(dims.begin(), dims.end(), std::size_t{0});
    const auto ls = line_search(obj, dims, opts.sgd, derive_seed(seed, 2));
    for (const auto& r : ls.runs) {
        est.candidates.push_back({r.dim, r.events, r.ssd});
        est.visited_dimensions.push_back(r.dim);
        est.trace.insert(est.trace.end(), r.epoch_ssd.begin(), r.epoch_ssd.end());
    }
    est.converged = ls.best().converged;
    detail::finalize_estimate(est, obj);
    est.wall_seconds = detail::seconds_since(t0);
    return est;
}

/// Annealing pre-training harvests the best d_r dimensions and their best
/// states; a line search then refines exactly those dimensions. The empty
/// process is always evaluated.
inline CenterEstimate combined_center(const SsdObjective& obj, const CenterOptions& opts, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    require(opts.d_r >= 1, "combined_center: d_r must be >= 1");
    const auto bound = dimension_bound(obj);
    CenterEstimate est;
    est.method = CenterMethod::combined;
    est.seed = seed;
    est.dimension_bound = bound.proven;

    const PointProcess x0 = opts.x0 ? *opts.x0 : detail::default_x0(obj, bound.proven);
    auto ann = rjmcmc_anneal(obj, opts.schedule, x0, derive_seed(seed, 1), opts.d_r, bound.proven);
    est.trace = std::move(ann.best_trace);
    est.visited_dimensions = std::move(ann.dim_trace);

    // Each harvested dimension is refined twice: from the annealing state and
    // from the quantile start a plain line search would use.
    std::vector<std::size_t> dims;
    std::vector<std::optional<std::vector<double>>> inits;
    for (const auto& st : ann.top) {
        dims.push_back(st.dim);
        inits.emplace_back(st.events);
        dims.push_back(st.dim);
        inits.emplace_back(std::nullopt);
    }
    const auto ls = line_search(obj, dims, inits, opts.sgd, derive_seed(seed, 2));
    est.candidates.push_back({0, {}, obj.empty_ssd()});
    for (const auto& r : ls.runs) {
        est.trace.insert(est.trace.end(), r.epoch_ssd.begin(), r.epoch_ssd.end());
        if (r.dim == 0) continue;
        auto it = std::find_if(est.candidates.begin(), est.candidates.end(),
                               [&](const DimensionState& c) { return c.dim == r.dim; });
        if (it == est.candidates.end()) est.candidates.push_back({r.dim, r.events, r.ssd});
        else if (r.ssd < it->ssd) *it = {r.dim, r.events, r.ssd};
    }
    // Annealing states in dimensions outside the top d_r still count.
    for (const auto& st : ann.per_dim) {
        auto it = std::find_if(est.candidates.begin(), est.candidates.end(),
                               [&](const DimensionState& c) { return c.dim == st.dim; });
        if (it == est.candidates.end()) est.candidates.push_back(st);
        else if (st.ssd < it->ssd) *it = st;
    }
    est.converged = ls.best().converged;
    detail::finalize_estimate(est, obj);
    est.wall_seconds = detail::seconds_since(t0);
    return est;
}

inline CenterEstimate estimate_center(const SsdObjective& obj, CenterMethod method, const CenterOptions& opts,
                                      std::uint64_t seed) {
    switch (method) {
    case CenterMethod::rjmcmc: return anneal_center(obj, opts, seed);
    case CenterMethod::line_search: return line_search_center(obj, opts, seed);
    case CenterMethod::combined: return combined_center(obj, opts, seed);
    }
    throw invalid_input("unknown center method");
}

} // namespace ppdepth
