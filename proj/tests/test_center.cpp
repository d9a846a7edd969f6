#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ppdepth;

namespace {
const KernelSpec k10(1.0, 10.0, 100.0);

std::vector<PointProcess> tiny_sample() {
    return {make_process({10.0, 55.0}, 100.0, "a"), make_process({30.0}, 100.0, "b"), make_process({}, 100.0, "c"),
            make_process({48.0, 52.0, 90.0}, 100.0, "d")};
}

double fd_component(const SsdObjective& obj, std::vector<double> t, std::size_t k, double h) {
    auto up = t, dn = t;
    up[k] += h;
    dn[k] -= h;
    return (obj(up) - obj(dn)) / (2.0 * h);
}
} // namespace

TEST(Ssd, MatchesHighPrecisionOracle) {
    SsdObjective obj(tiny_sample(), k10);
    EXPECT_LE(testutil::rel_diff(obj(std::vector<double>{20.0, 50.5, 80.0}), 384.94051904809246682), 1e-12);
    EXPECT_LE(testutil::rel_diff(obj.empty_ssd(), 391.48423728037749423), 1e-12);
    EXPECT_LE(testutil::rel_diff(obj(std::vector<double>{}), 391.48423728037749423), 1e-12);
}

TEST(Ssd, TrivialValues) {
    const auto s = make_process({12.0, 40.0, 71.0}, 100.0);
    SsdObjective one({s}, k10);
    EXPECT_LT(ssd(s, one), 1e-10);
    const auto sample = simulate_hpp(0.045, 100.0, 30, 1);
    SsdObjective obj(sample, k10);
    double norms = 0.0;
    for (const auto& p : sample) norms += squared_l2_distance(p.events, {}, k10);
    EXPECT_LE(testutil::rel_diff(obj.empty_ssd(), norms), 1e-12);
}

TEST(Ssd, EqualsSumOfSquaredDistancesAndQuadrature) {
    const auto sample = simulate_hpp(0.045, 100.0, 25, 2);
    SsdObjective obj(sample, k10);
    Rng rng = make_stream(3, 0);
    for (int i = 0; i < 30; ++i) {
        const auto t = testutil::random_events(rng, 0, 10, 100.0);
        double direct = 0.0, quad = 0.0;
        for (const auto& p : sample) {
            direct += squared_l2_distance(t, p.events, k10);
            quad += lp_integral_quadrature(t, p.events, k10, 2.0, 8192);
        }
        EXPECT_LE(testutil::rel_diff(obj(t), direct), 1e-10);
        EXPECT_LE(testutil::rel_diff(obj(t), quad), 1e-7);
    }
}

TEST(Ssd, InsertionDeltaMatchesRecompute) {
    const auto sample = simulate_hpp(0.045, 100.0, 20, 4);
    SsdObjective obj(sample, k10);
    const std::vector<double> t{10.0, 35.0, 80.0};
    const double base = obj(t);
    auto with = t;
    with.push_back(55.0);
    std::sort(with.begin(), with.end());
    EXPECT_NEAR(base + obj.insertion_delta(55.0, t), obj(with), 1e-9 * obj(with));
}

TEST(Ssd, RejectsForeignDomain) {
    SsdObjective obj(tiny_sample(), k10);
    EXPECT_THROW(ssd(make_process({1.0}, 50.0), obj), invalid_input);
    EXPECT_THROW(obj(std::vector<double>{120.0}), invalid_input);
}

TEST(Gradient, MatchesHighPrecisionOracle) {
    SsdObjective obj(tiny_sample(), k10);
    const auto g = ssd_gradient(std::vector<double>{20.0, 50.5, 80.0}, obj);
    // derivatives of the quadrature-defined objective at 40 digits
    EXPECT_LE(testutil::rel_diff(g[0], 5.0862973979650168953), 1e-10);
    EXPECT_LE(testutil::rel_diff(g[1], 0.94943657950293507869), 1e-10);
    EXPECT_LE(testutil::rel_diff(g[2], -4.9417028136892333478), 1e-10);
}

TEST(Gradient, MatchesFiniteDifferences) {
    Rng rng = make_stream(5, 0);
    std::uniform_real_distribution<double> c2u(5.0, 60.0);
    for (int c = 0; c < 40; ++c) {
        const KernelSpec k(1.0, c2u(rng), 100.0);
        std::vector<PointProcess> sample;
        for (int i = 0; i < 20; ++i) sample.push_back(make_process(testutil::random_events(rng, 0, 8, 100.0), 100.0));
        SsdObjective obj(sample, k);
        const auto t = testutil::random_events(rng, 1, 10, 100.0);
        const auto g = ssd_gradient(t, obj);
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double fd = fd_component(obj, t, j, 1e-5);
            EXPECT_TRUE(std::abs(g[j] - fd) <= 1e-7 || testutil::rel_diff(g[j], fd) <= 1e-5)
                << "case " << c << " k " << j << " analytic " << g[j] << " fd " << fd;
        }
    }
}

TEST(Gradient, KernelTermOnDiagonal) {
    // With x = y only the boundary term survives: scale * g(x, x) = K(x)^2 - K(T - x)^2.
    for (double x : {0.0, 13.0, 50.0, 88.0, 100.0}) {
        const double scaled = 4.0 * 10.0 / (100.0 * 100.0) * gradient_kernel_term(x, x, k10);
        EXPECT_NEAR(scaled, k10(x) * k10(x) - k10(100.0 - x) * k10(100.0 - x), 1e-14);
    }
}

TEST(Gradient, VanishesAtSingleMemberMinimum) {
    const auto s = make_process({17.0, 42.0, 63.0, 81.0}, 100.0);
    SsdObjective obj({s}, k10);
    for (double v : ssd_gradient(s, obj)) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Gradient, EmptyCandidateRejected) {
    SsdObjective obj(tiny_sample(), k10);
    EXPECT_THROW(ssd_gradient(std::vector<double>{}, obj), invalid_input);
}

TEST(DimensionBound, EmptySampleGivesZero) {
    SsdObjective obj({make_process({}, 100.0)}, k10);
    const auto b = dimension_bound(obj);
    EXPECT_EQ(b.proven, 0u);
    EXPECT_EQ(b.search_hint, 0u);
    const auto est = combined_center(obj, default_center_options(obj), 1);
    EXPECT_TRUE(est.events.empty());
    EXPECT_EQ(est.ssd, 0.0);
}

TEST(DimensionBound, KernelMassOracle) {
    EXPECT_LE(testutil::rel_diff(kernel_mass(0.0, k10), 28.024739050664274064), 1e-13);
    EXPECT_GT(kernel_mass(50.0, k10), kernel_mass(0.0, k10));
}

TEST(DimensionBound, CoversObservedCountsAndScalesWithDuplication) {
    const auto sample = simulate_hpp(0.045, 100.0, 100, 1);
    SsdObjective obj(sample, k10);
    const auto b = dimension_bound(obj);
    std::size_t max_count = 0;
    for (const auto& p : sample) max_count = std::max(max_count, p.size());
    EXPECT_GE(b.proven, max_count);
    EXPECT_LE(b.search_hint, b.proven);

    std::vector<PointProcess> doubled;
    for (const auto& p : sample) {
        auto ev = p.events;
        ev.insert(ev.end(), p.events.begin(), p.events.end());
        doubled.push_back(make_process(ev, 100.0));
    }
    const auto b2 = dimension_bound(SsdObjective(doubled, k10));
    EXPECT_NEAR(b2.max_member_norm, 2.0 * b.max_member_norm, 1e-12 * b.max_member_norm);
    const double raw = 2.0 * std::sqrt(100.0) * b.max_member_norm / b.min_kernel_mass;
    EXPECT_EQ(b2.proven, static_cast<std::size_t>(std::ceil(2.0 * raw)));
}

TEST(DimensionBound, CandidatesAboveBoundLoseToEmpty) {
    const auto sample = simulate_hpp(0.045, 100.0, 50, 2);
    SsdObjective obj(sample, k10);
    const auto D = dimension_bound(obj).proven;
    Rng rng = make_stream(6, 0);
    for (int i = 0; i < 20; ++i) EXPECT_GT(obj(testutil::random_events(rng, D + 1, 100.0)), obj.empty_ssd());
}

TEST(Anneal, ScheduleIsValidated) {
    AnnealSchedule s;
    for (std::size_t i = 1; i < 100; ++i) EXPECT_GT(s.temperature(i), s.temperature(i + 1));
    s.p_birth = 0.5;
    EXPECT_THROW(s.validate(), invalid_input);
    s = AnnealSchedule{};
    s.c = 0.0;
    EXPECT_THROW(s.validate(), invalid_input);
}

TEST(Anneal, RecoversSingleMember) {
    const auto s = make_process({15.0, 50.0, 85.0}, 100.0);
    SsdObjective obj({s}, k10);
    auto sched = AnnealSchedule::defaults_for(obj);
    sched.n_max = 20000;
    const auto res = rjmcmc_anneal(obj, sched, make_process({}, 100.0), 3);
    EXPECT_EQ(res.best().dim, s.size());
    EXPECT_LE(res.best().ssd, 0.01 * obj.empty_ssd());
}

TEST(Anneal, BeatsIntuitiveCenterOnHpp) {
    const auto sample = simulate_hpp(0.045, 100.0, 100, 1);
    SsdObjective obj(sample, k10);
    const auto est = anneal_center(obj, default_center_options(obj), 1);
    EXPECT_LE(est.ssd, obj(std::vector<double>{20, 40, 60, 80}));
}

TEST(Anneal, HotChainAcceptsMoves) {
    const auto sample = simulate_hpp(0.045, 100.0, 50, 3);
    SsdObjective obj(sample, k10);
    auto sched = AnnealSchedule::defaults_for(obj);
    sched.rule = CoolingRule::constant;
    sched.c = 1e9;
    sched.n_max = 5000;
    const auto res = rjmcmc_anneal(obj, sched, make_process({20, 40, 60, 80}, 100.0), 4);
    EXPECT_GT(res.move_acceptance(), 0.95);
}

TEST(Anneal, DeterministicAndRespectsBounds) {
    const auto sample = simulate_hpp(0.045, 100.0, 40, 5);
    SsdObjective obj(sample, k10);
    const auto sched = AnnealSchedule::defaults_for(obj);
    const auto x0 = make_process({25, 75}, 100.0);
    const auto a = rjmcmc_anneal(obj, sched, x0, 9), b = rjmcmc_anneal(obj, sched, x0, 9);
    EXPECT_EQ(a.best_trace, b.best_trace);
    EXPECT_EQ(a.dim_trace, b.dim_trace);
    const auto bound = dimension_bound(obj).proven;
    for (auto d : a.dim_trace) EXPECT_LE(d, bound);
    for (std::size_t i = 1; i < a.top.size(); ++i) EXPECT_LE(a.top[i - 1].ssd, a.top[i].ssd);
    std::vector<double> too_many(bound + 1, 50.0);
    EXPECT_THROW(rjmcmc_anneal(obj, sched, make_process(too_many, 100.0), 1), invalid_input);
}

TEST(LineSearch, ConvergesToSingleMember) {
    const auto s = make_process({15.0, 50.0, 85.0}, 100.0);
    SsdObjective obj({s}, k10);
    SgdOptions opts;
    const auto res = line_search(obj, {3}, opts, 1);
    EXPECT_LT(res.best().ssd, 1e-6 * obj.empty_ssd());
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(res.best().events[i], s.events[i], 0.05);
}

TEST(LineSearch, MoreEpochsNeverHurt) {
    const auto sample = simulate_hpp(0.045, 100.0, 60, 6);
    SsdObjective obj(sample, k10);
    SgdOptions opts;
    opts.eps = 1e-12;
    for (std::size_t ep : {1, 2, 5, 10, 20}) {
        opts.epochs = ep;
        const double a = line_search(obj, {3, 4, 5}, opts, 2).best().ssd;
        opts.epochs = 2 * ep;
        const double b = line_search(obj, {3, 4, 5}, opts, 2).best().ssd;
        EXPECT_LE(b, a) << ep;
    }
}

TEST(LineSearch, ThreadCountDoesNotChangeResults) {
    const auto sample = simulate_hpp(0.045, 100.0, 60, 7);
    SsdObjective obj(sample, k10);
    set_max_threads(1);
    const auto a = line_search(obj, {0, 1, 2, 3, 4, 5, 6}, SgdOptions{}, 3);
    set_max_threads(3);
    const auto b = line_search(obj, {0, 1, 2, 3, 4, 5, 6}, SgdOptions{}, 3);
    set_max_threads(0);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        EXPECT_EQ(a.runs[i].events, b.runs[i].events);
        EXPECT_EQ(a.runs[i].ssd, b.runs[i].ssd);
    }
    EXPECT_THROW(line_search(obj, {}, SgdOptions{}, 3), invalid_input);
}

TEST(Combined, RecoversSingleMember) {
    const auto s = make_process({22.0, 58.0}, 100.0);
    SsdObjective obj({s}, k10);
    const auto est = combined_center(obj, default_center_options(obj), 4);
    ASSERT_EQ(est.events.size(), 2u);
    EXPECT_LT(est.ssd, 1e-6 * obj.empty_ssd());
}

TEST(Combined, EstimateInvariants) {
    const auto sample = simulate_hpp(0.045, 100.0, 100, 8);
    SsdObjective obj(sample, k10);
    const auto opts = default_center_options(obj);
    const auto est = combined_center(obj, opts, 5);
    const auto ann = anneal_center(obj, opts, 5);
    EXPECT_LE(est.ssd, ann.ssd);
    EXPECT_LE(est.events.size(), est.dimension_bound);
    EXPECT_LE(testutil::rel_diff(est.ssd, ssd(est.events, obj)), 1e-9);
    ASSERT_FALSE(est.trace.empty());
    for (std::size_t i = 1; i < est.trace.size(); ++i) EXPECT_LE(est.trace[i], est.trace[i - 1]);
    EXPECT_EQ(est.trace.back(), est.ssd);
    EXPECT_EQ(est.seed, 5u);
    bool has_empty = false;
    for (const auto& c : est.candidates) has_empty = has_empty || c.dim == 0;
    EXPECT_TRUE(has_empty);
}

TEST(Combined, NearTiesAreLogged) {
    // Two identical members at different dimensions make dimensions 1 and 2 compete.
    testutil::LogCapture cap(log::level::info);
    std::vector<PointProcess> sample{make_process({50.0}, 100.0), make_process({49.0, 51.0}, 100.0)};
    SsdObjective obj(sample, k10);
    const auto est = combined_center(obj, default_center_options(obj), 6);
    for (const auto& t : est.near_ties) EXPECT_LE(t.ssd, est.ssd * 1.001);
    if (!est.near_ties.empty()) {
        EXPECT_TRUE(cap.contains("within 0.1%"));
    }
}

TEST(Combined, SampleCentersConcentrateAsSampleGrows) {
    // Counts above 8 are rejected so every member has bounded size.
    auto capped = [](std::size_t n, std::uint64_t seed) {
        std::vector<PointProcess> out;
        std::uint64_t draw = 0;
        while (out.size() < n) {
            auto p = simulate_hpp(0.045, 100.0, 1, derive_seed(seed, draw++)).front();
            if (p.size() <= 8) out.push_back(p);
        }
        return out;
    };
    std::vector<double> medians;
    for (std::size_t n : {50, 200, 800}) {
        std::vector<PointProcess> centers;
        for (std::uint64_t r = 0; r < 10; ++r) {
            SsdObjective obj(capped(n, derive_seed(1000 + r, n)), k10);
            centers.push_back(combined_center(obj, default_center_options(obj), r).events);
        }
        std::vector<double> d;
        for (std::size_t i = 0; i < centers.size(); ++i)
            for (std::size_t j = i + 1; j < centers.size(); ++j) d.push_back(distance(centers[i], centers[j], k10));
        std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
        medians.push_back(d[d.size() / 2]);
    }
    EXPECT_GT(medians[0], medians[1]);
    EXPECT_GT(medians[1], medians[2]);
}

TEST(Center, MethodNames) {
    EXPECT_EQ(parse_center_method("line"), CenterMethod::line_search);
    EXPECT_EQ(parse_center_method("rjmcmc"), CenterMethod::rjmcmc);
    EXPECT_EQ(parse_center_method(to_string(CenterMethod::combined)), CenterMethod::combined);
    EXPECT_THROW(parse_center_method("newton"), invalid_input);
}
