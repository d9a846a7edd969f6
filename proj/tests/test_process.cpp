#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace ppdepth;

namespace {
std::vector<double> counts(const std::vector<PointProcess>& ps) {
    std::vector<double> c;
    for (const auto& p : ps) c.push_back(static_cast<double>(p.size()));
    return c;
}
double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }
double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}
} // namespace

TEST(PointProcess, ValidatesOrderingAndRange) {
    EXPECT_NO_THROW(make_process({0.0, 20.0, 100.0}, 100.0));
    EXPECT_NO_THROW(make_process({}, 100.0));
    EXPECT_EQ(make_process({5.0, 1.0}, 100.0).events, (std::vector<double>{1.0, 5.0}));
    EXPECT_THROW((PointProcess{{5.0, 1.0}, 100.0, "x", std::nullopt}.validate()), invalid_input);
    EXPECT_THROW(make_process({101.0}, 100.0), invalid_input);
    EXPECT_THROW(make_process({-0.1}, 100.0), invalid_input);
    EXPECT_THROW(make_process({1.0}, 0.0), invalid_input);
}

TEST(PointProcess, IndexedIdsArePadded) {
    EXPECT_EQ(indexed_id("p", 7, 100), "p07");
    EXPECT_EQ(indexed_id("p", 0, 1), "p0");
    EXPECT_EQ(indexed_id("s", 123, 1000), "s123");
}

TEST(Simulate, HppMeanCountNearLambdaT) {
    const auto ps = simulate_hpp(0.045, 100.0, 100, 2024);
    EXPECT_NEAR(mean(counts(ps)), 4.5, 3.0 * std::sqrt(4.5 / 100.0));
    int inside = 0;
    for (std::uint64_t s = 0; s < 50; ++s)
        inside += std::abs(mean(counts(simulate_hpp(0.045, 100.0, 100, s))) - 4.5) <= 3.0 * std::sqrt(0.045);
    EXPECT_GE(inside, 47);
}

TEST(Simulate, HppCountVarianceEqualsMean) {
    const auto c = counts(simulate_hpp(0.045, 100.0, 10000, 9));
    EXPECT_NEAR(variance(c), 4.5, 0.05 * 4.5);
}

TEST(Simulate, HppEventsSortedUniformWithinInterval) {
    const auto ps = simulate_hpp(0.3, 50.0, 400, 3);
    std::vector<double> pooled;
    for (const auto& p : ps) {
        EXPECT_TRUE(std::is_sorted(p.events.begin(), p.events.end()));
        for (double e : p.events) {
            EXPECT_GE(e, 0.0);
            EXPECT_LE(e, 50.0);
            pooled.push_back(e);
        }
    }
    Rng rng = make_stream(77, 0);
    EXPECT_GT(testutil::ks_pvalue(pooled, testutil::random_events(rng, 5000, 50.0)), 0.01);
}

TEST(Simulate, DeterministicAndPartitionInvariant) {
    const auto a = simulate_hpp(0.045, 100.0, 50, 17);
    const auto b = simulate_hpp(0.045, 100.0, 50, 17);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].events, b[i].events);
    const auto prefix = simulate_hpp(0.045, 100.0, 10, 17);
    for (std::size_t i = 0; i < prefix.size(); ++i) EXPECT_EQ(prefix[i].events, a[i].events);
    const auto other = simulate_hpp(0.045, 100.0, 50, 18);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || other[i].events != a[i].events;
    EXPECT_TRUE(differs);

    set_max_threads(1);
    const auto serial = simulate_ipp(IntensitySpec::mixture({{3, 25, 10}, {2, 75, 10}}, 100.0), 64, 5);
    set_max_threads(4);
    const auto parallel = simulate_ipp(IntensitySpec::mixture({{3, 25, 10}, {2, 75, 10}}, 100.0), 64, 5);
    set_max_threads(0);
    for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].events, parallel[i].events);
}

TEST(Simulate, RejectsInvalidParameters) {
    EXPECT_THROW(simulate_hpp(0.0, 100.0, 10, 1), invalid_input);
    EXPECT_THROW(simulate_hpp(0.1, -1.0, 10, 1), invalid_input);
    EXPECT_THROW(simulate_hpp(0.1, 10.0, 0, 1), invalid_input);
    EXPECT_THROW(IntensitySpec::mixture({{0.0, 25.0, 10.0}}, 100.0), invalid_input);
    EXPECT_THROW(IntensitySpec::mixture({{1.0, 25.0, 0.0}}, 100.0), invalid_input);
    EXPECT_THROW(IntensitySpec::mixture({}, 100.0), invalid_input);
    EXPECT_THROW(IntensitySpec::constant(-2.0, 100.0), invalid_input);
}

TEST(Simulate, IppMeanCountMatchesIntegratedIntensity) {
    const auto ps = simulate_ipp(IntensitySpec::mixture({{3, 25, 10}, {2, 75, 10}}, 100.0), 2000, 8);
    // integral of 3 phi(25, 10) + 2 phi(75, 10) over [0, 100]
    const double mass = 4.9689516733709597796;
    EXPECT_NEAR(mean(counts(ps)), mass, 4.0 * std::sqrt(mass / 2000.0));
}

TEST(Simulate, IppIsBimodalWithHigherEarlyPeak) {
    const auto ps = simulate_ipp(IntensitySpec::mixture({{3, 25, 10}, {2, 75, 10}}, 100.0), 5000, 4);
    std::vector<int> bins(10, 0);
    for (const auto& p : ps)
        for (double e : p.events) ++bins[std::min(9, static_cast<int>(e / 10.0))];
    const int early = bins[2], late = bins[7], middle = bins[5];
    EXPECT_GT(early, late);
    EXPECT_GT(late, 2 * middle);
    EXPECT_EQ(std::max_element(bins.begin(), bins.begin() + 5) - bins.begin(), 2);
    EXPECT_EQ(std::max_element(bins.begin() + 5, bins.end()) - bins.begin(), 7);
}

TEST(Simulate, ThinningAtConstantIntensityMatchesHpp) {
    const auto ipp = simulate_ipp(IntensitySpec::constant(0.045, 100.0), 2000, 101);
    const auto hpp = simulate_hpp(0.045, 100.0, 2000, 202);
    EXPECT_GT(testutil::ks_pvalue(counts(ipp), counts(hpp)), 0.01);
}

TEST(Simulate, ParsesMixtureSpec) {
    const auto b = parse_mixture("3:25:10,2:75:10");
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[1].weight, 2.0);
    EXPECT_EQ(b[1].mu, 75.0);
    EXPECT_EQ(b[1].sigma, 10.0);
    EXPECT_THROW(parse_mixture("3:25"), invalid_input);
    EXPECT_THROW(parse_mixture("a:b:c"), invalid_input);
}

TEST(Io, RoundTripIsBitExact) {
    Rng rng = make_stream(31, 0);
    std::vector<PointProcess> ps;
    for (std::size_t i = 0; i < 100; ++i) {
        PointProcess p{testutil::random_events(rng, 0, 12, 100.0), 100.0, indexed_id("r", i, 100), std::nullopt};
        if (i % 3 == 0) p.label = "class" + std::to_string(i % 2);
        ps.push_back(p);
    }
    for (auto fmt : {FileFormat::jsonl, FileFormat::text}) {
        std::stringstream ss;
        if (fmt == FileFormat::jsonl) save_jsonl(ss, ps, 100.0);
        else save_text(ss, ps, 100.0);
        const auto back = fmt == FileFormat::jsonl ? load_jsonl(ss) : load_text(ss);
        ASSERT_EQ(back.size(), ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            EXPECT_EQ(back[i].events, ps[i].events);
            EXPECT_EQ(back[i].T, 100.0);
            if (fmt == FileFormat::jsonl) {
                EXPECT_EQ(back[i].id, ps[i].id);
                EXPECT_EQ(back[i].label, ps[i].label);
            }
        }
    }
}

TEST(Io, RoundTripThroughFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "ppdepth_io_test";
    std::filesystem::create_directories(dir);
    const auto ps = simulate_hpp(0.045, 100.0, 20, 1);
    for (const auto* name : {"a.jsonl", "a.txt"}) {
        const auto path = (dir / name).string();
        save_processes(ps, path, format_from_path(path));
        const auto back = load_processes(path);
        ASSERT_EQ(back.size(), ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(back[i].events, ps[i].events);
    }
    std::filesystem::remove_all(dir);
}

TEST(Io, TextLineParsesIntuitiveCenter) {
    std::stringstream ss("# T=100\n20 40 60 80\n\n");
    const auto ps = load_text(ss);
    ASSERT_EQ(ps.size(), 2u);
    EXPECT_EQ(ps[0].events, (std::vector<double>{20, 40, 60, 80}));
    EXPECT_TRUE(ps[1].empty());
    EXPECT_EQ(ps[1].T, 100.0);
}

TEST(Io, TextNeedsT) {
    std::stringstream ss("1 2 3\n");
    EXPECT_THROW(load_text(ss), invalid_input);
    std::stringstream again("1 2 3\n");
    EXPECT_EQ(load_text(again, 10.0).front().T, 10.0);
}

TEST(Io, UnsortedEventsAreSortedWithWarning) {
    testutil::LogCapture cap(log::level::warn);
    std::stringstream ss("{\"T\": 10}\n{\"id\": \"x\", \"events\": [5, 1, 3]}\n");
    const auto ps = load_jsonl(ss);
    EXPECT_EQ(ps[0].events, (std::vector<double>{1, 3, 5}));
    EXPECT_TRUE(cap.contains("line 2"));
}

TEST(Io, OutOfRangeEventNamesLine) {
    std::stringstream ss("{\"T\": 10}\n{\"events\": [1]}\n{\"events\": [11]}\n");
    try {
        load_jsonl(ss);
        FAIL() << "expected invalid_input";
    } catch (const invalid_input& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    std::stringstream txt("# T=10\n1 2\n3 12\n");
    try {
        load_text(txt);
        FAIL() << "expected invalid_input";
    } catch (const invalid_input& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Io, MalformedInputRejected) {
    std::stringstream bad_json("{\"T\": 10}\n{\"events\": [1,\n");
    EXPECT_THROW(load_jsonl(bad_json), invalid_input);
    std::stringstream no_header("{\"events\": [1]}\n");
    EXPECT_THROW(load_jsonl(no_header), invalid_input);
    std::stringstream bad_number("# T=10\n1 2x\n");
    EXPECT_THROW(load_text(bad_number), invalid_input);
    std::stringstream missing_events("{\"T\": 10}\n{\"id\": \"a\"}\n");
    EXPECT_THROW(load_jsonl(missing_events), invalid_input);
    EXPECT_THROW(load_processes("/nonexistent/file.jsonl"), invalid_input);
}

TEST(Io, MissingIdsAreAssigned) {
    std::stringstream ss("{\"T\": 10}\n{\"events\": []}\n{\"events\": [2]}\n");
    const auto ps = load_jsonl(ss);
    EXPECT_EQ(ps[0].id, "p0");
    EXPECT_EQ(ps[1].id, "p1");
    EXPECT_TRUE(ps[0].empty());
}
