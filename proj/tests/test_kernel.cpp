#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace ppdepth;

TEST(Kernel, EvaluatesClosedForm) {
    const KernelSpec k(1.0, 10.0, 100.0);
    EXPECT_EQ(k(0.0), 1.0);
    EXPECT_NEAR(k(100.0), 4.5399929762484851536e-05, 1e-19);
    EXPECT_EQ(k(-30.0), k(30.0));
    EXPECT_EQ(evaluate(KernelSpec(2.5, 10.0, 100.0), 0.0), 2.5);
}

TEST(Kernel, ScaleInvarianceExample) {
    EXPECT_NEAR(KernelSpec(1.0, 10.0, 100.0)(7.0), KernelSpec(1.0, 10.0, 200.0)(14.0), 1e-16);
}

TEST(Kernel, RejectsInvalidConstants) {
    EXPECT_THROW(KernelSpec(0.0, 10.0, 100.0), invalid_input);
    EXPECT_THROW(KernelSpec(1.0, -1.0, 100.0), invalid_input);
    EXPECT_THROW(KernelSpec(1.0, 10.0, 0.0), invalid_input);
    EXPECT_THROW(KernelSpec(std::nan(""), 10.0, 100.0), invalid_input);
    EXPECT_THROW(KernelSpec(1.0, std::numeric_limits<double>::infinity(), 100.0), invalid_input);
}

TEST(Kernel, FamilyNamesRoundTrip) {
    EXPECT_EQ(parse_kernel_family(to_string(KernelFamily::gaussian)), KernelFamily::gaussian);
    EXPECT_THROW(parse_kernel_family("epanechnikov"), invalid_input);
}

TEST(Kernel, DefaultSpecIsProper) {
    const auto rep = check_properness(KernelSpec(1.0, 10.0, 100.0), 5, 512, 0);
    EXPECT_TRUE(rep.continuous_nonnegative.pass) << rep.continuous_nonnegative.evidence;
    EXPECT_TRUE(rep.positive_at_zero.pass);
    EXPECT_TRUE(rep.linear_independence.pass) << rep.linear_independence.evidence;
    EXPECT_TRUE(rep.scale_invariance.pass) << rep.scale_invariance.evidence;
    EXPECT_TRUE(rep.all_pass());
}

TEST(Kernel, ZeroAmplitudeFailsPositivityAtZero) {
    const auto rep = check_properness(KernelSpec::unchecked(0.0, 10.0, 100.0), 5, 512, 0);
    EXPECT_FALSE(rep.positive_at_zero.pass);
    EXPECT_FALSE(rep.all_pass());
}

TEST(Kernel, ProperAcrossPublishedConstants) {
    for (double c2 : {10.0, 25.0, 50.0, 100.0})
        for (double T : {1.0, 5.0, 100.0}) EXPECT_TRUE(check_properness(KernelSpec(1.0, c2, T)).all_pass()) << c2 << " " << T;
}

TEST(Kernel, GramSingularValueMatchesOracle) {
    // numpy SVD of the row-normalized Gram matrix assembled by adaptive quadrature
    const double sigma = gram_min_singular_value(KernelSpec(1.0, 10.0, 100.0), {20.0, 40.0, 60.0, 80.0});
    EXPECT_NEAR(sigma, 0.005861087602616259, 1e-8);
}

TEST(Kernel, GramNonsingularForDistinctShifts) {
    Rng rng = make_stream(11, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double c2 : {10.0, 25.0, 50.0, 100.0}) {
        const KernelSpec k(1.0, c2, 100.0);
        // c2 = 10 is too wide for ten shifts to stay above the floor in double precision
        const std::size_t n_max = c2 == 10.0 ? 8 : 10;
        for (std::size_t n = 2; n <= n_max; ++n) {
            std::vector<double> shifts(n);
            for (std::size_t i = 0; i < n; ++i) shifts[i] = 100.0 * (static_cast<double>(i) + u(rng)) / static_cast<double>(n);
            EXPECT_GT(gram_min_singular_value(k, shifts), gram_singular_floor) << "c2=" << c2 << " n=" << n;
        }
    }
}

TEST(Kernel, CoincidentShiftsAreSingular) {
    EXPECT_LT(gram_min_singular_value(KernelSpec(1.0, 10.0, 100.0), {30.0, 30.0, 70.0}), 1e-12);
}

TEST(Kernel, NonNegativeAndPositiveAtZero) {
    Rng rng = make_stream(5, 0);
    std::uniform_real_distribution<double> cu(0.1, 200.0), xu(-1000.0, 1000.0);
    for (int i = 0; i < 200; ++i) {
        const KernelSpec k(cu(rng), cu(rng), cu(rng));
        EXPECT_GT(k(0.0), 0.0);
        for (int j = 0; j < 20; ++j) EXPECT_GE(k(xu(rng)), 0.0);
    }
}

TEST(Kernel, ScaleInvarianceAtRandomPoints) {
    Rng rng = make_stream(6, 0);
    std::uniform_real_distribution<double> xu(-150.0, 150.0);
    const KernelSpec k(1.3, 25.0, 100.0);
    for (double alpha : {0.5, 2.0, 10.0}) {
        const auto ka = k.with_T(alpha * k.T());
        for (int i = 0; i < 100; ++i) {
            const double x = xu(rng);
            const double ref = k(x);
            if (ref == 0.0) continue;
            EXPECT_LE(testutil::rel_diff(ka(alpha * x), ref), 1e-12) << x << " " << alpha;
        }
    }
}

TEST(Kernel, CheckerArgumentsValidated) {
    const KernelSpec k(1.0, 10.0, 100.0);
    EXPECT_THROW(check_properness(k, 1, 512), invalid_input);
    EXPECT_THROW(check_properness(k, 5, 8), invalid_input);
}
