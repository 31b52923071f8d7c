#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ks2/diagnostics.hpp"
#include "ks2/frame.hpp"
#include "ks2/solver.hpp"
#include "test_util.hpp"

using namespace ks2;
using Catch::Approx;

namespace {

Frame quarter_frame() {
    Frame f;
    f.d = 1;
    f.m = 4;
    f.alpha = 0.25;
    f.vectors = {{Complex{0.5, 0.0}}, {Complex{0.5, 0.0}}, {Complex{0.5, 0.0}},
                 {Complex{0.5, 0.0}}};
    return f;
}

PartitionResult partition_of(const Frame& f, std::vector<std::size_t> s1,
                             Algorithm alg = Algorithm::PlainGreedy) {
    PartitionResult r;
    r.s1 = std::move(s1);
    std::vector<bool> in(f.m, false);
    for (std::size_t i : r.s1) in[i] = true;
    for (std::size_t i = 0; i < f.m; ++i)
        if (!in[i]) r.s2.push_back(i);
    r.config.algorithm = alg;
    return r;
}

}  // namespace

TEST_CASE("condition number bound") {
    SECTION("identity attains equality at 1") {
        const auto b = condition_bound(HermitianMatrix::identity(4));
        CHECK(b.x == Approx(0.0).margin(1e-7));
        CHECK(b.kappa_upper == Approx(1.0).margin(1e-6));
    }
    SECTION("diag(2,1) attains the bound exactly") {
        // x = sqrt(1 - (2/3)^2 * 2) = 1/3, bound (1+x)/(1-x) = 2
        const auto b = condition_bound(HermitianMatrix::diagonal({2.0, 1.0}));
        CHECK(b.x == Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(b.kappa_upper == Approx(2.0).epsilon(1e-12));
    }
    SECTION("scaled identity") {
        const auto b = condition_bound(HermitianMatrix::diagonal({0.5, 0.5, 0.5}));
        CHECK(b.x == Approx(0.0).margin(1e-7));
    }
    SECTION("rejects indefinite input") {
        CHECK_THROWS_AS(condition_bound(HermitianMatrix::diagonal({1.0, -1.0})),
                        NotPositiveDefinite);
    }
}

TEST_CASE("bound dominates the true condition number") {
    SplitMix64 rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.next_below(10);
        const double kappa = std::exp(rng.next_unit() * std::log(1e4));
        const auto a = testutil::random_hpd(d, rng, kappa);
        const auto b = condition_bound(a);
        CHECK(condition_number(a) <= b.kappa_upper + 1e-9);
        // AM-GM keeps the radicand inside [0,1]
        CHECK(std::exp(log_det(a) / static_cast<double>(d)) <=
              a.trace() / static_cast<double>(d) + 1e-12);
        CHECK(b.x >= 0.0);
        CHECK(b.x <= 1.0);
    }
}

TEST_CASE("spectral report on the quarter frame") {
    const auto f = quarter_frame();
    const auto rep = spectral_report(f, partition_of(f, {0, 1}));
    CHECK(rep.lambda_max_A == Approx(0.5));
    CHECK(rep.lambda_min_A == Approx(0.5));
    CHECK(rep.lambda_max_IA == Approx(0.5));
    CHECK(rep.theta == Approx(0.5));
    CHECK(rep.guarantee == GuaranteeVerdict::Pass34);
}

TEST_CASE("adversarial partition fails in regime") {
    const auto f = rotate_frame(harmonic_frame(2, 884), 3);
    std::vector<std::size_t> all(f.m);
    for (std::size_t i = 0; i < f.m; ++i) all[i] = i;
    const auto rep = spectral_report(f, partition_of(f, all, Algorithm::BarrierGreedy));
    CHECK(rep.lambda_max_A == Approx(1.0));
    CHECK(rep.theta == Approx(0.0).margin(1e-9));
    CHECK(rep.guarantee == GuaranteeVerdict::Fail);
}

TEST_CASE("off-regime misses are not failures") {
    // d=2, m=12 is below both regimes; a lopsided split misses 3/4 but the
    // verdict is NotApplicable rather than Fail
    const auto f = rotate_frame(harmonic_frame(2, 12), 8);
    std::vector<std::size_t> all(f.m);
    for (std::size_t i = 0; i < f.m; ++i) all[i] = i;
    const auto rep = spectral_report(f, partition_of(f, all));
    CHECK(rep.guarantee == GuaranteeVerdict::NotApplicable);
}

TEST_CASE("parseval complement pairing") {
    SplitMix64 rng(5150);
    const auto f = rotate_frame(harmonic_frame(3, 18), 77);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < f.m; ++i)
            if (rng.next_below(2)) s.push_back(i);
        std::vector<std::size_t> comp;
        std::vector<bool> in(f.m, false);
        for (std::size_t i : s) in[i] = true;
        for (std::size_t i = 0; i < f.m; ++i)
            if (!in[i]) comp.push_back(i);
        const auto la = hermitian_eigenvalues(f.sum_outer(s));
        const auto lb = hermitian_eigenvalues(f.sum_outer(comp));
        for (std::size_t i = 0; i < la.size(); ++i)
            CHECK(lb[i] == Approx(1.0 - la[la.size() - 1 - i]).margin(1e-8));
    }
}

TEST_CASE("lemma floor on plain greedy run") {
    const auto f = rotate_frame(harmonic_frame(3, 444), 7);
    const auto r = run_plain_greedy(f);
    const auto rep = spectral_report(f, r);
    // -3 log 2 - 18/444
    CHECK(rep.logdet_floor == Approx(-3.0 * std::log(2.0) - 18.0 / 444.0));
    CHECK(rep.logdet_IA >= rep.logdet_floor - 1e-6);
    CHECK(rep.guarantee == GuaranteeVerdict::Pass34);
}

TEST_CASE("margin summary") {
    SECTION("arithmetic slack") {
        SpectralReport rep;
        rep.x_bound = 0.1;
        rep.kappa_IA = 1.2;
        rep.lambda_max_A = 0.6;
        rep.lambda_min_A = 0.4;
        rep.logdet_IA = -1.0;
        rep.logdet_floor = -1.5;
        const auto m = guarantee_margin(rep, GuaranteeRegime::Alg1Guaranteed);
        const auto* x = m.find("x_vs_1_5");
        REQUIRE(x);
        CHECK(x->slack == Approx(0.1));
        CHECK(x->applicable);
        const auto* ld = m.find("logdet_IA_vs_floor");
        REQUIRE(ld);
        CHECK(ld->slack == Approx(0.5));
    }
    SECTION("waypoints hold at the exact second-regime boundary") {
        const auto f = rotate_frame(harmonic_frame(2, 196), 19);  // 49 * d^2
        REQUIRE(classify_regime(2, 196) == GuaranteeRegime::Alg2Guaranteed);
        const auto r = run_plain_greedy(f);
        const auto rep = spectral_report(f, r);
        CHECK(rep.x_bound <= 0.2 + 1e-9);
        CHECK(rep.kappa_IA <= 1.5 + 1e-9);
    }
    SECTION("barrier run reports the lambda_min slack") {
        const auto f = rotate_frame(harmonic_frame(2, 884), 4);
        const auto r = run_barrier_greedy(f);
        const auto rep = spectral_report(f, r);
        const auto m = guarantee_margin(rep, classify_regime(2, 884));
        const auto* e = m.find("lambda_min_A_vs_1_4");
        REQUIRE(e);
        CHECK(e->applicable);
        CHECK(e->slack >= -1e-9);
    }
    SECTION("not applicable off regime") {
        SpectralReport rep;
        const auto m = guarantee_margin(rep, GuaranteeRegime::NoGuarantee);
        for (const auto& e : m.entries) CHECK_FALSE(e.applicable);
    }
}

TEST_CASE("theta is defined by the worst side") {
    const auto f = rotate_frame(harmonic_frame(2, 100), 6);
    const auto r = run_plain_greedy(f);
    const auto rep = spectral_report(f, r);
    CHECK(rep.theta ==
          Approx(1.0 - std::max(rep.lambda_max_A, rep.lambda_max_IA)).margin(1e-12));
    CHECK(rep.lambda_max_A == Approx(1.0 - rep.lambda_min_IA).margin(1e-9));
    CHECK(rep.lambda_min_A == Approx(1.0 - rep.lambda_max_IA).margin(1e-9));
}

TEST_CASE("index bounds are enforced") {
    const auto f = quarter_frame();
    PartitionResult r = partition_of(f, {0, 1});
    r.s1 = {0, 9};
    CHECK_THROWS_AS(spectral_report(f, r), IndexOutOfRange);
}
