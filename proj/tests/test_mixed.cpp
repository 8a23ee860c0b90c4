#include <cmath>

#include "doctest.h"
#include "qsl/bounds.hpp"
#include "qsl/mixed.hpp"

using namespace qsl;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);

// four-term expansion of Tr[rho(0) rho(t)] for the rank-2 pair, written out
// amplitude by amplitude
double rank2_oracle(double l1, double t) {
    const complex ph = std::exp(complex(0, -2 * kPi * t));
    const complex plus[2] = {r2, r2};
    const complex minus[2] = {r2, -r2};
    const complex* psi[2] = {plus, minus};
    const double lam[2] = {l1, 1 - l1};
    double sum = 0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const complex ov = std::conj(psi[i][0]) * psi[j][0] + std::conj(psi[i][1]) * psi[j][1] * ph;
            sum += lam[i] * lam[j] * std::norm(ov);
        }
    }
    return sum;
}

AmplitudeState amp(std::vector<AmplitudeState::Component> c) {
    return AmplitudeState::from_components(std::move(c));
}

}  // namespace

TEST_SUITE("mixed") {

TEST_CASE("rank-2 pair is a valid ensemble") {
    const MixedEnsemble e = rank2_counterexample(1.0, 0.5);
    REQUIRE(e.size() == 2);
    CHECK(std::abs(evolved_overlap(e.members()[0].state, e.members()[1].state, 0.0)) < 1e-15);
    CHECK(trace_overlap(e, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(rank2_counterexample(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(rank2_counterexample(0.0, 0.5), DomainError);
}

TEST_CASE("rank-2 trace overlap against the four-term expansion") {
    CHECK(rank2_oracle(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rank2_oracle(0.9, 0.5) == doctest::Approx(0.18).epsilon(1e-15));
    for (double l1 : {0.5, 0.9, 0.3}) {
        const MixedEnsemble e = rank2_counterexample(1.0, l1);
        for (double t : {0.0, 0.1, 0.25, 0.5, 0.77, 1.3}) {
            CHECK(std::abs(trace_overlap(e, t) - rank2_oracle(l1, t)) < 1e-14);
        }
        // never orthogonal: swapping members keeps 2 l1 l2 of overlap
        CHECK(trace_overlap(e, 0.5) == doctest::Approx(2 * l1 * (1 - l1)).epsilon(1e-12));
    }
}

TEST_CASE("single member reduces to the pure survival probability") {
    const MixedEnsemble e = MixedEnsemble::from_members({{1.0, amp({{{0, 0}, {r2, 0}}, {{1, 0}, {r2, 0}}})}});
    CHECK(trace_overlap(e, 0.5) < 1e-30);
    CHECK(trace_overlap(e, 0.25) == doctest::Approx(0.5));
    BoundReport b = bound_report(ensemble_moments(e));
    CHECK_THROWS_AS(mixed_nonattainability_check(e, b), DomainError);
}

TEST_CASE("ensemble moments use the total second moment") {
    const MixedEnsemble e = MixedEnsemble::from_members(
        {{0.5, amp({{{0, 0}, {1, 0}}})}, {0.5, amp({{{2, 0}, {1, 0}}})}});
    const Moments m = ensemble_moments(e);
    CHECK(m.mean_energy == doctest::Approx(1.0));
    CHECK(m.energy_spread == doctest::Approx(1.0));
    CHECK(m.max_energy == 2.0);
    // stationary mixture: overlap stays at the purity
    CHECK(trace_overlap(e, 0.3) == doctest::Approx(0.5));
}

TEST_CASE("non-attainability check at the unified bound") {
    const MixedEnsemble e = rank2_counterexample(1.0, 0.5);
    const BoundReport b = bound_report(ensemble_moments(e));
    CHECK(b.tau_unified == doctest::Approx(0.5));
    CHECK(mixed_nonattainability_check(e, b) == doctest::Approx(0.5));
}

TEST_CASE("ensemble construction errors") {
    auto a = amp({{{0, 0}, {1, 0}}});
    auto b = amp({{{1, 0}, {1, 0}}});
    auto c = amp({{{0, 0}, {r2, 0}}, {{1, 0}, {r2, 0}}});
    CHECK_THROWS_AS(MixedEnsemble::from_members({}), DomainError);
    CHECK_THROWS_AS(MixedEnsemble::from_members({{0.5, a}, {0.6, b}}), DomainError);
    CHECK_THROWS_AS(MixedEnsemble::from_members({{1.0, a}, {0.0, b}}), DomainError);
    CHECK_THROWS_AS(MixedEnsemble::from_members({{0.5, a}, {0.5, c}}), DomainError);
    CHECK_NOTHROW(MixedEnsemble::from_members({{0.5, a}, {0.5, b}}));
}

}
