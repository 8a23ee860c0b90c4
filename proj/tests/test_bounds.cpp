#include <cmath>

#include "doctest.h"
#include "qsl/bounds.hpp"
#include "qsl/families.hpp"
#include "qsl/sampling.hpp"
#include "qsl/survival.hpp"

using namespace qsl;

namespace {

Moments mk(double e, double de, double emax = 1.0) {
    Moments m;
    m.mean_energy = e;
    m.energy_spread = de;
    if (e > 0) m.alpha = de / e;
    m.max_energy = emax;
    return m;
}

bool same_levels(const SpectralState& s, std::vector<Level> want, double tol = 1e-12) {
    if (s.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (std::abs(s[i].energy - want[i].energy) > tol) return false;
        if (std::abs(s[i].probability - want[i].probability) > tol) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("bound report values") {
    BoundReport b = bound_report(mk(0.5, 0.5));
    CHECK(b.tau_mt == doctest::Approx(0.5));
    CHECK(b.tau_ml == doctest::Approx(0.5));
    CHECK(b.tau_unified == doctest::Approx(0.5));
    CHECK(b.tau_emax == doctest::Approx(0.5));
    CHECK(b.keel_value_bound == doctest::Approx(1.0));

    b = bound_report(mk(0.75, 0.25));
    CHECK(b.tau_mt == doctest::Approx(1.0));
    CHECK(b.tau_ml == doctest::Approx(1.0 / 3));
    CHECK(b.tau_unified == doctest::Approx(1.0));
    CHECK(b.keel_value_bound == doctest::Approx(2.0));

    b = bound_report(mk(0.5, 1.5));
    CHECK(b.tau_unified == doctest::Approx(0.5));
    CHECK(b.tau_ml == b.tau_unified);
    CHECK(b.keel_value_bound == doctest::Approx(2.0));

    b = bound_report(mk(0.5, 0.5), Units{3.0});
    CHECK(b.tau_unified == doctest::Approx(1.5));
}

TEST_CASE("degenerate bound reports") {
    CHECK_THROWS_WITH_AS(bound_report(mk(0, 0)), "ground state only", DomainError);
    // a spread with no mean energy cannot occur, but the report stays defined
    BoundReport b = bound_report(mk(0.5, 0.0));
    CHECK(std::isinf(b.tau_mt));
    CHECK(std::isinf(b.tau_unified));
}

TEST_CASE("keel bound") {
    CHECK(keel_bound(1.0) == 1.0);
    CHECK(keel_bound(1.0 / 3) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(keel_bound(3.0) == doctest::Approx(2.0).epsilon(1e-15));
    for (double a : {0.2, 0.5, 0.9, 1.1, 2.0, 5.0}) {
        CHECK(keel_bound(a) == doctest::Approx(keel_bound(1.0 / a)).epsilon(1e-15));
        CHECK(keel_bound(a) > 1.0);
    }
}

TEST_CASE("trig margins") {
    CHECK(trig_margin_a(0.0) == 0.0);
    CHECK(std::abs(trig_margin_a(kPi)) < 1e-12);
    CHECK(std::abs(trig_margin_a(-kPi)) < 1e-12);
    CHECK(trig_margin_a(kPi / 2) == doctest::Approx(2 / kPi - 0.5).epsilon(1e-14));
    CHECK(trig_margin_b(0.0) == 0.0);
    CHECK(std::abs(trig_margin_b(kPi)) < 1e-12);
    CHECK(trig_margin_b(kPi / 2) == doctest::Approx(2 / kPi).epsilon(1e-14));
    CHECK_THROWS_AS(trig_margin_b(-0.1), DomainError);
    for (int i = -2000; i <= 2000; ++i) {
        const double x = i * 0.01;
        CHECK(trig_margin_a(x) >= -1e-12);
        if (x >= 0) CHECK(trig_margin_b(x) >= -1e-12);
    }
}

TEST_CASE("fold examples") {
    auto s = SpectralState::from_levels({{0, 0.5}, {3, 0.5}});
    auto f = fold_spectrum(s, 0.5);
    CHECK(same_levels(f, {{0, 0.5}, {1, 0.5}}));
    CHECK(moments(f).mean_energy == doctest::Approx(0.5));
    CHECK(std::abs(survival_amplitude(f, 0.5)) < 1e-15);

    s = SpectralState::from_levels({{0, 0.5}, {1, 0.5}});
    CHECK(fold_spectrum(s, 0.5) == s);

    s = SpectralState::from_levels({{0, 1.0 / 3}, {2, 1.0 / 3}, {4, 1.0 / 3}});
    CHECK(same_levels(fold_spectrum(s, 0.5), {{0, 1}}));
    CHECK_THROWS_AS(fold_spectrum(s, 0.0), DomainError);
}

TEST_CASE("reflect examples") {
    CHECK(same_levels(reflect_spectrum(SpectralState::from_levels({{0, 0.3}, {1, 0.7}})),
                      {{0, 0.7}, {1, 0.3}}));
    auto two = SpectralState::from_levels({{0, 0.5}, {1, 0.5}});
    CHECK(reflect_spectrum(two) == two);
    CHECK(same_levels(reflect_spectrum(SpectralState::from_levels({{0, 0.25}, {1, 0.25}, {3, 0.5}})),
                      {{0, 0.5}, {2, 0.25}, {3, 0.25}}));
}

TEST_CASE("reflection preserves the modulus of S") {
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const SpectralState s = random_state(rng);
        const SpectralState r = reflect_spectrum(s);
        CHECK(moments(r).mean_energy ==
              doctest::Approx(s.max_energy() - moments(s).mean_energy).epsilon(1e-12));
        for (double t : {0.1, 0.37, 1.3, 4.0}) {
            CHECK(std::abs(std::abs(survival_amplitude(s, t)) - std::abs(survival_amplitude(r, t))) <
                  1e-13);
        }
    }
}

TEST_CASE("reduce examples") {
    auto r = reduce_spectrum(SpectralState::from_levels({{0, 0.5}, {3, 0.5}}), 0.5);
    CHECK(same_levels(r, {{0, 0.5}, {1, 0.5}}));
    const Moments m = moments(r);
    CHECK(m.mean_energy >= m.max_energy / 4);
    CHECK(m.mean_energy <= m.max_energy / 2);

    CHECK_THROWS_WITH_AS(reduce_spectrum(SpectralState::from_levels({{0, 0.3}, {1, 0.7}}), 0.5),
                         "state not orthogonal at tau", DomainError);

    const FamilyState fb = family_b({1.5, 2, 1.0});
    const SpectralState red = reduce_spectrum(fb.state, 0.5);
    const Moments mr = moments(red);
    CHECK(mr.max_energy < 2.0);
    CHECK(mr.mean_energy <= mr.max_energy / 2 + 1e-12);
    CHECK(std::abs(survival_amplitude(red, 0.5)) < 1e-12);
}

TEST_CASE("reduction of lifted orthogonal states") {
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const double tau = 0.5 + i * 0.01;
        const SpectralState base = random_orthogonal_state(rng, tau);
        const SpectralState lifted = lift_energies(rng, base, tau, 4);
        const SpectralState red = reduce_spectrum(lifted, tau);
        const Moments m = moments(red);
        CHECK(m.max_energy < 1.0 / tau);
        CHECK(std::abs(survival_amplitude(red, tau) - survival_amplitude(lifted, tau)) < 1e-12);
        CHECK(m.mean_energy <= m.max_energy / 2 + 1e-12);
        CHECK(m.mean_energy <= moments(lifted).mean_energy + 1e-12);
        // at any zero the mean sits above a quarter of the top level
        CHECK(m.mean_energy >= m.max_energy / 4 - 1e-9);
    }
}

TEST_CASE("equal two-level detection") {
    CHECK(is_equal_two_level(SpectralState::from_levels({{0, 0.5}, {7, 0.5}})));
    CHECK_FALSE(is_equal_two_level(SpectralState::from_levels({{0, 0.6}, {7, 0.4}})));
    CHECK_FALSE(is_equal_two_level(SpectralState::from_levels({{0, 0.5}, {1, 0.25}, {2, 0.25}})));
}

TEST_CASE("bounds hold for random orthogonal states") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const SpectralState s = random_orthogonal_state(rng, 1.0);
        const OrthoResult r = first_orthogonal_time(s);
        REQUIRE(r.found());
        const BoundReport b = bound_report(moments(s));
        CHECK(r.tau >= b.tau_unified * (1 - 1e-9));
        CHECK(r.tau >= b.tau_emax * (1 - 1e-9));
    }
}

}
