#include <cmath>
#include <random>

#include "doctest.h"
#include "qsl/mixed.hpp"
#include "qsl/sampling.hpp"
#include "qsl/state.hpp"
#include "qsl/state_io.hpp"

using namespace qsl;

namespace {

bool same_levels(const SpectralState& s, std::vector<Level> want, double tol = 1e-15) {
    if (s.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (std::abs(s[i].energy - want[i].energy) > tol) return false;
        if (std::abs(s[i].probability - want[i].probability) > tol) return false;
    }
    return true;
}

std::string what_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const DomainError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("state") {

TEST_CASE("collapse sums degenerate weights") {
    const double r = 1.0 / std::sqrt(2.0);
    auto a = AmplitudeState::from_components({{{0, 0}, {r, 0}}, {{1, 0}, {0.5, 0}}, {{1, 1}, {0.5, 0}}});
    CHECK(same_levels(collapse_to_spectral(a), {{0, 0.5}, {1, 0.5}}, 1e-15));
}

TEST_CASE("collapse ignores phases") {
    const double r = 1.0 / std::sqrt(2.0);
    auto a = AmplitudeState::from_components({{{0, 0}, {0, r}}, {{1, 0}, {-r, 0}}});
    CHECK(same_levels(collapse_to_spectral(a), {{0, 0.5}, {1, 0.5}}, 1e-15));
}

TEST_CASE("collapse shifts the ground to zero") {
    const double r = 1.0 / std::sqrt(2.0);
    auto a = AmplitudeState::from_components({{{2, 0}, {r, 0}}, {{3, 0}, {r, 0}}});
    CHECK(same_levels(collapse_to_spectral(a), {{0, 0.5}, {1, 0.5}}, 1e-15));
}

TEST_CASE("spectral construction normalizes its input") {
    auto s = SpectralState::from_levels({{5, 0.25}, {3, 0.5}, {4, 0.25}, {7, 0.0}});
    CHECK(same_levels(s, {{0, 0.5}, {1, 0.25}, {2, 0.25}}));
    CHECK(s.max_energy() == 2.0);

    // near-equal energies merge
    auto m = SpectralState::from_levels({{0, 0.5}, {1, 0.25}, {1 + 1e-14, 0.25}});
    CHECK(same_levels(m, {{0, 0.5}, {1, 0.5}}));

    CHECK(what_of([] { SpectralState::from_levels({}); }) == "empty spectrum");
    CHECK(what_of([] { SpectralState::from_levels({{0, 0.0}}); }) == "empty spectrum");
    CHECK_THROWS_AS(SpectralState::from_levels({{0, 1.2}, {1, -0.2}}), DomainError);
    CHECK_THROWS_AS(SpectralState::from_levels({{NAN, 1.0}}), DomainError);
    CHECK_NOTHROW(SpectralState::from_levels({{0, 0.5}, {1, 0.5 + 5e-10}}));
    CHECK_THROWS_AS(SpectralState::from_levels({{0, 0.5}, {1, 0.5 + 5e-9}}), DomainError);
    CHECK(same_levels(SpectralState::normalized({{0, 2}, {1, 2}}), {{0, 0.5}, {1, 0.5}}));
}

TEST_CASE("amplitude construction errors") {
    CHECK_THROWS_AS(AmplitudeState::from_components({{{0, 0}, {1, 0}}, {{0, 0}, {0, 0}}}), DomainError);
    CHECK_THROWS_AS(AmplitudeState::from_components({{{-1, 0}, {1, 0}}}), DomainError);
    CHECK_THROWS_AS(AmplitudeState::from_components({{{0, -1}, {1, 0}}}), DomainError);
    CHECK_THROWS_AS(AmplitudeState::from_components({{{0, 0}, {0.5, 0}}}), DomainError);
    auto a = AmplitudeState::from_components({{{2, 1}, {0, 1}}});
    CHECK(a.amplitude_of({2, 1}) == complex(0, 1));
    CHECK(a.amplitude_of({2, 0}) == complex(0, 0));
}

TEST_CASE("moments of small spectra") {
    Moments m = moments(SpectralState::from_levels({{0, 0.5}, {1, 0.5}}));
    CHECK(m.mean_energy == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.energy_spread == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*m.alpha == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.max_energy == 1.0);

    m = moments(SpectralState::from_levels({{0, 0.25}, {2, 0.75}}));
    CHECK(m.mean_energy == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(m.energy_spread == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
    CHECK(*m.alpha == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(m.max_energy == 2.0);

    m = moments(SpectralState::from_levels({{0, 1}}));
    CHECK(m.mean_energy == 0.0);
    CHECK(m.energy_spread == 0.0);
    CHECK_FALSE(m.alpha.has_value());
    CHECK(m.max_energy == 0.0);
}

TEST_CASE("moments against direct sums") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const SpectralState s = random_state(rng);
        long double e = 0, e2 = 0;
        for (const auto& l : s.levels()) {
            e += (long double)l.probability * l.energy;
            e2 += (long double)l.probability * l.energy * l.energy;
        }
        const Moments m = moments(s);
        CHECK(std::abs(m.mean_energy - (double)e) < 1e-14);
        CHECK(std::abs(m.energy_spread - std::sqrt((double)(e2 - e * e))) < 1e-12);
        CHECK(m.max_energy >= m.mean_energy);
    }
}

TEST_CASE("round trip through the amplitude embedding") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const SpectralState s = random_state(rng);
        const SpectralState back = collapse_to_spectral(embed_spectral(s));
        REQUIRE(back.size() == s.size());
        for (std::size_t j = 0; j < s.size(); ++j) {
            CHECK(back[j].energy == s[j].energy);
            CHECK(std::abs(back[j].probability - s[j].probability) < 4e-16);
        }
    }
}

TEST_CASE("parse levels document") {
    auto doc = parse_state(R"({"levels":[{"e":0,"p":0.5},{"e":1,"p":0.5}]})");
    CHECK(doc.units.h == 1.0);
    REQUIRE(std::holds_alternative<SpectralState>(doc.value));
    CHECK(same_levels(pure_spectral(doc), {{0, 0.5}, {1, 0.5}}));

    doc = parse_state(R"({"h": 6.62607015e-34, "levels":[{"e":1e-34,"p":1}]})");
    CHECK(doc.units.h == 6.62607015e-34);
}

TEST_CASE("parse errors are descriptive") {
    CHECK(what_of([] { parse_state(R"({"levels":[{"e":0,"p":0.6},{"e":1,"p":0.5}]})"); }) ==
          "probabilities sum to 1.1");
    CHECK(what_of([] { parse_state(R"({"levels":[{"e":-1,"p":1}]})"); }) == "negative energy -1");
    CHECK(what_of([] { parse_state("{levels"); }).rfind("malformed JSON", 0) == 0);
    CHECK(what_of([] { parse_state(R"({"levels":[{"e":0,"p":1}],"x":1})"); }).find("unknown key") !=
          std::string::npos);
    CHECK(what_of([] { parse_state(R"({"h":1})"); }).find("exactly one") != std::string::npos);
    CHECK(what_of([] { parse_state(R"({"h":0,"levels":[{"e":0,"p":1}]})"); }) != "");
    CHECK(what_of([] { parse_state(R"({"levels":[{"e":"a","p":1}]})"); }).find("number") !=
          std::string::npos);
    CHECK(what_of([] { parse_state(R"({"basis":[{"e":0,"g":0.5,"re":1}]})"); }) != "");
}

TEST_CASE("parse basis and mixture documents") {
    auto doc = parse_state(R"({"basis":[{"e":2,"g":0,"im":0.6},{"e":2,"g":1,"re":0.8}]})");
    REQUIRE(std::holds_alternative<AmplitudeState>(doc.value));
    CHECK(same_levels(pure_spectral(doc), {{0, 1.0}}, 1e-15));

    doc = parse_state(R"({"mixture":[
        {"w":0.5,"state":{"levels":[{"e":0,"p":1}]}},
        {"w":0.5,"state":{"basis":[{"e":1,"re":1}]}}]})");
    REQUIRE(std::holds_alternative<MixedEnsemble>(doc.value));
    CHECK(std::get<MixedEnsemble>(doc.value).size() == 2);
    CHECK_THROWS_AS(pure_spectral(doc), DomainError);

    // members must be orthogonal
    CHECK_THROWS_AS(parse_state(R"({"mixture":[
        {"w":0.5,"state":{"levels":[{"e":0,"p":1}]}},
        {"w":0.5,"state":{"levels":[{"e":0,"p":0.5},{"e":1,"p":0.5}]}}]})"),
                    DomainError);
    CHECK_THROWS_AS(parse_state(R"({"mixture":[
        {"w":0.6,"state":{"levels":[{"e":0,"p":1}]}},
        {"w":0.5,"state":{"basis":[{"e":1,"re":1}]}}]})"),
                    DomainError);
}

TEST_CASE("serialized state parses back") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const SpectralState s = random_state(rng);
        const auto doc = parse_state(to_json(s).dump());
        CHECK(same_levels(pure_spectral(doc), s.levels(), 1e-15));
    }
}

}
