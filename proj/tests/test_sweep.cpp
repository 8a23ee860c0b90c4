#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qsl/bounds.hpp"
#include "qsl/sweep.hpp"

using namespace qsl;

TEST_SUITE("sweep") {

TEST_CASE("parameter lists") {
    SweepSpec s;
    parse_sweep_params("0.05,0.01;2,8,32", s);
    CHECK(s.p0s == std::vector<double>{0.05, 0.01});
    CHECK(s.ks == std::vector<int>{2, 8, 32});
    parse_sweep_params("0.1", s);
    CHECK(s.p0s.size() == 1);
    CHECK(s.ks.empty());
    CHECK_THROWS_AS(parse_sweep_params("0.1,x;2", s), DomainError);
    CHECK_THROWS_AS(parse_sweep_params("0.1;2.5", s), DomainError);
}

TEST_CASE("alpha grid") {
    SweepSpec s{0.2, 5.0, 25, {}, {}};
    const auto a = sweep_alphas(s);
    REQUIRE(a.size() == 25);
    CHECK(a.front() == 0.2);
    CHECK(a.back() == 5.0);
    CHECK(a[12] == 1.0);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
    CHECK_THROWS_AS(sweep_alphas({0.0, 1.0, 3, {}, {}}), DomainError);
    CHECK_THROWS_AS(sweep_alphas({2.0, 1.0, 3, {}, {}}), DomainError);
    CHECK_THROWS_AS(sweep_alphas({1.0, 2.0, 0, {}, {}}), DomainError);
}

TEST_CASE("rows and csv layout") {
    SweepSpec s{0.5, 2.0, 3, {0.05, 0.01}, {8, 32}};
    const SweepOutput out = run_sweep(s);
    CHECK(out.skipped.empty());
    // bound + two family rows per alpha, plus the exact row at alpha = 1
    CHECK(out.rows.size() == 3 + 2 + 1 + 2);
    for (const auto& r : out.rows) {
        CHECK(r.keel_bound == doctest::Approx(keel_bound(r.alpha)).epsilon(1e-15));
        CHECK(r.keel_value >= r.keel_bound * (1 - 1e-9));
        if (r.family == "bound") CHECK(std::abs(r.keel_value - r.keel_bound) < 1e-12);
    }
    // deterministic order: alpha, then bound, then parameters
    CHECK(out.rows[0].family == "bound");
    CHECK(out.rows[1].param == 0.05);
    CHECK(out.rows[2].param == 0.01);

    const std::string csv = sweep_csv(out.rows);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,family,param,tau,E,dE,keel_value,keel_bound");
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == static_cast<int>(out.rows.size()));
}

TEST_CASE("unreachable rows are skipped") {
    SweepSpec s{5.0, 5.0, 1, {}, {2, 32}};
    const SweepOutput out = run_sweep(s);
    CHECK(out.rows.size() == 2);
    CHECK(out.skipped.size() == 1);
}

}
