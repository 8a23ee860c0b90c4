// sweep.hpp
// Keel-curve data: 2 tau (E + dE) / h against alpha for the bound and for
// family approximants.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qsl {

struct SweepRow {
    double alpha = 0.0;
    std::string family;  // "A", "B" or "bound"
    double param = 0.0;  // p0 for A, k for B, 0 for bound
    double tau = 0.0;
    double mean_energy = 0.0;
    double energy_spread = 0.0;
    double keel_value = 0.0;
    double keel_bound = 0.0;
};

struct SweepSpec {
    double alpha_min = 0.2;
    double alpha_max = 5.0;
    int points = 25;
    std::vector<double> p0s;  // family A parameters, used for alpha < 1
    std::vector<int> ks;      // family B parameters, used for alpha > 1
};

struct SweepOutput {
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped;  // one message per family row not produced
};

// "0.05,0.01;2,8,32" -> p0 list and k list; either side may be empty.
void parse_sweep_params(std::string_view text, SweepSpec& spec);

// Geometric alpha grid from alpha_min to alpha_max inclusive.
std::vector<double> sweep_alphas(const SweepSpec& spec);

// Rows in alpha order; per alpha the bound row first, then family rows in
// parameter order. At alpha = 1 the exact two-level state is emitted as an
// "A" row with param 0.
SweepOutput run_sweep(const SweepSpec& spec);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace qsl
