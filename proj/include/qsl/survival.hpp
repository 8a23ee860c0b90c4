// survival.hpp
// Survival amplitude S(t) = <psi(0)|psi(t)> and the first-zero search.

#pragma once

#include <optional>

#include "qsl/state.hpp"

namespace qsl {

// S(t) = sum_n p_n exp(-2 pi i E_n t / h).
complex survival_amplitude(const SpectralState& s, double t, const Units& u = {});

// Analytic d|S(t)|^2/dt.
double survival_prob_derivative(const SpectralState& s, double t, const Units& u = {});

struct ZeroFinderConfig {
    double tolerance = 1e-9;        // on |S|
    int oversample = 64;            // grid points per period h / e_max
    double horizon_factor = 8.0;    // horizon = factor * max(tau_MT, tau_ML)
    std::optional<double> horizon;  // absolute horizon, overrides the factor
    double refine_tolerance = 1e-13;

    void validate() const;
};

enum class OrthoStatus { found, not_found };

struct OrthoResult {
    OrthoStatus status = OrthoStatus::not_found;
    double tau = 0.0;          // meaningful only when found
    double min_overlap = 1.0;  // |S| at argmin_time
    double argmin_time = 0.0;
    double horizon = 0.0;
    double tolerance = 0.0;

    bool found() const { return status == OrthoStatus::found; }
};

// Scans |S(t)|^2 on a uniform grid of step (h / e_max) / oversample over
// [h / (2 e_max), horizon]. No zero can occur before h / (2 e_max). Every grid
// local minimum is refined by bisection on the sign of d|S|^2/dt; the earliest
// refined minimum with |S| <= tolerance is the orthogonalization time.
// Otherwise reports not_found with the smallest refined |S| seen.
OrthoResult first_orthogonal_time(const SpectralState& s, const ZeroFinderConfig& cfg = {},
                                  const Units& u = {});

}  // namespace qsl
