// bounds.hpp
// Closed-form orthogonalization-time bounds, the trigonometric inequalities
// behind them, and spectrum reductions that keep S(tau) fixed.

#pragma once

#include <optional>

#include "qsl/state.hpp"

namespace qsl {

// Infinite bounds (zero spread or zero mean energy) are +infinity.
struct BoundReport {
    double tau_mt = 0.0;       // h / (4 dE)
    double tau_ml = 0.0;       // h / (4 E)
    double tau_unified = 0.0;  // max(tau_mt, tau_ml)
    double tau_emax = 0.0;     // h / (2 e_max)
    double keel_value_bound = 0.0;
    std::optional<double> alpha;
};

BoundReport bound_report(const Moments& m, const Units& u = {});

// (1 + e^|ln alpha|) / 2, the lower envelope of 2 tau (E + dE) / h.
double keel_bound(double alpha);

// cos x - (1 - (4/pi^2) x sin x - (2/pi^2) x^2); non-negative for every real x.
double trig_margin_a(double x);

// cos x - (1 - (2/pi)(x + sin x)); non-negative for x >= 0, DomainError otherwise.
double trig_margin_b(double x);

// Replaces every energy E >= h/tau by E - n h/tau with n = floor(E tau / h),
// merging collisions. S(tau) is unchanged and the mean energy never increases.
SpectralState fold_spectrum(const SpectralState& s, double tau, const Units& u = {});

// E_n -> e_max - E_n.
SpectralState reflect_spectrum(const SpectralState& s);

// Folds at tau, then keeps whichever of the folded state and its reflection
// has the lower mean energy. Requires |S(tau)| <= 1e-9.
SpectralState reduce_spectrum(const SpectralState& s, double tau, const Units& u = {});

// True when the state is the equal-weight two-level state (within tol on the
// probabilities).
bool is_equal_two_level(const SpectralState& s, double tol = 1e-6);

}  // namespace qsl
