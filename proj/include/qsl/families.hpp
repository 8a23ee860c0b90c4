// families.hpp
// Three-level state families whose orthogonalization time approaches the
// unified bound max(h/4E, h/4dE).
//
// Family A (alpha < 1): levels {0, E1, E2} with a small ground weight p0; the
// two upper levels sit almost exactly half a turn apart at tau. Family B
// (alpha > 1): levels {0, E1, (2k+1) E1} with ground weight 1/2, exactly
// orthogonal at tau = h / (2 E1); the bound is approached as k grows.

#pragma once

#include <array>

#include "qsl/state.hpp"

namespace qsl {

struct FamilyAParams {
    double alpha = 0.5;  // in (0, 1)
    double p0 = 0.01;    // in (0, 0.2]

    void validate() const;
};

struct FamilyBParams {
    double alpha = 2.0;  // > 1
    int k = 10;          // >= 1
    double e1 = 1.0;     // > 0

    void validate() const;
};

struct FamilyState {
    SpectralState state;
    double predicted_tau = 0.0;
    double achieved_tau = 0.0;
    double achieved_alpha = 0.0;
    double bound_ratio = 0.0;  // achieved_tau / tau_unified
};

// Angles x_i = 2 pi E_i tau / h of the first-order construction.
struct FamilyAAngles {
    double p1 = 0.0;
    double p2 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
};

FamilyAAngles family_a_seed_angles(const FamilyAParams& p);

// First-order state at working time tau = 1 (energies x_i h / (2 pi)).
SpectralState family_a_seed(const FamilyAParams& p, const Units& u = {});

// Residuals of the exact family A system at fixed p0: imaginary and real part
// of S(tau), normalization, and achieved alpha minus target.
std::array<double, 4> family_a_residual(const FamilyAParams& p, const FamilyAAngles& v);

// Newton-refined family A state, exactly orthogonal at tau = 1 with the
// target alpha. Throws DomainError carrying the last residual on failure.
FamilyState family_a_refine(const FamilyAParams& p, const Units& u = {});

// Alpha of the family B state as a function of beta at fixed k.
double family_b_alpha(double beta, int k);

// Largest beta on the increasing branch of family_b_alpha.
double family_b_beta_peak(int k);

FamilyState family_b(const FamilyBParams& p, const Units& u = {});

// Coefficient c(alpha) in tau = (h / 4 dE) (1 + (p0/2)(1/alpha^2 - 1 - c) + O(p0^2)),
// c = (4/pi) sin((pi/2)(1/alpha - 1)); confirmed against refined states.
double family_a_correction(double alpha);

// Asymptotic predictions, evaluated with the moments of the state they refer to.
// A: (h / 4dE) (1 + (p0/2)(1/alpha^2 - 1 - c(alpha))).
// B: (h / 4E) (1 + (alpha^2 - 1) / (4k)).
double predicted_tau(const FamilyAParams& p, const Moments& m, const Units& u = {});
double predicted_tau(const FamilyBParams& p, const Moments& m, const Units& u = {});

}  // namespace qsl
