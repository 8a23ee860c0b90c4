#include "qsl/families.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qsl/bounds.hpp"
#include "qsl/survival.hpp"

namespace qsl {

namespace {

constexpr double kNewtonTolerance = 1e-12;
constexpr int kNewtonMaxIter = 100;

double inf_norm(const std::array<double, 4>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

Eigen::Matrix4d family_a_jacobian(const FamilyAAngles& v) {
    const double m = v.p1 * v.x1 + v.p2 * v.x2;
    const double q = v.p1 * v.x1 * v.x1 + v.p2 * v.x2 * v.x2;
    const double sd = std::sqrt(std::max(q - m * m, 0.0));

    const Eigen::Vector4d dm(v.x1, v.x2, v.p1, v.p2);
    const Eigen::Vector4d dq(v.x1 * v.x1, v.x2 * v.x2, 2.0 * v.p1 * v.x1, 2.0 * v.p2 * v.x2);
    const Eigen::Vector4d dsd = (dq - 2.0 * m * dm) / (2.0 * sd);

    Eigen::Matrix4d j;
    j.row(0) << std::sin(v.x1), std::sin(v.x2), v.p1 * std::cos(v.x1), v.p2 * std::cos(v.x2);
    j.row(1) << std::cos(v.x1), std::cos(v.x2), -v.p1 * std::sin(v.x1), -v.p2 * std::sin(v.x2);
    j.row(2) << 1.0, 1.0, 0.0, 0.0;
    j.row(3) = (dsd / m - sd * dm / (m * m)).transpose();
    return j;
}

SpectralState family_a_state(double p0, const FamilyAAngles& v, const Units& u) {
    const double scale = u.h / (2.0 * kPi);
    return SpectralState::normalized({{0.0, p0}, {v.x1 * scale, v.p1}, {v.x2 * scale, v.p2}});
}

FamilyState finish(SpectralState state, double predicted, const Units& u) {
    const Moments m = moments(state);
    const OrthoResult ortho = first_orthogonal_time(state, {}, u);
    if (!ortho.found()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "family state never orthogonal (min |S| = %.3g)",
                      ortho.min_overlap);
        throw DomainError(buf);
    }
    const BoundReport b = bound_report(m, u);
    FamilyState fs{std::move(state), predicted, ortho.tau, m.alpha.value_or(0.0),
                   ortho.tau / b.tau_unified};
    return fs;
}

}  // namespace

void FamilyAParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("family A requires 0 < alpha < 1");
    }
    if (!(p0 > 0.0 && p0 <= 0.2)) {
        throw DomainError("family A requires 0 < p0 <= 0.2");
    }
}

void FamilyBParams::validate() const {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw DomainError("family B requires alpha > 1");
    if (k < 1) throw DomainError("family B requires k >= 1");
    if (!(e1 > 0.0) || !std::isfinite(e1)) throw DomainError("family B requires e1 > 0");
}

FamilyAAngles family_a_seed_angles(const FamilyAParams& p) {
    p.validate();
    const double delta = 2.0 * p.p0;
    FamilyAAngles v;
    v.x1 = 0.5 * kPi * (1.0 / p.alpha - 1.0);
    v.x2 = kPi + v.x1 - delta * std::sin(v.x1);
    v.p1 = 0.5 - 0.25 * delta * (1.0 + std::cos(v.x1));
    v.p2 = 0.5 - 0.25 * delta * (1.0 - std::cos(v.x1));
    return v;
}

SpectralState family_a_seed(const FamilyAParams& p, const Units& u) {
    validate(u);
    return family_a_state(p.p0, family_a_seed_angles(p), u);
}

std::array<double, 4> family_a_residual(const FamilyAParams& p, const FamilyAAngles& v) {
    const double m = v.p1 * v.x1 + v.p2 * v.x2;
    const double q = v.p1 * v.x1 * v.x1 + v.p2 * v.x2 * v.x2;
    const double sd = std::sqrt(std::max(q - m * m, 0.0));
    return {v.p1 * std::sin(v.x1) + v.p2 * std::sin(v.x2),
            p.p0 + v.p1 * std::cos(v.x1) + v.p2 * std::cos(v.x2),
            p.p0 + v.p1 + v.p2 - 1.0,
            sd / m - p.alpha};
}

FamilyState family_a_refine(const FamilyAParams& p, const Units& u) {
    validate(u);
    FamilyAAngles v = family_a_seed_angles(p);
    auto r = family_a_residual(p, v);
    double norm = inf_norm(r);

    for (int it = 0; it < kNewtonMaxIter && norm >= kNewtonTolerance; ++it) {
        const Eigen::Matrix4d j = family_a_jacobian(v);
        const Eigen::Vector4d rhs(r[0], r[1], r[2], r[3]);
        const Eigen::Vector4d step = j.fullPivLu().solve(-rhs);

        // Backtrack until the residual drops; accept the smallest step otherwise.
        double lambda = 1.0;
        FamilyAAngles trial = v;
        std::array<double, 4> tr = r;
        for (int ls = 0; ls < 30; ++ls) {
            trial = {v.p1 + lambda * step[0], v.p2 + lambda * step[1], v.x1 + lambda * step[2],
                     v.x2 + lambda * step[3]};
            tr = family_a_residual(p, trial);
            if (trial.p1 > 0.0 && trial.p2 > 0.0 && inf_norm(tr) < norm) break;
            lambda *= 0.5;
        }
        v = trial;
        r = tr;
        norm = inf_norm(r);
    }
    if (!(norm < kNewtonTolerance) || !(v.p1 > 0.0 && v.p2 > 0.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "family A Newton did not converge (residual %.3e)", norm);
        throw DomainError(buf);
    }

    SpectralState state = family_a_state(p.p0, v, u);
    const double predicted = predicted_tau(p, moments(state), u);
    return finish(std::move(state), predicted, u);
}

double family_b_alpha(double beta, int k) {
    const double kk = static_cast<double>(k);
    const double w = beta / kk;  // mean energy is 1/2 + w in units of E1
    const double var = 0.25 + w + 2.0 * kk * w - w * w;
    return std::sqrt(std::max(var, 0.0)) / (0.5 + w);
}

double family_b_beta_peak(int k) {
    const double kk = static_cast<double>(k);
    return kk * kk / (2.0 * (kk + 1.0));
}

FamilyState family_b(const FamilyBParams& p, const Units& u) {
    p.validate();
    validate(u);

    double lo = 0.0;
    double hi = family_b_beta_peak(p.k);
    if (family_b_alpha(hi, p.k) < p.alpha) {
        throw DomainError("alpha unreachable at this k");
    }
    // Seeded bracket: beta ~ (alpha - 1) / 4 for large k.
    const double guess = 0.25 * (p.alpha - 1.0);
    if (guess < hi) {
        if (family_b_alpha(guess, p.k) < p.alpha) {
            lo = guess;
        } else {
            hi = guess;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (family_b_alpha(mid, p.k) < p.alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double beta = std::abs(family_b_alpha(lo, p.k) - p.alpha) <=
                                std::abs(family_b_alpha(hi, p.k) - p.alpha)
                            ? lo
                            : hi;

    const double k2 = static_cast<double>(p.k) * p.k;
    const double top = (2.0 * p.k + 1.0) * p.e1;
    SpectralState state = SpectralState::normalized(
        {{0.0, 0.5}, {p.e1, 0.5 * (1.0 - beta / k2)}, {top, beta / (2.0 * k2)}});
    const double predicted = predicted_tau(p, moments(state), u);
    return finish(std::move(state), predicted, u);
}

double family_a_correction(double alpha) {
    return 4.0 / kPi * std::sin(0.5 * kPi * (1.0 / alpha - 1.0));
}

double predicted_tau(const FamilyAParams& p, const Moments& m, const Units& u) {
    p.validate();
    const double first_order =
        0.5 * p.p0 * (1.0 / (p.alpha * p.alpha) - 1.0 - family_a_correction(p.alpha));
    return u.h / (4.0 * m.energy_spread) * (1.0 + first_order);
}

double predicted_tau(const FamilyBParams& p, const Moments& m, const Units& u) {
    p.validate();
    // beta -> (alpha^2 - 1) / 8 and E = (1/2 + beta/k) E1, so tau 4E/h - 1 = 2 beta / k
    return u.h / (4.0 * m.mean_energy) * (1.0 + (p.alpha * p.alpha - 1.0) / (4.0 * p.k));
}

}  // namespace qsl
