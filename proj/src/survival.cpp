#include "qsl/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qsl {

namespace {

struct Sample {
    double t;
    double prob;  // |S(t)|^2
};

// Bisection on the sign of d|S|^2/dt inside [a, b]; returns the minimizer.
double refine_minimum(const SpectralState& s, double a, double b, double tol, const Units& u) {
    double da = survival_prob_derivative(s, a, u);
    double db = survival_prob_derivative(s, b, u);
    if (da >= 0.0 && db >= 0.0) return a;
    if (da <= 0.0 && db <= 0.0) return b;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double dm = survival_prob_derivative(s, m, u);
        if (dm < 0.0) {
            a = m;
        } else if (dm > 0.0) {
            b = m;
        } else {
            return m;
        }
    }
    const double pa = std::norm(survival_amplitude(s, a, u));
    const double pb = std::norm(survival_amplitude(s, b, u));
    return pa <= pb ? a : b;
}

}  // namespace

complex survival_amplitude(const SpectralState& s, double t, const Units& u) {
    const double w = -2.0 * kPi * t / u.h;
    double re = 0.0;
    double im = 0.0;
    for (const auto& l : s.levels()) {
        const double ph = w * l.energy;
        re += l.probability * std::cos(ph);
        im += l.probability * std::sin(ph);
    }
    return {re, im};
}

double survival_prob_derivative(const SpectralState& s, double t, const Units& u) {
    const double w = -2.0 * kPi * t / u.h;
    complex amp{0.0, 0.0};
    complex damp{0.0, 0.0};
    for (const auto& l : s.levels()) {
        const complex e = std::polar(1.0, w * l.energy);
        amp += l.probability * e;
        damp += l.probability * l.energy * e;
    }
    damp *= complex(0.0, -2.0 * kPi / u.h);
    return 2.0 * (std::conj(amp) * damp).real();
}

void ZeroFinderConfig::validate() const {
    if (!(tolerance > 0.0)) throw DomainError("zero finder: tolerance must be positive");
    if (oversample < 8) throw DomainError("zero finder: oversample must be at least 8");
    if (!(horizon_factor > 0.0)) throw DomainError("zero finder: horizon factor must be positive");
    if (horizon && !(*horizon > 0.0)) throw DomainError("zero finder: horizon must be positive");
    if (!(refine_tolerance > 0.0)) {
        throw DomainError("zero finder: refine tolerance must be positive");
    }
}

OrthoResult first_orthogonal_time(const SpectralState& s, const ZeroFinderConfig& cfg,
                                  const Units& u) {
    cfg.validate();
    validate(u);

    OrthoResult r;
    r.tolerance = cfg.tolerance;
    if (s.size() < 2) {
        r.min_overlap = 1.0;
        r.horizon = cfg.horizon.value_or(0.0);
        return r;
    }

    const Moments m = moments(s);
    const double tau_mt = u.h / (4.0 * m.energy_spread);
    const double tau_ml = u.h / (4.0 * m.mean_energy);
    r.horizon = cfg.horizon.value_or(cfg.horizon_factor * std::max(tau_mt, tau_ml));

    const double period = u.h / m.max_energy;
    const double step = period / cfg.oversample;
    const double start = 0.5 * period;
    if (r.horizon < start) {
        r.min_overlap = std::abs(survival_amplitude(s, start, u));
        r.argmin_time = start;
        return r;
    }
    const auto n = static_cast<long>(std::ceil((r.horizon - start) / step));

    auto sample = [&](long i) {
        const double t = std::min(start + static_cast<double>(i) * step, r.horizon);
        return Sample{t, std::norm(survival_amplitude(s, t, u))};
    };

    double best = std::numeric_limits<double>::infinity();
    double best_t = start;
    const double tol2 = cfg.tolerance * cfg.tolerance;

    Sample prev = sample(0);
    Sample cur = prev;
    Sample next = n > 0 ? sample(1) : prev;
    for (long i = 0; i <= n; ++i) {
        const bool left_ok = i == 0 || cur.prob <= prev.prob;
        const bool right_ok = i == n || cur.prob <= next.prob;
        if (left_ok && right_ok) {
            const double a = i == 0 ? cur.t : prev.t;
            const double b = i == n ? cur.t : next.t;
            const double tm = refine_minimum(s, a, b, cfg.refine_tolerance, u);
            const double pm = std::norm(survival_amplitude(s, tm, u));
            if (pm <= tol2) {
                r.status = OrthoStatus::found;
                r.tau = tm;
                r.argmin_time = tm;
                r.min_overlap = std::sqrt(pm);
                return r;
            }
            // Ties keep the earliest minimum.
            if (pm < best - 1e-15) {
                best = pm;
                best_t = tm;
            }
        }
        prev = cur;
        cur = next;
        if (i + 2 <= n) next = sample(i + 2);
    }
    r.min_overlap = std::sqrt(best);
    r.argmin_time = best_t;
    return r;
}

}  // namespace qsl
