#include "qsl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsl/survival.hpp"

namespace qsl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOrthoPrecondition = 1e-9;
}  // namespace

BoundReport bound_report(const Moments& m, const Units& u) {
    validate(u);
    if (m.mean_energy <= 0.0 && m.energy_spread <= 0.0) {
        throw DomainError("ground state only");
    }
    BoundReport r;
    r.tau_mt = m.energy_spread > 0.0 ? u.h / (4.0 * m.energy_spread) : kInf;
    r.tau_ml = m.mean_energy > 0.0 ? u.h / (4.0 * m.mean_energy) : kInf;
    r.tau_unified = std::max(r.tau_mt, r.tau_ml);
    r.tau_emax = m.max_energy > 0.0 ? u.h / (2.0 * m.max_energy) : kInf;
    r.alpha = m.alpha;
    r.keel_value_bound = m.alpha ? keel_bound(*m.alpha)
                                 : 2.0 * r.tau_unified * (m.mean_energy + m.energy_spread) / u.h;
    return r;
}

double keel_bound(double alpha) {
    return 0.5 * (1.0 + std::exp(std::abs(std::log(alpha))));
}

double trig_margin_a(double x) {
    const double pi2 = kPi * kPi;
    return std::cos(x) - (1.0 - 4.0 / pi2 * x * std::sin(x) - 2.0 / pi2 * x * x);
}

double trig_margin_b(double x) {
    if (x < 0.0) {
        throw DomainError("trig_margin_b: inequality holds only for x >= 0");
    }
    return std::cos(x) - (1.0 - 2.0 / kPi * (x + std::sin(x)));
}

SpectralState fold_spectrum(const SpectralState& s, double tau, const Units& u) {
    if (!(tau > 0.0)) throw DomainError("fold_spectrum: tau must be positive");
    const double period = u.h / tau;
    std::vector<Level> levels = s.levels();
    for (auto& l : levels) {
        if (l.energy >= period) {
            const double n = std::floor(l.energy / period);
            l.energy -= n * period;
            // floor() of a rounded quotient can leave one period behind.
            if (l.energy >= period) l.energy -= period;
            if (l.energy < 0.0) l.energy = 0.0;
        }
    }
    return SpectralState::normalized(std::move(levels));
}

SpectralState reflect_spectrum(const SpectralState& s) {
    const double top = s.max_energy();
    std::vector<Level> levels = s.levels();
    for (auto& l : levels) l.energy = top - l.energy;
    return SpectralState::normalized(std::move(levels));
}

SpectralState reduce_spectrum(const SpectralState& s, double tau, const Units& u) {
    if (!(tau > 0.0)) throw DomainError("reduce_spectrum: tau must be positive");
    if (std::abs(survival_amplitude(s, tau, u)) > kOrthoPrecondition) {
        throw DomainError("state not orthogonal at tau");
    }
    SpectralState folded = fold_spectrum(s, tau, u);
    SpectralState reflected = reflect_spectrum(folded);
    return moments(reflected).mean_energy < moments(folded).mean_energy ? reflected : folded;
}

bool is_equal_two_level(const SpectralState& s, double tol) {
    return s.size() == 2 && std::abs(s[0].probability - 0.5) <= tol &&
           std::abs(s[1].probability - 0.5) <= tol;
}

}  // namespace qsl
