#include "qsl/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qsl {

MixedEnsemble MixedEnsemble::from_members(std::vector<Member> members) {
    if (members.empty()) throw DomainError("empty mixture");
    double total = 0.0;
    for (const auto& m : members) {
        if (!(m.weight > 0.0) || !std::isfinite(m.weight)) {
            throw DomainError("mixture weights must be positive");
        }
        total += m.weight;
    }
    if (std::abs(total - 1.0) > SpectralState::kNormTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "mixture weights sum to %.12g", total);
        throw DomainError(buf);
    }
    for (auto& m : members) m.weight /= total;

    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const double ov = std::abs(evolved_overlap(members[i].state, members[j].state, 0.0));
            if (ov >= kOrthogonalityTolerance) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "mixture members %zu and %zu not orthogonal (%.3g)",
                              i, j, ov);
                throw DomainError(buf);
            }
        }
    }
    return MixedEnsemble(std::move(members));
}

complex evolved_overlap(const AmplitudeState& a, const AmplitudeState& b, double t,
                        const Units& u) {
    const double w = -2.0 * kPi * t / u.h;
    complex sum{0.0, 0.0};
    for (const auto& cb : b.components()) {
        const complex ca = a.amplitude_of(cb.label);
        if (ca == complex{0.0, 0.0}) continue;
        sum += std::conj(ca) * cb.amplitude * std::polar(1.0, w * cb.label.energy);
    }
    return sum;
}

double trace_overlap(const MixedEnsemble& e, double t, const Units& u) {
    double sum = 0.0;
    for (const auto& mi : e.members()) {
        for (const auto& mj : e.members()) {
            sum += mi.weight * mj.weight * std::norm(evolved_overlap(mi.state, mj.state, t, u));
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

Moments ensemble_moments(const MixedEnsemble& e) {
    double mean = 0.0;
    double second = 0.0;
    double top = 0.0;
    for (const auto& m : e.members()) {
        for (const auto& c : m.state.components()) {
            const double p = m.weight * std::norm(c.amplitude);
            mean += p * c.label.energy;
            second += p * c.label.energy * c.label.energy;
            if (std::norm(c.amplitude) > 0.0) top = std::max(top, c.label.energy);
        }
    }
    Moments out;
    out.mean_energy = mean;
    out.energy_spread = std::sqrt(std::max(second - mean * mean, 0.0));
    out.max_energy = top;
    if (mean > 0.0) out.alpha = out.energy_spread / mean;
    return out;
}

MixedEnsemble rank2_counterexample(double e1, double lambda1) {
    if (!(e1 > 0.0)) throw DomainError("rank-2 counterexample requires e1 > 0");
    if (!(lambda1 > 0.0 && lambda1 < 1.0)) {
        throw DomainError("rank-2 counterexample requires 0 < lambda1 < 1");
    }
    const double r = 1.0 / std::sqrt(2.0);
    auto plus = AmplitudeState::from_components({{{0.0, 0}, {r, 0.0}}, {{e1, 0}, {r, 0.0}}});
    auto minus = AmplitudeState::from_components({{{0.0, 0}, {r, 0.0}}, {{e1, 0}, {-r, 0.0}}});
    return MixedEnsemble::from_members({{lambda1, plus}, {1.0 - lambda1, minus}});
}

double mixed_nonattainability_check(const MixedEnsemble& e, const BoundReport& report,
                                    const Units& u) {
    if (e.size() < 2) {
        throw DomainError("non-attainability check needs at least two members");
    }
    return trace_overlap(e, report.tau_unified, u);
}

}  // namespace qsl
