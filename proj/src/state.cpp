#include "qsl/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace qsl {

namespace {

std::string format_sum(double total) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", total);
    return buf;
}

}  // namespace

void validate(const Units& u) {
    if (!(u.h > 0.0) || !std::isfinite(u.h)) {
        throw DomainError("Planck constant h must be positive and finite");
    }
}

SpectralState SpectralState::from_levels(std::vector<Level> levels) {
    return build(std::move(levels), true);
}

SpectralState SpectralState::normalized(std::vector<Level> levels) {
    return build(std::move(levels), false);
}

SpectralState SpectralState::build(std::vector<Level> levels, bool strict_norm) {
    double total = 0.0;
    double scale = 0.0;
    for (const auto& l : levels) {
        if (!std::isfinite(l.energy) || !std::isfinite(l.probability)) {
            throw DomainError("non-finite energy or probability");
        }
        if (l.probability < 0.0) {
            throw DomainError("negative probability " + format_sum(l.probability));
        }
        total += l.probability;
        scale = std::max(scale, std::abs(l.energy));
    }
    std::erase_if(levels, [](const Level& l) { return l.probability == 0.0; });
    if (levels.empty()) {
        throw DomainError("empty spectrum");
    }
    if (strict_norm && std::abs(total - 1.0) > kNormTolerance) {
        throw DomainError("probabilities sum to " + format_sum(total));
    }

    std::sort(levels.begin(), levels.end(),
              [](const Level& a, const Level& b) { return a.energy < b.energy; });

    const double merge_gap = kMergeTolerance * scale;
    std::vector<Level> merged;
    merged.reserve(levels.size());
    for (const auto& l : levels) {
        if (!merged.empty() && l.energy - merged.back().energy <= merge_gap) {
            merged.back().probability += l.probability;
        } else {
            merged.push_back(l);
        }
    }

    const double ground = merged.front().energy;
    for (auto& l : merged) {
        l.energy -= ground;
        l.probability /= total;
    }
    merged.front().energy = 0.0;
    return SpectralState(std::move(merged));
}

AmplitudeState AmplitudeState::from_components(std::vector<Component> components) {
    if (components.empty()) {
        throw DomainError("empty spectrum");
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (!std::isfinite(c.label.energy) || !std::isfinite(c.amplitude.real()) ||
            !std::isfinite(c.amplitude.imag())) {
            throw DomainError("non-finite energy or amplitude");
        }
        if (c.label.energy < 0.0) {
            throw DomainError("negative energy " + format_sum(c.label.energy));
        }
        if (c.label.degeneracy < 0) {
            throw DomainError("negative degeneracy index");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (components[j].label == c.label) {
                throw DomainError("duplicate basis label (e=" + format_sum(c.label.energy) +
                                  ", g=" + std::to_string(c.label.degeneracy) + ")");
            }
        }
        norm2 += std::norm(c.amplitude);
    }
    if (std::abs(norm2 - 1.0) > SpectralState::kNormTolerance) {
        throw DomainError("probabilities sum to " + format_sum(norm2));
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : components) {
        c.amplitude *= inv;
    }
    return AmplitudeState(std::move(components));
}

complex AmplitudeState::amplitude_of(const BasisLabel& label) const {
    for (const auto& c : components_) {
        if (c.label == label) return c.amplitude;
    }
    return {0.0, 0.0};
}

SpectralState collapse_to_spectral(const AmplitudeState& s) {
    std::vector<Level> levels;
    levels.reserve(s.size());
    for (const auto& c : s.components()) {
        levels.push_back({c.label.energy, std::norm(c.amplitude)});
    }
    return SpectralState::normalized(std::move(levels));
}

AmplitudeState embed_spectral(const SpectralState& s) {
    std::vector<AmplitudeState::Component> comps;
    comps.reserve(s.size());
    for (const auto& l : s.levels()) {
        comps.push_back({{l.energy, 0}, complex(std::sqrt(l.probability), 0.0)});
    }
    return AmplitudeState::from_components(std::move(comps));
}

Moments moments(const SpectralState& s) {
    Moments m;
    double mean = 0.0;
    for (const auto& l : s.levels()) mean += l.probability * l.energy;
    // Two-pass variance; avoids cancellation in <H^2> - <H>^2.
    double var = 0.0;
    for (const auto& l : s.levels()) {
        const double d = l.energy - mean;
        var += l.probability * d * d;
    }
    m.mean_energy = mean;
    m.energy_spread = std::sqrt(std::max(var, 0.0));
    m.max_energy = s.max_energy();
    if (mean > 0.0) m.alpha = m.energy_spread / mean;
    return m;
}

}  // namespace qsl
