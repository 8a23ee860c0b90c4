// state.hpp
// Spectral and amplitude representations of a pure state, plus energy moments.
//
// Units: every routine takes the Planck constant h explicitly through Units
// (default h = 1, so hbar = 1/(2 pi)). Energies are measured from the ground
// level, which is always shifted to exactly zero.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsl {

using complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct Units {
    double h = 1.0;

    double hbar() const { return h / (2.0 * kPi); }
};

// Thrown for invalid states, invalid parameters and violated preconditions.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void validate(const Units& u);

struct Level {
    double energy = 0.0;
    double probability = 0.0;

    bool operator==(const Level&) const = default;
};

// Probability distribution over distinct energy levels.
//
// Invariants: at least one level, energies strictly increasing with the first
// one exactly 0, every probability > 0, probabilities sum to 1 within 1e-12.
class SpectralState {
public:
    // Sum of relative probability error tolerated before renormalizing.
    static constexpr double kNormTolerance = 1e-9;
    // Energies closer than this (relative to the spectrum width) are merged.
    static constexpr double kMergeTolerance = 1e-12;

    // Sorts, merges near-equal energies, drops zero weights, shifts the ground
    // to zero and renormalizes. Throws DomainError if the probabilities do not
    // sum to 1 within kNormTolerance, or on negative/non-finite entries.
    static SpectralState from_levels(std::vector<Level> levels);

    // Same, but rescales any positive total instead of rejecting it.
    static SpectralState normalized(std::vector<Level> levels);

    const std::vector<Level>& levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    const Level& operator[](std::size_t i) const { return levels_[i]; }
    double max_energy() const { return levels_.back().energy; }

    bool operator==(const SpectralState&) const = default;

private:
    explicit SpectralState(std::vector<Level> levels) : levels_(std::move(levels)) {}
    static SpectralState build(std::vector<Level> levels, bool strict_norm);

    std::vector<Level> levels_;
};

struct BasisLabel {
    double energy = 0.0;
    int degeneracy = 0;

    bool operator==(const BasisLabel&) const = default;
};

// Complex amplitudes over labeled (energy, degeneracy index) eigenvectors.
// Energies are kept as given; no ground shift is applied here.
class AmplitudeState {
public:
    struct Component {
        BasisLabel label;
        complex amplitude;
    };

    // Throws DomainError on duplicate labels, negative energy, negative
    // degeneracy index, or norm differing from 1 by more than 1e-9 (the
    // amplitudes are rescaled to unit norm otherwise).
    static AmplitudeState from_components(std::vector<Component> components);

    const std::vector<Component>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }

    // Amplitude of a basis vector, zero if it is absent.
    complex amplitude_of(const BasisLabel& label) const;

private:
    explicit AmplitudeState(std::vector<Component> c) : components_(std::move(c)) {}
    std::vector<Component> components_;
};

struct Moments {
    double mean_energy = 0.0;
    double energy_spread = 0.0;
    std::optional<double> alpha;  // empty when the mean energy is zero
    double max_energy = 0.0;
};

// Per-energy total probability; ground shifted to zero.
SpectralState collapse_to_spectral(const AmplitudeState& s);

// Embeds a spectral state with real non-negative amplitudes, degeneracy 0.
AmplitudeState embed_spectral(const SpectralState& s);

Moments moments(const SpectralState& s);

}  // namespace qsl
