// sampling.hpp
// Random state generators for property checks.

#pragma once

#include <random>

#include "qsl/state.hpp"

namespace qsl {

using Rng = std::mt19937_64;

// 2..max_levels levels with energies uniform in (0, e_top) and
// Dirichlet(1) probabilities.
SpectralState random_state(Rng& rng, int max_levels = 6, double e_top = 3.0);

// State with S(tau) = 0 up to rounding, energies in [0, h / tau): a convex
// mixture of 1..3 three-point configurations {0, a, b} that surround the
// origin of the complex plane at time tau.
SpectralState random_orthogonal_state(Rng& rng, double tau, const Units& u = {});

// Adds a random multiple (0..max_shift) of h / tau to every excited level.
// S(tau) is unchanged.
SpectralState lift_energies(Rng& rng, const SpectralState& s, double tau, int max_shift,
                            const Units& u = {});

}  // namespace qsl
