// optimizer.hpp
// Numerical search for states that reach orthogonality fastest at a fixed
// ratio alpha = dE / E.
//
// The time is pinned at tau = 1 (h = 1) and the mean energy is minimized over
// the probability simplex (and the energies), subject to S(1) = 0 and
// dE^2 = alpha^2 E^2. Probabilities are a softmax of free logits; free
// energies are cumulative softmax increments below a cap; a fixed grid is
// scaled by exp(sigma). Constraints are handled by an augmented Lagrangian
// around BFGS, followed by a minimum-norm Newton projection onto the
// constraint surface.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qsl/state.hpp"

namespace qsl {

struct FixedGrid {
    std::vector<double> energies;  // ascending, first entry 0; scaled freely
};

struct FreeEnergies {
    // Upper bound on energies in units of h / tau. Unset: max(1, 1.05 x the
    // e_max of the matched family seed).
    std::optional<double> cap;
};

using EnergyMode = std::variant<FreeEnergies, FixedGrid>;

struct OptProblem {
    double alpha_target = 1.0;
    int num_levels = 3;
    EnergyMode energy_mode = FreeEnergies{};
    std::uint64_t seed = 1;
    int restarts = 16;
    int max_iters = 2000;  // BFGS iterations per restart
    double tolerance = 1e-8;  // on |S(tau)|

    void validate() const;
};

struct TracePoint {
    int iteration;
    double objective;
};

struct OptResult {
    SpectralState best_state;
    double achieved_tau = 0.0;
    double achieved_alpha = 0.0;
    double bound_ratio = 0.0;
    bool converged = false;
    std::vector<TracePoint> trace;
};

// Objective and constraints as smooth functions of the unconstrained
// decision vector, with analytic gradients.
class TauObjective {
public:
    explicit TauObjective(const OptProblem& p, double cap = 1.0);

    struct Decoded {
        std::vector<double> probability;
        std::vector<double> energy;
    };

    struct Terms {
        double mean = 0.0;       // E
        double re = 0.0;         // Re S(1)
        double im = 0.0;         // Im S(1)
        double alpha_gap = 0.0;  // dE^2 - alpha^2 E^2
        Eigen::VectorXd d_mean, d_re, d_im, d_alpha_gap;
    };

    int dim() const;
    bool fixed_grid() const { return !grid_.empty(); }
    double cap() const { return cap_; }

    Decoded decode(const Eigen::VectorXd& theta) const;
    Terms evaluate(const Eigen::VectorXd& theta) const;

    // Inverse of decode for a state with exactly num_levels levels (free
    // mode: e_max < cap; fixed grid: energies proportional to the grid).
    Eigen::VectorXd encode(const SpectralState& s) const;

private:
    double alpha_;
    int levels_;
    double cap_;
    std::vector<double> grid_;
};

OptResult minimize_tau(const OptProblem& p);

// One minimize_tau per alpha. Throws std::logic_error if a feasible result
// falls below the unified bound by more than 1e-6.
std::vector<OptResult> bound_violation_scan(const std::vector<double>& alphas,
                                            const OptProblem& base);

}  // namespace qsl
