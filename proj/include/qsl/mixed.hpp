// mixed.hpp
// Ensembles of mutually orthogonal pure states and their trace overlap
// Tr[rho(0) rho(t)].

#pragma once

#include <vector>

#include "qsl/bounds.hpp"
#include "qsl/state.hpp"

namespace qsl {

class MixedEnsemble {
public:
    struct Member {
        double weight;
        AmplitudeState state;
    };

    static constexpr double kOrthogonalityTolerance = 1e-10;

    // Weights must be positive and sum to 1 within 1e-9 (then rescaled);
    // members must be pairwise orthogonal at t = 0.
    static MixedEnsemble from_members(std::vector<Member> members);

    const std::vector<Member>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

private:
    explicit MixedEnsemble(std::vector<Member> m) : members_(std::move(m)) {}
    std::vector<Member> members_;
};

// <a(0)|b(t)> with each amplitude evolved by exp(-2 pi i E t / h).
complex evolved_overlap(const AmplitudeState& a, const AmplitudeState& b, double t,
                        const Units& u = {});

double trace_overlap(const MixedEnsemble& e, double t, const Units& u = {});

// Weighted mean energy and spread from the total second moment; energies as
// stored in the members (ground assumed at zero).
Moments ensemble_moments(const MixedEnsemble& e);

// Members (|0> + |e1>)/sqrt2 and (|0> - |e1>)/sqrt2 with weights lambda1, 1 - lambda1.
MixedEnsemble rank2_counterexample(double e1, double lambda1);

// Trace overlap at the unified-bound time of the ensemble moments.
double mixed_nonattainability_check(const MixedEnsemble& e, const BoundReport& report,
                                    const Units& u = {});

}  // namespace qsl
