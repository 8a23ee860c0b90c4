#include "qsl/sampling.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace qsl {

SpectralState random_state(Rng& rng, int max_levels, double e_top) {
    std::uniform_int_distribution<int> count(2, std::max(2, max_levels));
    std::uniform_real_distribution<double> energy(0.0, e_top);
    std::exponential_distribution<double> gamma1(1.0);
    const int n = count(rng);
    std::vector<Level> levels;
    levels.push_back({0.0, gamma1(rng)});
    for (int i = 1; i < n; ++i) levels.push_back({energy(rng), gamma1(rng)});
    return SpectralState::normalized(std::move(levels));
}

SpectralState random_orthogonal_state(Rng& rng, double tau, const Units& u) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double period = u.h / tau;
    const int m = count(rng);

    std::vector<Level> levels;
    for (int i = 0; i < m; ++i) {
        // Gaps 0 -> a -> b -> 2 pi all below pi, so the origin is interior.
        const double a = kPi * (0.05 + 0.9 * unit(rng));
        const double b = kPi + a * (0.05 + 0.9 * unit(rng));
        Eigen::Matrix3d lhs;
        lhs << 1.0, std::cos(a), std::cos(b),
               0.0, std::sin(a), std::sin(b),
               1.0, 1.0, 1.0;
        const Eigen::Vector3d w = lhs.fullPivLu().solve(Eigen::Vector3d(0.0, 0.0, 1.0));
        const double share = 0.2 + unit(rng);
        levels.push_back({0.0, share * w[0]});
        levels.push_back({a / (2.0 * kPi) * period, share * w[1]});
        levels.push_back({b / (2.0 * kPi) * period, share * w[2]});
    }
    return SpectralState::normalized(std::move(levels));
}

SpectralState lift_energies(Rng& rng, const SpectralState& s, double tau, int max_shift,
                            const Units& u) {
    std::uniform_int_distribution<int> shift(0, max_shift);
    const double period = u.h / tau;
    std::vector<Level> levels = s.levels();
    for (std::size_t i = 1; i < levels.size(); ++i) {
        levels[i].energy += shift(rng) * period;
    }
    return SpectralState::normalized(std::move(levels));
}

}  // namespace qsl
