#include "qsl/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>

#include "qsl/bounds.hpp"
#include "qsl/families.hpp"
#include "qsl/survival.hpp"

namespace qsl {

using Eigen::VectorXd;

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kAlphaRelTol = 1e-6;
constexpr double kBoundSlack = 1e-6;
// Every level keeps at least this weight. The infimum for alpha != 1 sits on
// the simplex boundary; letting a weight underflow would drop the level and
// move the ground.
constexpr double kProbFloor = 1e-6;

VectorXd softmax(const VectorXd& z) {
    const double m = z.maxCoeff();
    VectorXd e = (z.array() - m).exp();
    return e / e.sum();
}

// Gradient with respect to the logits given the gradient w.r.t. softmax(z).
VectorXd softmax_pullback(const VectorXd& p, const VectorXd& g) {
    const double avg = p.dot(g);
    return p.array() * (g.array() - avg);
}

struct Objective {
    double f;
    VectorXd g;
};

struct BfgsOutcome {
    VectorXd x;
    int iterations = 0;
    bool converged = false;
};

// Dense BFGS with Armijo backtracking. Skips updates that would break
// positive definiteness.
template <class F>
BfgsOutcome bfgs(F&& fg, VectorXd x, int max_iter, double gtol) {
    const auto n = x.size();
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    Objective cur = fg(x);
    BfgsOutcome out;
    for (int it = 0; it < max_iter; ++it) {
        if (!std::isfinite(cur.f)) break;
        if (cur.g.lpNorm<Eigen::Infinity>() < gtol) {
            out.converged = true;
            break;
        }
        VectorXd dir = -hinv * cur.g;
        double slope = cur.g.dot(dir);
        if (!(slope < 0.0)) {
            hinv.setIdentity();
            dir = -cur.g;
            slope = -cur.g.squaredNorm();
        }
        // Keep individual steps bounded in logit space.
        const double dmax = dir.lpNorm<Eigen::Infinity>();
        double step = dmax > 5.0 ? 5.0 / dmax : 1.0;
        Objective next{};
        VectorXd xn;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x + step * dir;
            next = fg(xn);
            if (std::isfinite(next.f) && next.f <= cur.f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++out.iterations;
        if (!accepted) break;
        const VectorXd s = xn - x;
        const VectorXd y = next.g - cur.g;
        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
                   rho * s * s.transpose();
        }
        x = xn;
        cur = std::move(next);
    }
    out.x = std::move(x);
    return out;
}

struct Constraints {
    Eigen::Vector3d c;
    Eigen::Matrix<double, 3, Eigen::Dynamic> jac;
};

Constraints constraints_of(const TauObjective::Terms& t) {
    Constraints k;
    k.c << t.re, t.im, t.alpha_gap;
    k.jac.resize(3, t.d_re.size());
    k.jac.row(0) = t.d_re.transpose();
    k.jac.row(1) = t.d_im.transpose();
    k.jac.row(2) = t.d_alpha_gap.transpose();
    return k;
}

// Minimum-norm Newton steps onto {re = im = alpha_gap = 0}.
VectorXd project(const TauObjective& obj, VectorXd theta) {
    double best = constraints_of(obj.evaluate(theta)).c.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 30 && best > 1e-15; ++it) {
        const Constraints k = constraints_of(obj.evaluate(theta));
        const VectorXd delta = k.jac.completeOrthogonalDecomposition().solve(-k.c);
        double step = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 20; ++ls) {
            const VectorXd trial = theta + step * delta;
            const double v = constraints_of(obj.evaluate(trial)).c.lpNorm<Eigen::Infinity>();
            if (std::isfinite(v) && v < best) {
                theta = trial;
                best = v;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return theta;
}

struct RestartOutcome {
    std::optional<SpectralState> state;
    bool feasible = false;
    double tau = 0.0;
    double alpha = 0.0;
    double ratio = std::numeric_limits<double>::infinity();
    double violation = std::numeric_limits<double>::infinity();
    std::vector<TracePoint> trace;
};

RestartOutcome assess(const TauObjective& obj, const OptProblem& p, const VectorXd& theta) {
    RestartOutcome out;
    const auto dec = obj.decode(theta);
    std::vector<Level> levels;
    for (std::size_t i = 0; i < dec.energy.size(); ++i) {
        levels.push_back({dec.energy[i], dec.probability[i]});
    }
    SpectralState state = SpectralState::normalized(std::move(levels));
    out.violation = constraints_of(obj.evaluate(theta)).c.lpNorm<Eigen::Infinity>();

    const Moments m = moments(state);
    out.alpha = m.alpha.value_or(0.0);
    const double overlap = std::abs(survival_amplitude(state, 1.0));
    const bool alpha_ok =
        m.alpha && std::abs(*m.alpha - p.alpha_target) <= kAlphaRelTol * p.alpha_target;
    if (state.size() >= 2 && overlap <= p.tolerance && alpha_ok) {
        ZeroFinderConfig cfg;
        cfg.tolerance = p.tolerance;
        cfg.horizon = 1.0 + 1e-6;
        const OrthoResult r = first_orthogonal_time(state, cfg);
        if (r.found()) {
            out.feasible = true;
            out.tau = r.tau;
            out.ratio = r.tau / bound_report(m).tau_unified;
        }
    }
    out.state = std::move(state);
    return out;
}

RestartOutcome augmented_lagrangian(const TauObjective& obj, const OptProblem& p,
                                    const VectorXd& theta0) {
    std::vector<TracePoint> trace;
    VectorXd theta = theta0;
    Eigen::Vector3d lambda = Eigen::Vector3d::Zero();
    // a feasible start (family seed) should not be thrown far off by a weak
    // initial penalty
    const double v0 = constraints_of(obj.evaluate(theta0)).c.lpNorm<Eigen::Infinity>();
    double mu = v0 < 1e-6 ? 1e4 : 10.0;
    double prev_violation = std::numeric_limits<double>::infinity();
    int used = 0;

    auto lagrangian = [&](const VectorXd& x) {
        const auto t = obj.evaluate(x);
        const Constraints k = constraints_of(t);
        Objective o;
        o.f = t.mean + lambda.dot(k.c) + 0.5 * mu * k.c.squaredNorm();
        o.g = t.d_mean + k.jac.transpose() * (lambda + mu * k.c);
        return o;
    };

    for (int round = 0; round < 60 && used < p.max_iters; ++round) {
        const int budget = std::min(400, p.max_iters - used);
        BfgsOutcome inner = bfgs(lagrangian, theta, budget, 1e-10);
        used += inner.iterations;
        if (inner.x.allFinite()) theta = inner.x;

        const auto t = obj.evaluate(theta);
        const Constraints k = constraints_of(t);
        const double violation = k.c.lpNorm<Eigen::Infinity>();
        trace.push_back({used, t.mean});
        if (violation < 1e-12 && inner.converged) break;
        lambda += mu * k.c;
        if (violation > 0.25 * prev_violation) mu = std::min(mu * 10.0, 1e10);
        prev_violation = violation;
    }

    trace.push_back({used, obj.evaluate(theta).mean});
    RestartOutcome end = assess(obj, p, project(obj, theta));
    end.trace = std::move(trace);
    // the start may already be feasible (family seeds) and better than where
    // the penalty path ended
    RestartOutcome begin = assess(obj, p, project(obj, theta0));
    if (begin.feasible && (!end.feasible || begin.ratio < end.ratio)) {
        begin.trace = std::move(end.trace);
        return begin;
    }
    return end;
}

// Adds near-zero levels so that a seed state has the requested level count.
std::optional<SpectralState> pad_levels(const SpectralState& s, int n, double cap) {
    if (static_cast<int>(s.size()) > n) return std::nullopt;
    std::vector<Level> levels = s.levels();
    while (static_cast<int>(levels.size()) < n) {
        // Split the widest gap (including the one up to the cap).
        double widest = cap - levels.back().energy;
        double at = 0.5 * (levels.back().energy + cap);
        for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
            const double gap = levels[i + 1].energy - levels[i].energy;
            if (gap > widest) {
                widest = gap;
                at = levels[i].energy + 0.5 * gap;
            }
        }
        levels.push_back({at, 1e-9});
        std::sort(levels.begin(), levels.end(),
                  [](const Level& a, const Level& b) { return a.energy < b.energy; });
    }
    return SpectralState::normalized(std::move(levels));
}

// Matched analytic construction at working time tau = 1, if one exists.
std::optional<SpectralState> family_seed(const OptProblem& p) {
    const double a = p.alpha_target;
    try {
        if (const auto* grid = std::get_if<FixedGrid>(&p.energy_mode)) {
            const auto& g = grid->energies;
            if (a == 1.0 && g.size() == 2) {
                return SpectralState::normalized({{0.0, 0.5}, {0.5, 0.5}});
            }
            if (a > 1.0 && g.size() == 3 && g[1] > 0.0) {
                const double odd = g[2] / g[1];
                const double k = std::round((odd - 1.0) / 2.0);
                if (k >= 1.0 && std::abs(odd - (2.0 * k + 1.0)) < 1e-12) {
                    return family_b({a, static_cast<int>(k), 0.5}).state;
                }
            }
            return std::nullopt;
        }
        if (a == 1.0) return SpectralState::normalized({{0.0, 0.5}, {0.5, 0.5}});
        if (p.num_levels < 3) return std::nullopt;
        if (a < 1.0) return family_a_refine({a, 0.001}).state;
        // first-order excess (a^2 - 1) / (4k) of about 5%
        int k = std::max(5, static_cast<int>(std::ceil(5.0 * (a * a - 1.0))));
        while (family_b_alpha(family_b_beta_peak(k), k) < a) ++k;
        return family_b({a, k, 0.5}).state;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

bool better(const RestartOutcome& a, const RestartOutcome& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible) return a.ratio < b.ratio;
    return a.violation < b.violation;
}

}  // namespace

void OptProblem::validate() const {
    if (!(alpha_target > 0.0) || !std::isfinite(alpha_target)) {
        throw DomainError("optimizer: alpha must be positive");
    }
    if (num_levels < 2 || num_levels > 16) {
        throw DomainError("optimizer: level count must be in [2, 16]");
    }
    if (restarts < 1) throw DomainError("optimizer: restarts must be >= 1");
    if (max_iters < 1) throw DomainError("optimizer: max_iters must be >= 1");
    if (!(tolerance > 0.0)) throw DomainError("optimizer: tolerance must be positive");
    if (const auto* grid = std::get_if<FixedGrid>(&energy_mode)) {
        const auto& g = grid->energies;
        if (static_cast<int>(g.size()) != num_levels) {
            throw DomainError("optimizer: grid size must equal the level count");
        }
        if (g.front() != 0.0) throw DomainError("optimizer: grid must start at 0");
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (!(g[i] > g[i - 1])) throw DomainError("optimizer: grid must be increasing");
        }
    } else {
        const auto& free = std::get<FreeEnergies>(energy_mode);
        if (free.cap && !(*free.cap > 0.0)) throw DomainError("optimizer: cap must be positive");
    }
}

TauObjective::TauObjective(const OptProblem& p, double cap)
    : alpha_(p.alpha_target), levels_(p.num_levels), cap_(cap) {
    if (const auto* grid = std::get_if<FixedGrid>(&p.energy_mode)) grid_ = grid->energies;
}

int TauObjective::dim() const { return fixed_grid() ? levels_ + 1 : 2 * levels_; }

TauObjective::Decoded TauObjective::decode(const VectorXd& theta) const {
    Decoded d;
    const VectorXd p = kProbFloor + (1.0 - levels_ * kProbFloor) * softmax(theta.head(levels_)).array();
    d.probability.assign(p.data(), p.data() + p.size());
    d.energy.resize(levels_);
    if (fixed_grid()) {
        const double scale = std::exp(theta[levels_]);
        for (int j = 0; j < levels_; ++j) d.energy[j] = scale * grid_[j];
    } else {
        const VectorXd q = softmax(theta.tail(levels_));
        double acc = 0.0;
        d.energy[0] = 0.0;
        for (int j = 1; j < levels_; ++j) {
            acc += q[j - 1];
            d.energy[j] = cap_ * acc;
        }
    }
    return d;
}

TauObjective::Terms TauObjective::evaluate(const VectorXd& theta) const {
    const Decoded d = decode(theta);
    const int n = levels_;
    Terms t;
    double second = 0.0;
    for (int j = 0; j < n; ++j) {
        const double pj = d.probability[j];
        const double ej = d.energy[j];
        t.mean += pj * ej;
        second += pj * ej * ej;
        t.re += pj * std::cos(kTwoPi * ej);
        t.im -= pj * std::sin(kTwoPi * ej);
    }
    const double c = 1.0 + alpha_ * alpha_;
    t.alpha_gap = second - c * t.mean * t.mean;

    // Gradients with respect to probabilities (gp) and energies (ge).
    VectorXd gp_mean(n), ge_mean(n), gp_re(n), ge_re(n), gp_im(n), ge_im(n), gp_gap(n), ge_gap(n);
    for (int j = 0; j < n; ++j) {
        const double pj = d.probability[j];
        const double ej = d.energy[j];
        const double cs = std::cos(kTwoPi * ej);
        const double sn = std::sin(kTwoPi * ej);
        gp_mean[j] = ej;
        ge_mean[j] = pj;
        gp_re[j] = cs;
        ge_re[j] = -kTwoPi * pj * sn;
        gp_im[j] = -sn;
        ge_im[j] = -kTwoPi * pj * cs;
        gp_gap[j] = ej * ej - 2.0 * c * t.mean * ej;
        ge_gap[j] = 2.0 * pj * ej - 2.0 * c * t.mean * pj;
    }

    const VectorXd sm = softmax(theta.head(n));
    const VectorXd e = Eigen::Map<const VectorXd>(d.energy.data(), n);
    VectorXd q;
    if (!fixed_grid()) q = softmax(theta.tail(n));

    auto pull = [&](const VectorXd& gp, const VectorXd& ge) {
        VectorXd g(dim());
        g.head(n) = (1.0 - n * kProbFloor) * softmax_pullback(sm, gp);
        if (fixed_grid()) {
            g[n] = ge.dot(e);
        } else {
            // E_j = cap * sum_{i<j} q_i, so dE_j/dq_i = cap for i < j.
            VectorXd gq = VectorXd::Zero(n);
            double suffix = 0.0;
            for (int i = n - 2; i >= 0; --i) {
                suffix += ge[i + 1];
                gq[i] = cap_ * suffix;
            }
            g.tail(n) = softmax_pullback(q, gq);
        }
        return g;
    };
    t.d_mean = pull(gp_mean, ge_mean);
    t.d_re = pull(gp_re, ge_re);
    t.d_im = pull(gp_im, ge_im);
    t.d_alpha_gap = pull(gp_gap, ge_gap);
    return t;
}

VectorXd TauObjective::encode(const SpectralState& s) const {
    if (static_cast<int>(s.size()) != levels_) {
        throw DomainError("encode: level count mismatch");
    }
    VectorXd theta(dim());
    for (int j = 0; j < levels_; ++j) {
        const double w = (s[j].probability - kProbFloor) / (1.0 - levels_ * kProbFloor);
        theta[j] = std::log(std::max(w, 1e-12));
    }
    if (fixed_grid()) {
        theta[levels_] = std::log(s.max_energy() / grid_.back());
        return theta;
    }
    if (!(s.max_energy() < cap_)) throw DomainError("encode: state exceeds the energy cap");
    for (int j = 0; j + 1 < levels_; ++j) {
        theta[levels_ + j] = std::log((s[j + 1].energy - s[j].energy) / cap_);
    }
    theta[2 * levels_ - 1] = std::log(1.0 - s.max_energy() / cap_);
    return theta;
}

OptResult minimize_tau(const OptProblem& p) {
    p.validate();

    std::optional<SpectralState> seed = family_seed(p);
    double cap = 1.0;
    if (const auto* free = std::get_if<FreeEnergies>(&p.energy_mode)) {
        if (free->cap) {
            cap = *free->cap;
        } else if (seed) {
            cap = std::max(1.0, 1.05 * seed->max_energy());
        }
        if (seed) seed = pad_levels(*seed, p.num_levels, cap);
        if (seed && !(seed->max_energy() < cap)) seed.reset();
    }
    const TauObjective obj(p, cap);

    std::vector<std::future<RestartOutcome>> jobs;
    jobs.reserve(p.restarts);
    for (int r = 0; r < p.restarts; ++r) {
        VectorXd start(obj.dim());
        if (r == 0 && seed && static_cast<int>(seed->size()) == p.num_levels) {
            start = obj.encode(*seed);
        } else {
            std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                              static_cast<std::uint32_t>(r)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int j = 0; j < obj.dim(); ++j) start[j] = normal(rng);
            if (obj.fixed_grid()) {
                const auto& g = std::get<FixedGrid>(p.energy_mode).energies;
                std::uniform_real_distribution<double> top(0.3, 2.0);
                start[p.num_levels] = std::log(top(rng) / g.back());
            }
        }
        jobs.push_back(std::async(std::launch::async, [&obj, &p, start] {
            return augmented_lagrangian(obj, p, start);
        }));
    }

    std::optional<RestartOutcome> best;
    for (auto& job : jobs) {
        RestartOutcome o = job.get();
        if (!best || better(o, *best)) best = std::move(o);
    }

    OptResult result{*best->state, 0.0, 0.0, 0.0, false, {}};
    result.achieved_alpha = best->alpha;
    result.converged = best->feasible;
    result.trace = std::move(best->trace);
    if (best->feasible) {
        result.achieved_tau = best->tau;
        result.bound_ratio = best->ratio;
    }
    return result;
}

std::vector<OptResult> bound_violation_scan(const std::vector<double>& alphas,
                                            const OptProblem& base) {
    std::vector<OptResult> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        OptProblem p = base;
        p.alpha_target = a;
        OptResult r = minimize_tau(p);
        if (r.converged && r.bound_ratio < 1.0 - kBoundSlack) {
            throw std::logic_error("unified bound violated at alpha = " + std::to_string(a) +
                                   " (ratio " + std::to_string(r.bound_ratio) + ")");
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace qsl
