#include "qsl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "qsl/bounds.hpp"
#include "qsl/families.hpp"
#include "qsl/mixed.hpp"
#include "qsl/optimizer.hpp"
#include "qsl/sampling.hpp"
#include "qsl/survival.hpp"

namespace qsl {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

class Suite {
public:
    Suite(std::string name, std::vector<CheckResult>& out) : name_(std::move(name)), out_(out) {}

    void check(std::string name, bool ok, std::string detail) {
        out_.push_back({name_, std::move(name), ok, std::move(detail)});
    }

private:
    std::string name_;
    std::vector<CheckResult>& out_;
};

double distance_to(double x, std::initializer_list<double> points) {
    double d = INFINITY;
    for (double p : points) d = std::min(d, std::abs(x - p));
    return d;
}

// Samples with margin below this count as equality points.
constexpr double kEqualityMargin = 1e-14;

void trig_suite(std::vector<CheckResult>& out, std::size_t n, Rng& rng) {
    Suite s("trig", out);
    const std::vector<double> probes{0.0, kPi, -kPi, kPi + 1e-7, -kPi - 1e-7, 1e-7, -1e-7};

    std::uniform_real_distribution<double> da(-20.0, 20.0);
    double worst = INFINITY;
    double far = 0.0;
    std::size_t hits = 0;
    auto visit_a = [&](double x) {
        const double m = trig_margin_a(x);
        worst = std::min(worst, m);
        if (m <= kEqualityMargin) {
            ++hits;
            far = std::max(far, distance_to(x, {0.0, kPi, -kPi}));
        }
    };
    for (double x : probes) visit_a(x);
    for (std::size_t i = 0; i < n; ++i) visit_a(da(rng));
    s.check("cos x >= 1 - (4/pi^2) x sin x - (2/pi^2) x^2", worst >= -1e-12,
            fmt("min margin %.3e", worst));
    s.check("equality only at 0, +-pi", hits >= 3 && far <= 1e-6,
            fmt("%.0f equality samples, farthest %.3e", static_cast<double>(hits), far));

    std::uniform_real_distribution<double> db(0.0, 40.0);
    worst = INFINITY;
    far = 0.0;
    hits = 0;
    auto visit_b = [&](double x) {
        const double m = trig_margin_b(x);
        worst = std::min(worst, m);
        if (m <= kEqualityMargin) {
            ++hits;
            far = std::max(far, distance_to(x, {0.0, kPi}));
        }
    };
    for (double x : {0.0, kPi, kPi + 1e-7, kPi - 1e-7}) visit_b(x);
    for (std::size_t i = 0; i < n; ++i) visit_b(db(rng));
    s.check("cos x >= 1 - (2/pi)(x + sin x) for x >= 0", worst >= -1e-12,
            fmt("min margin %.3e", worst));
    s.check("equality only at 0, pi", hits >= 2 && far <= 1e-6,
            fmt("%.0f equality samples, farthest %.3e", static_cast<double>(hits), far));
}

void state_suite(std::vector<CheckResult>& out, std::size_t n, Rng& rng) {
    Suite s("state", out);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> shift(0.0, 10.0);
    bool roundtrip = true, phases = true, order = true, shifts = true;
    for (std::size_t i = 0; i < n; ++i) {
        const SpectralState st = random_state(rng);
        const SpectralState rt = collapse_to_spectral(embed_spectral(st));
        roundtrip = roundtrip && rt.size() == st.size();
        for (std::size_t j = 0; roundtrip && j < st.size(); ++j) {
            roundtrip = rt[j].energy == st[j].energy &&
                        std::abs(rt[j].probability - st[j].probability) <= 4e-16;
        }

        std::vector<AmplitudeState::Component> comps;
        for (const auto& l : st.levels()) {
            comps.push_back({{l.energy, 0}, std::polar(std::sqrt(l.probability), phase(rng))});
        }
        const Moments a = moments(st);
        const Moments b = moments(collapse_to_spectral(AmplitudeState::from_components(comps)));
        phases = phases && std::abs(a.mean_energy - b.mean_energy) <= 1e-12 &&
                 std::abs(a.energy_spread - b.energy_spread) <= 1e-12;
        order = order && a.energy_spread >= 0.0 && a.max_energy >= a.mean_energy;

        const double c = shift(rng);
        std::vector<Level> moved = st.levels();
        for (auto& l : moved) l.energy += c;
        const SpectralState back = SpectralState::from_levels(moved);
        for (std::size_t j = 0; j < st.size(); ++j) {
            shifts = shifts && std::abs(back[j].energy - st[j].energy) <= 1e-12 * (1.0 + c) &&
                     std::abs(back[j].probability - st[j].probability) <= 1e-15;
        }
    }
    s.check("spectral -> amplitude -> spectral round trip", roundtrip, "");
    s.check("moments invariant under amplitude phases", phases, "");
    s.check("dE >= 0 and e_max >= E", order, "");
    s.check("uniform energy shift removed by ground convention", shifts, "");
}

void survival_suite(std::vector<CheckResult>& out, std::size_t n, Rng& rng) {
    Suite s("survival", out);
    std::uniform_real_distribution<double> time(0.0, 2.0);
    double max_abs = 0.0, fd_err = 0.0, s0_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const SpectralState st = random_state(rng);
        const double t = time(rng);
        max_abs = std::max(max_abs, std::abs(survival_amplitude(st, t)));
        s0_err = std::max(s0_err, std::abs(survival_amplitude(st, 0.0) - complex(1.0, 0.0)));
        const double h = 1e-6;
        const double fd = (std::norm(survival_amplitude(st, t + h)) -
                           std::norm(survival_amplitude(st, t - h))) / (2.0 * h);
        fd_err = std::max(fd_err, std::abs(fd - survival_prob_derivative(st, t)));
    }
    s.check("|S(t)| <= 1", max_abs <= 1.0 + 1e-12, fmt("max %.15f", max_abs));
    s.check("S(0) = 1", s0_err <= 1e-15, fmt("err %.3e", s0_err));
    s.check("d|S|^2/dt matches central differences", fd_err <= 1e-6, fmt("max err %.3e", fd_err));

    // Integer spectra (period h): triangles of angles k pi/4 around the origin
    // make S vanish at t = 1/8; the reported zero must lie in the first period.
    bool periodic = true;
    std::uniform_int_distribution<int> lo(2, 3);
    for (std::size_t i = 0; i < std::max<std::size_t>(n / 10, 5); ++i) {
        const int a = lo(rng);
        std::uniform_int_distribution<int> hi(5, a + 3);
        const int b = hi(rng);
        const double ta = kPi * a / 4.0, tb = kPi * b / 4.0;
        // Barycentric weights of the origin in the triangle {1, e^{i ta}, e^{i tb}}.
        const double w0 = std::sin(tb - ta), w1 = -std::sin(tb), w2 = std::sin(ta);
        const SpectralState st =
            SpectralState::normalized({{0.0, w0}, {double(a), w1}, {double(b), w2}});
        const OrthoResult r = first_orthogonal_time(st);
        periodic = periodic && r.found() && r.tau <= 0.125 + 1e-12 &&
                   std::abs(survival_amplitude(st, r.tau + 1.0) - survival_amplitude(st, r.tau)) <= 1e-9;
    }
    s.check("integer spectra: zero found within the first period", periodic, "");
}

void bounds_suite(std::vector<CheckResult>& out, std::size_t n, Rng& rng) {
    Suite s("bounds", out);
    std::uniform_real_distribution<double> tau_dist(0.3, 2.0);
    std::uniform_real_distribution<double> time(0.0, 10.0);
    double worst_mt = INFINITY, worst_ml = INFINITY, worst_emax = INFINITY;
    bool rigid = true;
    std::size_t found = 0;
    double fold_err = 0.0, reflect_err = 0.0;
    bool fold_energy = true;

    for (std::size_t i = 0; i < n; ++i) {
        const double tau = tau_dist(rng);
        const SpectralState st = i % 2 == 0 ? random_orthogonal_state(rng, tau)
                                            : random_state(rng);
        const Moments m = moments(st);
        const OrthoResult r = first_orthogonal_time(st);
        if (r.found()) {
            ++found;
            worst_mt = std::min(worst_mt, r.tau * 4.0 * m.energy_spread);
            worst_ml = std::min(worst_ml, r.tau * 4.0 * m.mean_energy);
            const double emax_ratio = r.tau * 2.0 * m.max_energy;
            worst_emax = std::min(worst_emax, emax_ratio);
            if (emax_ratio <= 1.0 + 1e-6) rigid = rigid && is_equal_two_level(st);
        }

        const SpectralState lifted = lift_energies(rng, st, tau, 3);
        const SpectralState folded = fold_spectrum(lifted, tau);
        fold_err = std::max(fold_err, std::abs(survival_amplitude(folded, tau) -
                                               survival_amplitude(lifted, tau)));
        fold_energy = fold_energy &&
                      moments(folded).mean_energy <= moments(lifted).mean_energy + 1e-12;

        const SpectralState refl = reflect_spectrum(st);
        for (int j = 0; j < 10; ++j) {
            const double t = time(rng);
            reflect_err = std::max(reflect_err, std::abs(std::abs(survival_amplitude(refl, t)) -
                                                         std::abs(survival_amplitude(st, t))));
        }
    }
    s.check("tau >= h/(4 dE)", worst_mt >= 1.0 - 1e-9,
            fmt("min tau*4dE/h %.12f over %.0f zeros", worst_mt, static_cast<double>(found)));
    s.check("tau >= h/(4 E)", worst_ml >= 1.0 - 1e-9, fmt("min tau*4E/h %.12f", worst_ml));
    s.check("tau >= h/(2 e_max)", worst_emax >= 1.0 - 1e-9, fmt("min tau*2e_max/h %.12f", worst_emax));
    s.check("h/(2 e_max) attained only by the equal two-level state", rigid, "");
    s.check("fold preserves S(tau)", fold_err < 1e-12, fmt("max err %.3e", fold_err));
    s.check("fold never raises the mean energy", fold_energy, "");
    s.check("reflection preserves |S(t)|", reflect_err < 1e-12, fmt("max err %.3e", reflect_err));

    const SpectralState two = SpectralState::from_levels({{0.0, 0.5}, {1.0, 0.5}});
    const OrthoResult r = first_orthogonal_time(two);
    s.check("equal two-level state attains every bound",
            r.found() && std::abs(r.tau - 0.5) < 1e-12 && std::abs(r.tau * 2.0 - 1.0) < 1e-9,
            fmt("tau %.15f", r.tau));
}

void families_suite(std::vector<CheckResult>& out, std::size_t, Rng&) {
    Suite s("families", out);
    double worst_s = 0.0, xmean_err = 0.0;
    bool ratio_gt1 = true;
    for (double alpha : {1.5, 2.0, 3.0}) {
        double prev = INFINITY;
        bool mono = true;
        for (int k : {10, 20, 40, 80}) {
            const FamilyState fs = family_b({alpha, k, 1.0});
            worst_s = std::max(worst_s, std::abs(survival_amplitude(fs.state, 0.5)));
            ratio_gt1 = ratio_gt1 && fs.bound_ratio > 1.0;
            mono = mono && fs.bound_ratio < prev;
            prev = fs.bound_ratio;
            const double p1 = fs.state[1].probability;
            const double pk = fs.state[2].probability;
            const double beta = 2.0 * k * k * pk;
            xmean_err = std::max(xmean_err, std::abs(p1 * kPi + pk * kPi * (2 * k + 1) -
                                                     0.5 * kPi * (1.0 + 2.0 * beta / k)));
        }
        s.check(fmt("family B ratio decreasing in k (alpha=%g)", alpha), mono, "");
    }
    s.check("family B exactly orthogonal at h/(2 E1)", worst_s < 1e-12, fmt("max |S| %.3e", worst_s));
    s.check("family B mean angle matches (pi/2)(1 + 2 beta/k)", xmean_err < 1e-12,
            fmt("max err %.3e", xmean_err));

    double worst_res = 0.0, worst_alpha = 0.0;
    for (double alpha : {0.3, 0.5, 0.7}) {
        double prev = INFINITY;
        bool mono = true;
        for (double p0 : {0.05, 0.02, 0.01, 0.005}) {
            const FamilyState fs = family_a_refine({alpha, p0});
            const double x1 = 2.0 * kPi * fs.state[1].energy;
            const double x2 = 2.0 * kPi * fs.state[2].energy;
            const auto r = family_a_residual(
                {alpha, p0}, {fs.state[1].probability, fs.state[2].probability, x1, x2});
            for (double v : r) worst_res = std::max(worst_res, std::abs(v));
            worst_alpha = std::max(worst_alpha, std::abs(fs.achieved_alpha - alpha));
            ratio_gt1 = ratio_gt1 && fs.bound_ratio > 1.0;
            mono = mono && fs.bound_ratio < prev;
            prev = fs.bound_ratio;
        }
        s.check(fmt("family A ratio decreasing in p0 (alpha=%g)", alpha), mono, "");
    }
    s.check("family A solves the orthogonality system", worst_res < 1e-12,
            fmt("max residual %.3e", worst_res));
    s.check("family A hits the target alpha", worst_alpha < 1e-10, fmt("max err %.3e", worst_alpha));
    s.check("family ratios strictly above the bound", ratio_gt1, "");

    const double alpha = 0.5;
    const FamilyState fs = family_a_refine({alpha, 0.001});
    const Moments m = moments(fs.state);
    const double keel = 2.0 * fs.achieved_tau * (m.mean_energy + m.energy_spread);
    s.check("family A keel value approaches the bound", std::abs(keel / keel_bound(alpha) - 1.0) < 2e-3,
            fmt("keel %.9f vs %.9f", keel, keel_bound(alpha)));
}

void mixed_suite(std::vector<CheckResult>& out, std::size_t n, Rng& rng) {
    Suite s("mixed", out);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    double purity_err = 0.0, phase_err = 0.0;
    double min_rank2 = INFINITY;
    bool no_violation = true;

    for (std::size_t i = 0; i < n; ++i) {
        // Two orthonormal members over a random four-level spectrum.
        std::vector<double> energies{0.0, unit(rng), 1.0 + unit(rng), 2.0 + unit(rng)};
        std::vector<complex> a(4), b(4);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int j = 0; j < 4; ++j) {
            a[j] = {g(rng), g(rng)};
            b[j] = {g(rng), g(rng)};
        }
        auto norm_of = [](const std::vector<complex>& v) {
            double s2 = 0.0;
            for (auto c : v) s2 += std::norm(c);
            return std::sqrt(s2);
        };
        const double na = norm_of(a);
        for (auto& c : a) c /= na;
        complex proj{0.0, 0.0};
        for (int j = 0; j < 4; ++j) proj += std::conj(a[j]) * b[j];
        for (int j = 0; j < 4; ++j) b[j] -= proj * a[j];
        const double nb = norm_of(b);
        for (auto& c : b) c /= nb;

        auto make = [&](const std::vector<complex>& v, complex ph) {
            std::vector<AmplitudeState::Component> comps;
            for (int j = 0; j < 4; ++j) comps.push_back({{energies[j], 0}, v[j] * ph});
            return AmplitudeState::from_components(comps);
        };
        const double l1 = 0.05 + 0.9 * unit(rng);
        const auto e = MixedEnsemble::from_members({{l1, make(a, 1.0)}, {1.0 - l1, make(b, 1.0)}});
        const auto e_ph = MixedEnsemble::from_members(
            {{l1, make(a, std::polar(1.0, phase(rng)))}, {1.0 - l1, make(b, std::polar(1.0, phase(rng)))}});
        purity_err = std::max(purity_err,
                              std::abs(trace_overlap(e, 0.0) - (l1 * l1 + (1 - l1) * (1 - l1))));
        const double t = 3.0 * unit(rng);
        phase_err = std::max(phase_err, std::abs(trace_overlap(e, t) - trace_overlap(e_ph, t)));

        // Any zero of the trace overlap must respect the unified bound.
        const BoundReport rep = bound_report(ensemble_moments(e));
        for (double tt = 0.0; tt < rep.tau_unified * (1.0 - 1e-9); tt += rep.tau_unified / 256.0) {
            if (trace_overlap(e, tt) < 1e-18) no_violation = false;
        }

        const double e1 = 0.1 + 3.0 * unit(rng);
        const auto r2 = rank2_counterexample(e1, l1);
        min_rank2 = std::min(min_rank2, trace_overlap(r2, 0.5 / e1));
    }
    s.check("Tr[rho(0)^2] equals the purity", purity_err < 1e-12, fmt("max err %.3e", purity_err));
    s.check("trace overlap invariant under member phases", phase_err < 1e-12,
            fmt("max err %.3e", phase_err));
    s.check("rank-2 counterexample never orthogonal at h/(2 E1)", min_rank2 > 1e-3,
            fmt("min overlap %.6f", min_rank2));
    s.check("no ensemble orthogonal before the unified bound", no_violation, "");
}

void optimizer_suite(std::vector<CheckResult>& out, std::size_t n, Rng& rng) {
    Suite s("optimizer", out);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int mode = 0; mode < 2; ++mode) {
        OptProblem p;
        p.alpha_target = 0.7;
        p.num_levels = 4;
        if (mode == 1) p.energy_mode = FixedGrid{{0.0, 1.0, 2.5, 4.0}};
        const TauObjective obj(p, 1.7);
        for (std::size_t i = 0; i < std::min<std::size_t>(n, 200); ++i) {
            Eigen::VectorXd th(obj.dim());
            for (int j = 0; j < obj.dim(); ++j) th[j] = g(rng);
            const auto t = obj.evaluate(th);
            for (int j = 0; j < obj.dim(); ++j) {
                const double h = 1e-6;
                Eigen::VectorXd a = th, b = th;
                a[j] += h;
                b[j] -= h;
                const auto ta = obj.evaluate(a);
                const auto tb = obj.evaluate(b);
                auto rel = [&](double fa, double fb, double an) {
                    const double fd = (fa - fb) / (2.0 * h);
                    return std::abs(fd - an) / std::max(1.0, std::abs(an));
                };
                worst = std::max({worst, rel(ta.mean, tb.mean, t.d_mean[j]),
                                  rel(ta.re, tb.re, t.d_re[j]), rel(ta.im, tb.im, t.d_im[j]),
                                  rel(ta.alpha_gap, tb.alpha_gap, t.d_alpha_gap[j])});
            }
        }
    }
    s.check("analytic gradients match central differences", worst < 1e-5, fmt("max rel err %.3e", worst));

    OptProblem p;
    p.alpha_target = 1.0;
    p.num_levels = 2;
    p.restarts = 4;
    const OptResult r = minimize_tau(p);
    s.check("alpha = 1 reaches the bound", r.converged && r.bound_ratio <= 1.0 + 1e-6,
            fmt("ratio %.12f", r.bound_ratio));
}

using SuiteFn = void (*)(std::vector<CheckResult>&, std::size_t, Rng&);

struct Entry {
    const char* name;
    SuiteFn fn;
    std::size_t divisor;  // random trials = samples / divisor (at least 20)
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e{
        {"trig", trig_suite, 1},         {"state", state_suite, 10},
        {"survival", survival_suite, 10}, {"bounds", bounds_suite, 100},
        {"families", families_suite, 1}, {"mixed", mixed_suite, 100},
        {"optimizer", optimizer_suite, 100},
    };
    return e;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : entries()) v.emplace_back(e.name);
        return v;
    }();
    return names;
}

std::vector<CheckResult> run_suites(std::string_view suite, std::size_t samples, std::uint64_t seed) {
    std::vector<CheckResult> out;
    bool matched = false;
    for (const auto& e : entries()) {
        if (suite != "all" && suite != e.name) continue;
        matched = true;
        Rng rng(seed);
        try {
            e.fn(out, std::max<std::size_t>(samples / e.divisor, 20), rng);
        } catch (const std::exception& ex) {
            out.push_back({std::string(e.name), "suite ran to completion", false, ex.what()});
        }
    }
    if (!matched) throw DomainError("unknown suite \"" + std::string(suite) + "\"");
    return out;
}

}  // namespace qsl
