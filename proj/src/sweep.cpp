#include "qsl/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "qsl/bounds.hpp"
#include "qsl/families.hpp"
#include "qsl/survival.hpp"

namespace qsl {

namespace {

template <class T>
std::vector<T> parse_list(std::string_view text, const char* what) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string item(text.substr(pos, end - pos));
        if (!item.empty()) {
            std::istringstream is(item);
            T v{};
            is >> v;
            if (!is || !is.eof()) {
                throw DomainError(std::string("invalid ") + what + " value \"" + item + "\"");
            }
            out.push_back(v);
        }
        pos = end + 1;
    }
    return out;
}

SweepRow family_row(double alpha, const char* tag, double param, const FamilyState& fs) {
    const Moments m = moments(fs.state);
    SweepRow r;
    r.alpha = alpha;
    r.family = tag;
    r.param = param;
    r.tau = fs.achieved_tau;
    r.mean_energy = m.mean_energy;
    r.energy_spread = m.energy_spread;
    r.keel_value = 2.0 * r.tau * (r.mean_energy + r.energy_spread);
    r.keel_bound = keel_bound(alpha);
    return r;
}

SweepOutput rows_for(double alpha, const SweepSpec& spec) {
    SweepOutput out;
    // Bound row in units E = 1.
    SweepRow bound;
    bound.alpha = alpha;
    bound.family = "bound";
    bound.mean_energy = 1.0;
    bound.energy_spread = alpha;
    Moments m;
    m.mean_energy = 1.0;
    m.energy_spread = alpha;
    m.alpha = alpha;
    bound.tau = bound_report(m).tau_unified;
    bound.keel_value = 2.0 * bound.tau * (bound.mean_energy + bound.energy_spread);
    bound.keel_bound = keel_bound(alpha);
    out.rows.push_back(bound);

    auto skip = [&](const char* tag, double param, const std::string& why) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "alpha=%.12g family %s param %.12g skipped: %s", alpha, tag,
                      param, why.c_str());
        out.skipped.emplace_back(buf);
    };

    if (alpha == 1.0) {
        // exact attainment by the equal two-level state
        FamilyState fs{SpectralState::from_levels({{0.0, 0.5}, {1.0, 0.5}})};
        fs.achieved_tau = first_orthogonal_time(fs.state).tau;
        out.rows.push_back(family_row(1.0, "A", 0.0, fs));
    } else if (alpha < 1.0) {
        for (double p0 : spec.p0s) {
            try {
                out.rows.push_back(family_row(alpha, "A", p0, family_a_refine({alpha, p0})));
            } catch (const DomainError& e) {
                skip("A", p0, e.what());
            }
        }
    } else {
        for (int k : spec.ks) {
            try {
                out.rows.push_back(family_row(alpha, "B", k, family_b({alpha, k, 1.0})));
            } catch (const DomainError& e) {
                skip("B", k, e.what());
            }
        }
    }
    return out;
}

void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

}  // namespace

void parse_sweep_params(std::string_view text, SweepSpec& spec) {
    const auto semi = text.find(';');
    const std::string_view a = text.substr(0, semi);
    const std::string_view b = semi == std::string_view::npos ? std::string_view{}
                                                              : text.substr(semi + 1);
    spec.p0s = parse_list<double>(a, "p0");
    spec.ks = parse_list<int>(b, "k");
}

std::vector<double> sweep_alphas(const SweepSpec& spec) {
    if (!(spec.alpha_min > 0.0) || !(spec.alpha_max >= spec.alpha_min)) {
        throw DomainError("sweep requires 0 < alpha-min <= alpha-max");
    }
    if (spec.points < 1) throw DomainError("sweep requires at least one point");
    std::vector<double> out;
    const double la = std::log(spec.alpha_min);
    const double lb = std::log(spec.alpha_max);
    for (int i = 0; i < spec.points; ++i) {
        double a = spec.points == 1
                       ? spec.alpha_min
                       : std::exp(la + (lb - la) * i / static_cast<double>(spec.points - 1));
        if (i == 0) a = spec.alpha_min;
        if (i == spec.points - 1) a = spec.alpha_max;
        if (std::abs(a - 1.0) < 1e-12) a = 1.0;
        out.push_back(a);
    }
    return out;
}

SweepOutput run_sweep(const SweepSpec& spec) {
    const auto alphas = sweep_alphas(spec);
    std::vector<std::future<SweepOutput>> jobs;
    jobs.reserve(alphas.size());
    for (double a : alphas) {
        jobs.push_back(std::async(std::launch::async, [a, &spec] { return rows_for(a, spec); }));
    }
    SweepOutput all;
    for (auto& j : jobs) {
        SweepOutput part = j.get();
        all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
        all.skipped.insert(all.skipped.end(), part.skipped.begin(), part.skipped.end());
    }
    return all;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "alpha,family,param,tau,E,dE,keel_value,keel_bound\n";
    for (const auto& r : rows) {
        put(out, r.alpha);
        out += ',';
        out += r.family;
        out += ',';
        put(out, r.param);
        for (double v : {r.tau, r.mean_energy, r.energy_spread, r.keel_value, r.keel_bound}) {
            out += ',';
            put(out, v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace qsl
