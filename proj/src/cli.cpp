#include "qsl/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsl/bounds.hpp"
#include "qsl/families.hpp"
#include "qsl/mixed.hpp"
#include "qsl/optimizer.hpp"
#include "qsl/state_io.hpp"
#include "qsl/survival.hpp"
#include "qsl/sweep.hpp"
#include "qsl/verify.hpp"

namespace qsl {

using nlohmann::json;

namespace {

// Usage errors raised after CLI11 parsing succeeded.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

json moments_json(const Moments& m) {
    return {{"E", num(m.mean_energy)},
            {"dE", num(m.energy_spread)},
            {"alpha", m.alpha ? num(*m.alpha) : json(nullptr)},
            {"e_max", num(m.max_energy)}};
}

json bounds_json(const BoundReport& b) {
    return {{"tau_mt", num(b.tau_mt)},
            {"tau_ml", num(b.tau_ml)},
            {"tau_unified", num(b.tau_unified)},
            {"tau_emax", num(b.tau_emax)},
            {"keel_value_bound", num(b.keel_value_bound)},
            {"alpha", b.alpha ? num(*b.alpha) : json(nullptr)}};
}

json ortho_json(const OrthoResult& r) {
    return {{"status", r.found() ? "found" : "not-found-within-horizon"},
            {"tau", r.found() ? num(r.tau) : json(nullptr)},
            {"min_overlap", num(r.min_overlap)},
            {"argmin_time", num(r.argmin_time)},
            {"horizon", num(r.horizon)},
            {"tolerance", num(r.tolerance)}};
}

std::vector<double> parse_grid(const std::string& text) {
    SweepSpec tmp;
    parse_sweep_params(text, tmp);
    return tmp.p0s;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QSL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("QSL_SEED is not an integer: ") + env);
        }
    }
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orthogonalization times and quantum speed-limit bounds", "qsl"};
    app.require_subcommand(1);

    std::string state_file;
    double tau_value = 0.0;

    auto* bounds = app.add_subcommand("bounds", "Moments and bound report of a state");
    bounds->add_option("--state", state_file, "State JSON file")->required();

    double tol = 1e-9;
    std::optional<double> horizon;
    int oversample = 64;
    auto* tau = app.add_subcommand("tau", "First orthogonalization time of a pure state");
    tau->add_option("--state", state_file, "State JSON file")->required();
    tau->add_option("--tol", tol, "Orthogonality tolerance on |S|");
    tau->add_option("--horizon", horizon, "Search horizon (absolute time)");
    tau->add_option("--oversample", oversample, "Grid points per fastest period");

    double alpha = 0.0;
    std::optional<double> p0;
    std::optional<int> k;
    double e1 = 1.0;
    auto* family = app.add_subcommand("family", "Construct a bound-approaching family state");
    family->add_option("--alpha", alpha, "Target dE/E")->required();
    family->add_option("--p0", p0, "Ground weight (family A, alpha < 1)");
    family->add_option("--k", k, "Level index parameter (family B, alpha > 1)");
    family->add_option("--e1", e1, "First excited energy (family B)");

    SweepSpec spec;
    std::string params;
    std::string csv_path;
    auto* sweep = app.add_subcommand("sweep", "Keel-curve data as CSV");
    sweep->add_option("--alpha-min", spec.alpha_min)->required();
    sweep->add_option("--alpha-max", spec.alpha_max)->required();
    sweep->add_option("--points", spec.points)->required();
    sweep->add_option("--params", params, "p0 list;k list, e.g. 0.05,0.01;2,8,32")->required();
    sweep->add_option("--out", csv_path, "CSV output file")->required();

    std::string suite = "all";
    std::size_t samples = 10000;
    std::uint64_t verify_seed = 20080101;
    auto* verify = app.add_subcommand("verify", "Run property suites");
    std::vector<std::string> choices = suite_names();
    choices.push_back("all");
    verify->add_option("--suite", suite)->check(CLI::IsMember(choices));
    verify->add_option("--samples", samples)->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed);

    int levels = 3;
    std::optional<std::uint64_t> seed;
    int restarts = 16;
    int max_iters = 2000;
    std::string grid;
    std::optional<double> cap;
    auto* optimize = app.add_subcommand("optimize", "Search for fastest-orthogonalizing states");
    optimize->add_option("--alpha", alpha)->required();
    optimize->add_option("--levels", levels)->required();
    optimize->add_option("--seed", seed);
    optimize->add_option("--restarts", restarts);
    optimize->add_option("--max-iters", max_iters);
    optimize->add_option("--grid", grid, "Fixed energy grid, comma separated");
    optimize->add_option("--cap", cap, "Energy cap in units of h/tau (free mode)");

    auto* reduce = app.add_subcommand("reduce", "Fold and reflect a spectrum orthogonal at tau");
    reduce->add_option("--state", state_file)->required();
    reduce->add_option("--tau", tau_value)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*bounds) {
            const StateDocument doc = load_state_file(state_file);
            json j;
            if (const auto* mix = std::get_if<MixedEnsemble>(&doc.value)) {
                const Moments m = ensemble_moments(*mix);
                const BoundReport b = bound_report(m, doc.units);
                j = {{"moments", moments_json(m)}, {"bounds", bounds_json(b)}};
                if (mix->size() >= 2) {
                    j["trace_overlap_at_tau_unified"] =
                        num(mixed_nonattainability_check(*mix, b, doc.units));
                }
            } else {
                const Moments m = moments(pure_spectral(doc));
                j = {{"moments", moments_json(m)}, {"bounds", bounds_json(bound_report(m, doc.units))}};
            }
            print_json(out, j);
        } else if (*tau) {
            const StateDocument doc = load_state_file(state_file);
            ZeroFinderConfig cfg;
            cfg.tolerance = tol;
            cfg.horizon = horizon;
            cfg.oversample = oversample;
            print_json(out, ortho_json(first_orthogonal_time(pure_spectral(doc), cfg, doc.units)));
        } else if (*family) {
            if (p0.has_value() == k.has_value()) {
                throw UsageError("family: exactly one of --p0 or --k is required");
            }
            const FamilyState fs = p0 ? family_a_refine({alpha, *p0}) : family_b({alpha, *k, e1});
            print_json(out, to_json(fs.state));
            err << std::setprecision(12) << "family " << (p0 ? "A" : "B") << ": alpha "
                << fs.achieved_alpha << ", tau " << fs.achieved_tau << " (predicted "
                << fs.predicted_tau << "), bound ratio " << fs.bound_ratio << '\n';
        } else if (*sweep) {
            parse_sweep_params(params, spec);
            const SweepOutput res = run_sweep(spec);
            std::ofstream file(csv_path, std::ios::binary);
            if (!file) throw DomainError("cannot write " + csv_path);
            file << sweep_csv(res.rows);
            for (const auto& s : res.skipped) err << s << '\n';
            err << res.rows.size() << " rows written to " << csv_path << '\n';
        } else if (*verify) {
            const auto results = run_suites(suite, samples, verify_seed);
            bool all_ok = true;
            for (const auto& r : results) {
                all_ok = all_ok && r.passed;
                err << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(10) << r.suite
                    << r.name;
                if (!r.detail.empty()) err << "  [" << r.detail << ']';
                err << '\n';
            }
            err << (all_ok ? "all checks passed" : "some checks FAILED") << '\n';
            return all_ok ? 0 : 1;
        } else if (*optimize) {
            OptProblem p;
            p.alpha_target = alpha;
            p.num_levels = levels;
            p.seed = seed ? *seed : default_seed();
            p.restarts = restarts;
            p.max_iters = max_iters;
            if (!grid.empty()) {
                if (cap) throw UsageError("optimize: --cap applies only without --grid");
                p.energy_mode = FixedGrid{parse_grid(grid)};
            } else {
                p.energy_mode = FreeEnergies{cap};
            }
            const OptResult r = minimize_tau(p);
            json trace = json::array();
            for (const auto& t : r.trace) trace.push_back({t.iteration, num(t.objective)});
            print_json(out, {{"best_state", to_json(r.best_state)},
                             {"achieved_tau", num(r.achieved_tau)},
                             {"achieved_alpha", num(r.achieved_alpha)},
                             {"bound_ratio", num(r.bound_ratio)},
                             {"converged", r.converged},
                             {"trace", std::move(trace)}});
            if (!r.converged) err << "optimize: no feasible state found\n";
        } else if (*reduce) {
            const StateDocument doc = load_state_file(state_file);
            print_json(out, to_json(reduce_spectrum(pure_spectral(doc), tau_value, doc.units),
                                    doc.units));
        }
    } catch (const UsageError& e) {
        err << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace qsl
