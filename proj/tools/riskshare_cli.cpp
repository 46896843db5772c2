// Command-line front end: envelope/allocation/density/CE/nudge subcommands
// plus named sweep recipes that emit the data behind each figure as
// deterministic CSV.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riskshare/economy.hpp"
#include "riskshare/envelope.hpp"
#include "riskshare/errors.hpp"
#include "riskshare/io.hpp"
#include "riskshare/nudge.hpp"
#include "riskshare/numeric.hpp"
#include "riskshare/oracle.hpp"
#include "riskshare/welfare.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riskshare;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct SweepSpec {
    double start = 0.0, stop = 0.0, step = 0.0;
};

SweepSpec parse_sweep(const std::string& text) {
    SweepSpec s;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> s.start >> c1 >> s.stop >> c2 >> s.step) || c1 != ':' || c2 != ':')
        throw ConfigError("sweep spec must be start:stop:step, got '" + text + "'");
    if (!(s.step > 0.0)) throw ConfigError("sweep step must be positive");
    return s;
}

std::vector<double> sweep_values(const SweepSpec& s) {
    std::vector<double> v;
    for (double x = s.start; x <= s.stop + 1e-12; x += s.step)
        v.push_back(x);
    return v;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    in >> j;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "'");
    out << text;
}

Weighting weighting_from_flags(const std::string& spec_json,
                               const std::string& config_path) {
    if (!spec_json.empty()) return io::parse_weighting(json::parse(spec_json));
    if (!config_path.empty()) return io::parse_weighting(load_json(config_path));
    throw ConfigError("provide --weighting JSON or --config FILE");
}

// ---- table builders (shared by subcommands and recipes) -------------------

std::string envelope_table(const Weighting& w, int resolution) {
    const Envelope env = build_envelope(w);
    const Weighting conj = w.conjugate();
    io::CsvWriter csv({"t", "Ttilde", "delta", "delta_prime"});
    for (int i = 0; i <= resolution; ++i) {
        const double t = static_cast<double>(i) / resolution;
        const double tc = std::min(std::max(t, 1e-12), 1.0 - 1e-12);
        csv.add_row({t, conj(t), env(t), env.deriv(tc)});
    }
    return csv.str();
}

std::string allocation_table(const Economy& econ, int grid) {
    const Envelope env = build_envelope(econ.rdu_weighting);
    const Allocation alloc = solve_allocation(econ, env);
    std::vector<std::string> header{"t"};
    for (size_t i = 0; i < econ.num_agents(); ++i)
        header.push_back("x" + std::to_string(i + 1));
    io::CsvWriter csv(header);
    for (double t : numeric::midpoint_grid(grid)) {
        std::vector<double> row{t};
        for (size_t i = 0; i < econ.num_agents(); ++i)
            row.push_back(alloc.payoff(i, t));
        csv.add_row(row);
    }
    return csv.str();
}

std::string density_table(const Economy& econ, int grid) {
    const Envelope env = build_envelope(econ.rdu_weighting);
    const Allocation alloc = solve_allocation(econ, env);
    const size_t n = econ.num_agents();
    std::vector<std::string> header{"x"};
    for (size_t i = 0; i < n; ++i) header.push_back("f" + std::to_string(i + 1));
    header.push_back("atom_agent");
    header.push_back("atom_mass");
    io::CsvWriter csv(header);

    double lo = 0.0, hi = 0.0;
    bool have_support = false;
    for (size_t i = 0; i < n; ++i) {
        const Interval s = alloc.continuous_support(i);
        if (s.empty()) continue;
        if (!have_support) {
            lo = s.lo;
            hi = s.hi;
            have_support = true;
        } else {
            lo = std::min(lo, s.lo);
            hi = std::max(hi, s.hi);
        }
    }
    if (have_support) {
        for (int g = 0; g < grid; ++g) {
            const double x = lo + (hi - lo) * (g + 0.5) / grid;
            std::vector<double> row{x};
            for (size_t i = 0; i < n; ++i) row.push_back(alloc.density(i, x));
            row.push_back(0.0);
            row.push_back(0.0);
            csv.add_row(row);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (const auto at = alloc.atom(i)) {
            std::vector<double> row{at->location};
            for (size_t j = 0; j < n; ++j) row.push_back(0.0);
            row.push_back(static_cast<double>(i + 1));
            row.push_back(at->mass);
            csv.add_row(row);
        }
    }
    return csv.str();
}

std::string ce_table(const Economy& econ, const std::vector<double>& alphas) {
    const auto rows = ce_sweep(econ, alphas);
    std::vector<std::string> header{"alpha"};
    for (size_t i = 0; i < econ.num_agents(); ++i)
        header.push_back("ce" + std::to_string(i + 1));
    header.push_back("ce_sum");
    io::CsvWriter csv(header);
    for (const auto& r : rows) {
        std::vector<double> row{r.alpha};
        for (double c : r.ce) row.push_back(c);
        row.push_back(r.ce_sum);
        csv.add_row(row);
    }
    return csv.str();
}

std::string nudge_table(const NudgeConfig& base, const std::vector<double>& alphas) {
    struct Row {
        double alpha, m_star, value, fi;
    };
    std::vector<Row> rows(alphas.size());
    std::vector<std::future<void>> jobs;
    const size_t workers = 4;
    for (size_t w0 = 0; w0 < workers; ++w0) {
        jobs.push_back(std::async(std::launch::async, [&, w0] {
            for (size_t i = w0; i < alphas.size(); i += workers) {
                NudgeConfig cfg = base;
                cfg.weighting = Weighting::prelec(alphas[i]);
                const NudgeSolution sol = optimal_effort(cfg);
                rows[i] = {alphas[i], sol.m_star, sol.value, sol.fi_mass_at_star};
            }
        }));
    }
    for (auto& j : jobs) j.get();
    io::CsvWriter csv({"alpha", "M_star", "V_at_star", "fi_mass_at_star"});
    for (const auto& r : rows) csv.add_row({r.alpha, r.m_star, r.value, r.fi});
    return csv.str();
}

Economy baseline_economy(double alpha, double b1, double b2, double b3) {
    Economy econ{Weighting::prelec(alpha), Utility::cara(b1),
                 {Utility::cara(b2), Utility::cara(b3)},
                 no_side_payment_weights(b2, b3), 0.0};
    return econ;
}

// ---- recipes ---------------------------------------------------------------

using RecipeFn = std::function<void(const fs::path&)>;

std::map<std::string, RecipeFn> make_recipes() {
    std::map<std::string, RecipeFn> recipes;

    recipes["fig1"] = [](const fs::path& out) {
        write_text(out / "fig1_s_shaped.csv",
                   envelope_table(Weighting::prelec(2.0), 2000));
        write_text(out / "fig1_inverse_s.csv",
                   envelope_table(Weighting::prelec(0.5), 2000));
    };

    recipes["fig2a"] = [](const fs::path& out) {
        io::CsvWriter csv({"alpha", "fi_mass", "pstar"});
        for (double a = 0.05; a <= 10.0 + 1e-9; a += 0.05) {
            const Envelope env = build_envelope(Weighting::prelec(a));
            csv.add_row({a, env.fi_mass(), env.pstar()});
        }
        write_text(out / "fig2a_fi_alpha.csv", csv.str());
    };

    recipes["fig2b"] = [](const fs::path& out) {
        io::CsvWriter csv({"gamma", "fi_mass", "pstar"});
        for (double g = 0.30; g <= 10.0 + 1e-9; g += 0.05) {
            const Envelope env = build_envelope(Weighting::tversky_kahneman(g));
            csv.add_row({g, env.fi_mass(), env.pstar()});
        }
        write_text(out / "fig2b_fi_gamma.csv", csv.str());
    };

    recipes["fig3"] = [](const fs::path& out) {
        write_text(out / "fig3_density.csv",
                   density_table(baseline_economy(0.8, 0.5, 0.5, 2.0), 2000));
    };
    recipes["fig4a"] = [](const fs::path& out) {
        write_text(out / "fig4a_density.csv",
                   density_table(baseline_economy(0.8, 0.5, 0.5, 0.7), 2000));
    };
    recipes["fig4b"] = [](const fs::path& out) {
        write_text(out / "fig4b_density.csv",
                   density_table(baseline_economy(0.8, 2.0, 0.5, 2.0), 2000));
    };
    recipes["fig5"] = [](const fs::path& out) {
        write_text(out / "fig5_density.csv",
                   density_table(baseline_economy(1.2, 0.5, 0.5, 2.0), 2000));
    };

    recipes["fig6"] = [](const fs::path& out) {
        io::CsvWriter csv({"gamma", "kappa", "fi_mass"});
        for (double kappa : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            for (double g = 0.02; g <= 0.98 + 1e-9; g += 0.02) {
                const Envelope env =
                    build_envelope(Weighting::hurwicz(g, kappa));
                csv.add_row({g, kappa, env.fi_mass()});
            }
        }
        write_text(out / "fig6_fi_heu.csv", csv.str());
    };

    recipes["fig7"] = [](const fs::path& out) {
        Economy econ{Weighting::hurwicz(0.5, 0.5), Utility::cara(0.5),
                     {Utility::cara(0.5), Utility::cara(2.0)},
                     no_side_payment_weights(0.5, 2.0), 0.0};
        write_text(out / "fig7_density.csv", density_table(econ, 2000));
    };

    recipes["fig8"] = [](const fs::path& out) {
        Economy econ = baseline_economy(0.8, 0.5, 0.5, 2.0);
        std::vector<double> alphas;
        for (double a = 0.1; a <= 3.0 + 1e-9; a += 0.05) alphas.push_back(a);
        write_text(out / "fig8_ce.csv", ce_table(econ, alphas));
    };

    recipes["fig9"] = [](const fs::path& out) {
        // density of the RDU payoff under nudging, at fixed blend levels
        NudgeConfig cfg;
        cfg.k = 20.0;
        cfg.weighting = Weighting::prelec(0.4);
        cfg.rdu_utility = Utility::cara(0.5);
        cfg.eu_utility = Utility::cara(0.4);
        cfg.endowment = 1.0;
        const Envelope env = build_envelope(cfg.weighting);
        io::CsvWriter csv({"f", "x", "density", "atom_mass", "atom_x"});
        for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            Economy two{Weighting::mixture(cfg.weighting, f), cfg.rdu_utility,
                        {cfg.eu_utility}, {1.0}, cfg.endowment};
            const Envelope nudged = nudged_envelope(env, f);
            const Allocation alloc = solve_allocation(two, nudged);
            const auto at = alloc.atom(0);
            const Interval sup = alloc.continuous_support(0);
            if (!sup.empty()) {
                for (int g = 0; g < 800; ++g) {
                    const double x = sup.lo + (sup.hi - sup.lo) * (g + 0.5) / 800;
                    csv.add_row({f, x, alloc.density(0, x),
                                 at ? at->mass : 0.0, at ? at->location : 0.0});
                }
            } else if (at) {
                csv.add_row({f, at->location, 0.0, at->mass, at->location});
            }
        }
        write_text(out / "fig9_nudged_density.csv", csv.str());
    };

    recipes["fig10"] = [](const fs::path& out) {
        NudgeConfig cfg;
        cfg.k = 20.0;
        cfg.rdu_utility = Utility::cara(0.5);
        cfg.eu_utility = Utility::cara(0.4);
        cfg.endowment = 1.0;
        std::vector<double> alphas;
        for (double a = 0.10; a <= 0.98 + 1e-9; a += 0.02) alphas.push_back(a);
        write_text(out / "fig10_mstar.csv", nudge_table(cfg, alphas));
    };

    return recipes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pareto-optimal risk sharing with one rank-dependent agent"};
    app.require_subcommand(1);

    std::string config_path, weighting_json, out_dir = ".", recipe_name;
    int grid = 2001;
    unsigned long long seed = 42;
    double tol = 1e-10;
    app.add_option("--config", config_path, "economy or weighting JSON file")
        ->envname("RISKSHARE_CONFIG");
    app.add_option("--out", out_dir, "output directory")->envname("RISKSHARE_OUT");
    app.add_option("--grid", grid, "table resolution")->envname("RISKSHARE_GRID");
    app.add_option("--seed", seed, "Monte Carlo seed")->envname("RISKSHARE_SEED");
    app.add_option("--tol", tol, "tolerance override")->envname("RISKSHARE_TOL");

    auto* cmd_envelope = app.add_subcommand("envelope",
                                            "conjugate, envelope, and derivative table");
    cmd_envelope->add_option("--weighting", weighting_json, "inline weighting JSON");

    auto* cmd_allocate = app.add_subcommand("allocate", "payoff table over the uniform variate");
    auto* cmd_density = app.add_subcommand("density", "per-agent density table");
    auto* cmd_ce = app.add_subcommand("ce", "certainty equivalents");
    std::string sweep_spec;
    cmd_ce->add_option("--sweep", sweep_spec, "alpha=start:stop:step");

    auto* cmd_nudge = app.add_subcommand("nudge", "optimal nudging effort");
    double nudge_k = 20.0;
    std::string alpha_sweep;
    cmd_nudge->add_option("--k", nudge_k, "cost curvature");
    cmd_nudge->add_option("--alpha-sweep", alpha_sweep, "start:stop:step");

    auto* cmd_sweep = app.add_subcommand("sweep", "named figure recipes");
    cmd_sweep->add_option("--recipe", recipe_name, "recipe name (fig1..fig10)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const fs::path out(out_dir);
        fs::create_directories(out);

        if (cmd_envelope->parsed()) {
            const Weighting w = weighting_from_flags(weighting_json, config_path);
            write_text(out / "envelope.csv", envelope_table(w, grid));
            const json summary = io::envelope_summary(build_envelope(w));
            write_text(out / "envelope.json", summary.dump(2) + "\n");
            std::cout << summary.dump(2) << "\n";
        } else if (cmd_allocate->parsed()) {
            const Economy econ = io::parse_economy(load_json(config_path));
            write_text(out / "allocation.csv", allocation_table(econ, grid));
            const Envelope env = build_envelope(econ.rdu_weighting);
            json summary = io::envelope_summary(env);
            const Allocation alloc = solve_allocation(econ, env);
            summary["borch_deviation"] = borch_check(alloc, econ);
            write_text(out / "allocation.json", summary.dump(2) + "\n");
            std::cout << summary.dump(2) << "\n";
        } else if (cmd_density->parsed()) {
            const Economy econ = io::parse_economy(load_json(config_path));
            write_text(out / "density.csv", density_table(econ, grid));
        } else if (cmd_ce->parsed()) {
            const Economy econ = io::parse_economy(load_json(config_path));
            std::vector<double> alphas;
            if (!sweep_spec.empty()) {
                std::string spec = sweep_spec;
                if (spec.rfind("alpha=", 0) == 0) spec = spec.substr(6);
                alphas = sweep_values(parse_sweep(spec));
            } else if (const auto* p = std::get_if<Weighting::Prelec>(
                           &econ.rdu_weighting.params())) {
                alphas = {p->alpha};
            } else {
                throw ConfigError("ce: provide --sweep or a Prelec economy");
            }
            write_text(out / "ce.csv", ce_table(econ, alphas));
        } else if (cmd_nudge->parsed()) {
            const Economy econ = io::parse_economy(load_json(config_path));
            NudgeConfig cfg = NudgeConfig::from_economy(econ, nudge_k);
            if (!alpha_sweep.empty()) {
                const auto alphas = sweep_values(parse_sweep(alpha_sweep));
                write_text(out / "nudge_sweep.csv", nudge_table(cfg, alphas));
            } else {
                const NudgeSolution sol = optimal_effort(cfg);
                json j{{"M_star", sol.m_star},
                       {"value", sol.value},
                       {"boundary", sol.boundary},
                       {"foc_residual", sol.foc_residual},
                       {"fi_mass_at_star", sol.fi_mass_at_star},
                       {"multimodal_warning", sol.multimodal_warning}};
                write_text(out / "nudge.json", j.dump(2) + "\n");
                std::cout << j.dump(2) << "\n";
            }
        } else if (cmd_sweep->parsed()) {
            const auto recipes = make_recipes();
            const auto it = recipes.find(recipe_name);
            if (it == recipes.end()) {
                std::cerr << "unknown recipe '" << recipe_name
                          << "'; available:";
                for (const auto& [name, fn] : recipes) std::cerr << " " << name;
                std::cerr << "\n";
                return kExitConfig;
            }
            it->second(out);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
