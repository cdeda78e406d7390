// rnf: normal forms, stability estimates, Table 1 and simulations from the command line.
//
// exit status: 0 success, 1 refusal (parameters violate a smallness condition), 2 bad configuration

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>

#include "rnf/dynamics.hpp"

namespace fs = std::filesystem;
using namespace rnf;

namespace {

struct RunConfig {
    std::string command;
    std::string system = "e19";
    int order = 0;  // 0: command default
    bool extended = false;
    double eps = -1.0, mu = -1.0;  // negative: not given
    double t_end = 1e4;
    double tol = 1e-10;
    double stride = 1.0;
    double y_init = std::nan("");
    double x_init = 0.0;
    bool stop_at_attractor = false;
    std::string evaluator = "sampled";
    std::string out;
};

struct Refusal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path output_root(const RunConfig& c) {
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv("RNF_OUT_ROOT"); env && *env) return env;
    return "rnf_out";
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
    std::ofstream o(p, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write " + p.string());
    o << text;
}

NormEvaluator parse_evaluator(const std::string& s) {
    if (s == "sampled") return NormEvaluator::sampled;
    if (s == "majorant") return NormEvaluator::majorant;
    throw ConfigError("unknown norm evaluator " + s);
}

// refuses parameters above a computed threshold, naming the condition
void check_parameters(const NormalFormResult& nf, double eps, double mu, NormEvaluator ev) {
    EstimateOptions opt;
    opt.evaluator = ev;
    Estimator est(nf, opt);
    auto th = est.thresholds();
    if (auto c = est.first_violation(th, std::max(eps, 0.0), std::max(mu, 0.0))) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "refused: %s = %g violates condition (%s): %s [threshold %.4g]",
                      c->parameter == Parameter::eps ? "eps" : "mu", c->parameter == Parameter::eps ? eps : mu,
                      c->name.c_str(), c->description.c_str(), c->threshold);
        throw Refusal(buf);
    }
}

std::string golden_name(const std::string& sys, int N) { return sys + "_N" + std::to_string(N) + ".txt"; }

std::vector<fs::path> run_normalize(const RunConfig& c, const fs::path& root) {
    auto sys = resolve_system(c.system);
    const int N = c.order ? c.order : 2;
    auto nf = build_normal_form(sys, {N, c.extended});
    if (c.eps >= 0 || c.mu >= 0) check_parameters(nf, c.eps, c.mu, parse_evaluator(c.evaluator));
    fs::path p = root / golden_name(sys.name, N);
    write_file(p, dump_normal_form(nf));
    return {p};
}

std::vector<fs::path> run_estimate(const RunConfig& c, const fs::path& root) {
    auto sys = resolve_system(c.system);
    const int N = c.order ? c.order : 3;
    auto nf = build_normal_form(sys, {N, true});
    EstimateOptions opt;
    opt.evaluator = parse_evaluator(c.evaluator);
    if (c.eps >= 0 || c.mu >= 0) {
        check_parameters(nf, c.eps, c.mu, opt.evaluator);
        opt.eps_override = c.eps;
        opt.mu_override = c.mu;
    }
    auto rep = stability_report(nf, opt);
    fs::path stem = root / (sys.name + "_N" + std::to_string(N) + "_" + c.evaluator);
    fs::path txt = stem.string() + "_report.txt", js = stem.string() + "_report.json";
    write_file(txt, format_report(rep));
    write_file(js, report_json(rep).dump(2) + "\n");
    std::cout << format_report(rep);
    return {txt, js};
}

std::vector<fs::path> run_table1(const RunConfig& c, const fs::path& root) {
    const int N = c.order ? c.order : 3;
    std::vector<std::future<TableColumn>> jobs;
    for (auto& n : fixture_names()) jobs.push_back(std::async(std::launch::async, [n, N] { return table_column(fixture(n), N); }));
    std::vector<TableColumn> cols;
    for (auto& j : jobs) cols.push_back(j.get());
    nlohmann::json js = nlohmann::json::array();
    for (auto& col : cols) {
        nlohmann::json e;
        e["system"] = col.system;
        e["identities_ok"] = col.identities_ok;
        for (size_t i = 0; i < 12; ++i) {
            auto& cell = col.cells[i];
            e["cells"][table_rows()[i]] = {{"reference", cell.reference}, {"sampled", cell.sampled},
                                          {"majorant", cell.majorant}, {"within_tolerance", cell.ok}};
        }
        e["sampled"] = report_json(col.sampled);
        e["majorant"] = report_json(col.majorant);
        e["at_reference"] = report_json(col.at_reference);
        js.push_back(e);
    }
    std::string table = format_table(cols);
    fs::path txt = root / "table1.txt", jp = root / "table1.json";
    write_file(txt, table);
    write_file(jp, js.dump(2) + "\n");
    std::cout << table;
    return {txt, jp};
}

// stops once |dE/dt| stays below 1e-3 of its largest value so far for 1e3 time
// units; the rate vanishes at t = 0 for the default data, so the start is no reference
std::function<bool(double, const std::vector<double>&)> attractor_stop(std::shared_ptr<EnergyRate> rate, int ell) {
    struct S {
        double peak = 0.0, quiet_since = -1.0;
    };
    auto st = std::make_shared<S>();
    return [rate, ell, st](double t, const std::vector<double>& s) {
        double r = std::abs((*rate)(s.data(), s.data() + ell, t).second);
        st->peak = std::max(st->peak, r);
        if (st->peak > 0 && r < 1e-3 * st->peak) {
            if (st->quiet_since < 0) st->quiet_since = t;
            return t - st->quiet_since >= 1e3;
        }
        st->quiet_since = -1.0;
        return false;
    };
}

std::vector<fs::path> simulate(const DissipativeSystem& sys, const RunConfig& c, const fs::path& dir) {
    const int N = c.order ? c.order : 2;
    const double eps = c.eps >= 0 ? c.eps : 1e-3, mu = c.mu >= 0 ? c.mu : 1e-3;
    if (!(c.t_end > 0)) throw ConfigError("--t-end must be positive");
    if (!(c.stride > 0)) throw ConfigError("--stride must be positive");
    auto nf = build_normal_form(sys, {N, true});
    const int ell = sys.ell;
    // normalized initial data, pulled back for the original system
    PhaseState nic{std::vector<double>(ell, std::isnan(c.y_init) ? 1.0 + 6.0 * std::sqrt(eps) : c.y_init),
                   std::vector<double>(ell, c.x_init), 0.0, 0.0};
    PhaseState oic = StateTransform(nf, eps, mu).backward(nic);
    IntegratorOptions io;
    io.tol = c.tol;
    io.stride = c.stride;
    if (c.stop_at_attractor) io.stop = attractor_stop(std::make_shared<EnergyRate>(nf, eps, mu), ell);
    std::vector<double> n0 = nic.y, o0 = oic.y;
    n0.insert(n0.end(), nic.x.begin(), nic.x.end());
    n0.push_back(0.0);
    o0.insert(o0.end(), oic.x.begin(), oic.x.end());
    auto normalized = integrate(NormalFormField(nf, eps, mu, true), n0, 0.0, c.t_end, io, ell, true);
    IntegratorOptions oo = io;
    oo.stop = nullptr;
    auto original = integrate(OriginalField(sys, nf.eta, eps, mu), o0, 0.0, normalized.t.back(), oo, ell);
    auto energy = energy_derivative(nf, normalized, eps, mu);
    auto files = emit_figure_data(normalized, original, energy, dir, sys.name);
    return {files.lift, files.orbit, files.energy};
}

std::vector<fs::path> run_simulate(const RunConfig& c, const fs::path& root) {
    auto sys = resolve_system(c.system);
    return simulate(sys, c, root);
}

std::vector<fs::path> run_reproduce_all(const RunConfig& c, const fs::path& root) {
    std::vector<fs::path> out;
    std::vector<std::pair<std::string, int>> goldens;
    for (auto& n : fixture_names()) goldens.push_back({n, 2});
    goldens.push_back({"e20", 3});
    for (auto& [n, N] : goldens) {
        auto nf = build_normal_form(fixture(n), {N, false});
        fs::path p = root / "golden" / golden_name(n, N);
        write_file(p, dump_normal_form(nf));
        out.push_back(p);
    }
    for (auto& p : run_table1(c, root)) out.push_back(p);
    std::vector<std::future<std::vector<fs::path>>> sims;
    for (auto& n : fixture_names())
        sims.push_back(std::async(std::launch::async, [&, n] { return simulate(fixture(n), c, root / "figures"); }));
    for (auto& s : sims)
        for (auto& p : s.get()) out.push_back(p);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonant normal forms of dissipative nearly-integrable systems"};
    app.require_subcommand(1);
    RunConfig cfg;
    auto common = [&](CLI::App* s, bool params) {
        s->add_option("--system", cfg.system, "fixture name (e19, e20, A1, A2) or JSON config path");
        s->add_option("--order", cfg.order, "normalization order N")->check(CLI::Range(1, 8));
        s->add_option("--out", cfg.out, "output directory (default $RNF_OUT_ROOT or ./rnf_out)");
        if (params) {
            s->add_option("--eps", cfg.eps, "conservative parameter")->check(CLI::NonNegativeNumber);
            s->add_option("--mu", cfg.mu, "dissipative parameter")->check(CLI::NonNegativeNumber);
        }
    };
    auto* norm = app.add_subcommand("normalize", "write the normal-form dump");
    common(norm, true);
    norm->add_flag("--extended", cfg.extended, "also normalize the energy variable");
    norm->add_option("--evaluator", cfg.evaluator, "norm used for the threshold check");
    auto* est = app.add_subcommand("estimate", "stability constants and times");
    common(est, true);
    est->add_option("--evaluator", cfg.evaluator, "sampled or majorant");
    auto* tab = app.add_subcommand("table1", "four-fixture table of constants");
    tab->add_option("--order", cfg.order, "normalization order N")->check(CLI::Range(1, 8));
    tab->add_option("--out", cfg.out, "output directory");
    auto sim_opts = [&](CLI::App* s) {
        s->add_option("--t-end", cfg.t_end, "final time");
        s->add_option("--tol", cfg.tol, "integrator tolerance")->check(CLI::PositiveNumber);
        s->add_option("--stride", cfg.stride, "sample spacing");
        s->add_option("--y0", cfg.y_init, "initial normalized action (default 1 + 6 sqrt(eps))");
        s->add_option("--x0", cfg.x_init, "initial normalized angle");
        s->add_flag("--stop-at-attractor", cfg.stop_at_attractor, "stop once the energy rate has died out");
    };
    auto* sim = app.add_subcommand("simulate", "integrate both flows and write figure CSVs");
    common(sim, true);
    sim_opts(sim);
    auto* all = app.add_subcommand("reproduce-all", "golden dumps, Table 1 and figure CSVs");
    all->add_option("--out", cfg.out, "output directory");
    sim_opts(all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        fs::path root = output_root(cfg);
        std::vector<fs::path> files;
        if (cfg.command == "normalize") files = run_normalize(cfg, root);
        else if (cfg.command == "estimate") files = run_estimate(cfg, root);
        else if (cfg.command == "table1") files = run_table1(cfg, root);
        else if (cfg.command == "simulate") files = run_simulate(cfg, root);
        else files = run_reproduce_all(cfg, root);
        for (auto& f : files) std::cout << "wrote " << f.string() << "\n";
        return 0;
    } catch (const Refusal& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
