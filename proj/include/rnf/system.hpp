#pragma once

// Dissipative nearly-integrable systems
//   xdot = omega(y) + eps h10_y + mu f01
//   ydot = -eps h10_x - mu (g01 - eta)
//   udot = -eps h10_t + mu sigma
// built from a JSON description, plus the bundled example systems.

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rnf/graded.hpp"

namespace rnf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainRadii {
    double r0 = 0.05, r0_tilde = 0.049, r0_tilde_prime = 0.0245, R0 = 0.024;
    double s0 = 0.1, s0_tilde = 0.005, S0 = 0.0025;
    double delta = 0.01;

    double delta0() const { return s0 - s0_tilde; }
    double delta0_tilde() const { return s0_tilde / 2.0; }

    void validate() const {
        if (!(r0 > r0_tilde && r0_tilde > r0_tilde_prime && r0_tilde_prime > R0 && R0 > 0))
            throw ConfigError("action radii must satisfy r0 > r0~ > r0~' > R0 > 0");
        if (!(s0 > s0_tilde && s0_tilde > S0 && S0 > 0))
            throw ConfigError("strip radii must satisfy s0 > s0~ > S0 > 0");
        if (!(delta > 0)) throw ConfigError("delta must be positive");
    }
};

struct QuasiConvexityData {
    double L = 1.0;
    double M = 1.0;
    double m = 1.0;
    double h00_third = 0.0;  // sup norm of the third derivative of h00 on the r0 ball
};

struct DissipativeSystem {
    std::string name;
    int ell = 1;
    ContextPtr ctx;
    std::vector<Series> omega;  // action-only
    Series h10;
    std::vector<Series> f01;
    std::vector<Series> g01;
    std::vector<double> x0;
    ResonanceStructure resonance;
    DomainRadii radii;
    QuasiConvexityData qc;
    std::vector<FourierMode> margin_modes;  // modes attaining the non-resonance margin
    std::string source;                     // the JSON text it was built from

    const std::vector<double>& y0() const { return ctx->y0; }
};

using DriftFunction = GradedVector;  // eta components; grade (i, j) multiplies eps^i mu^j inside eta

namespace detail {

inline std::vector<int> int_vec(const nlohmann::json& j, size_t n, const char* what) {
    auto v = j.get<std::vector<int>>();
    if (v.size() != n) throw ConfigError(std::string(what) + " has the wrong length");
    return v;
}

// terms: [{"k": [...], "j": int, "deg": [...], "cos": c, "sin": s}], powers of y are absolute
inline Series parse_terms(const nlohmann::json& arr, const ContextPtr& ctx) {
    Series f(ctx);
    const int ell = ctx->ell();
    for (auto& t : arr) {
        FourierMode m{t.contains("k") ? int_vec(t["k"], ell, "k") : std::vector<int>(ell, 0),
                      t.value("j", 0)};
        auto deg = t.contains("deg") ? int_vec(t["deg"], ell, "deg") : std::vector<int>(ell, 0);
        double c = t.value("cos", 0.0), s = t.value("sin", 0.0);
        if (t.contains("coeff")) c += t["coeff"].get<double>();
        Series trig = Series::trig(ctx, m, std::vector<int>(ell, 0), c, s);
        f += trig * Series::action_power(ctx, deg);
    }
    return f;
}

inline std::vector<Series> parse_vector(const nlohmann::json& j, const ContextPtr& ctx, const char* what) {
    std::vector<Series> out;
    if (!j.is_array() || int(j.size()) != ctx->ell())
        throw ConfigError(std::string(what) + " needs one term list per action component");
    for (auto& comp : j) out.push_back(parse_terms(comp, ctx));
    return out;
}

}  // namespace detail

// Minimum of |omega(y).k + j| over non-lattice modes with |k|+|j| <= K and
// 33 sample actions per dimension within radius r of y0.
inline double nonresonance_margin(const std::vector<Series>& omega, const ResonanceStructure& res, double r,
                                  std::vector<FourierMode>* argmin = nullptr) {
    const int ell = int(omega.size());
    const auto& ctx = omega.at(0).context();
    std::vector<std::vector<double>> freqs;
    for (auto& dy : Series::sample_offsets(ell, r)) {
        std::vector<double> y(ell), x(ell, 0.0), w(ell);
        for (int v = 0; v < ell; ++v) y[v] = ctx->y0[v] + dy[v];
        for (int v = 0; v < ell; ++v) w[v] = omega[v].evaluate(y, x, 0.0);
        freqs.push_back(w);
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> k(ell, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == ell) {
            for (int j = -left; j <= left; ++j) {
                FourierMode m{k, j};
                if (!m.canonical() || m.is_zero() || res.contains(m)) continue;
                double lo = std::numeric_limits<double>::infinity();
                for (auto& w : freqs) {
                    double d = j;
                    for (int v = 0; v < ell; ++v) d += w[v] * k[v];
                    lo = std::min(lo, std::abs(d));
                }
                if (lo < best - 1e-15) {
                    best = lo;
                    if (argmin) argmin->assign(1, m);
                } else if (argmin && std::abs(lo - best) <= 1e-15) {
                    argmin->push_back(m);
                }
            }
            return;
        }
        for (int v = -left; v <= left; ++v) {
            k[pos] = v;
            rec(pos + 1, left - std::abs(v));
        }
        k[pos] = 0;
    };
    rec(0, res.K);
    return best;
}

inline DissipativeSystem build_system(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config does not parse: ") + e.what());
    }
    DissipativeSystem sys;
    try {
        sys.source = json_text;
        sys.name = j.value("name", "custom");
        sys.ell = j.at("ell").get<int>();
        if (sys.ell < 1) throw ConfigError("ell must be at least 1");
        auto y0 = j.at("y0").get<std::vector<double>>();
        if (int(y0.size()) != sys.ell) throw ConfigError("y0 has the wrong length");
        int D = j.value("taylor_cutoff", 6);
        int K = j.value("K", 20);
        int KF = j.value("fourier_cutoff", 2 * K);
        if (D < 1 || K < 1 || KF < K) throw ConfigError("cutoffs must satisfy D >= 1, K >= 1, K_F >= K");
        sys.ctx = SeriesContext::make(y0, D, KF);
        sys.x0 = j.value("x0", std::vector<double>(sys.ell, 0.0));

        for (auto& comp : j.at("omega")) {
            Series w(sys.ctx);
            for (auto& t : comp) {
                auto deg = detail::int_vec(t.at("deg"), sys.ell, "deg");
                w += t.at("coeff").get<double>() * Series::action_power(sys.ctx, deg);
            }
            sys.omega.push_back(w);
        }
        if (int(sys.omega.size()) != sys.ell) throw ConfigError("omega needs ell components");
        sys.h10 = j.contains("h10") ? detail::parse_terms(j["h10"], sys.ctx) : Series(sys.ctx);
        sys.f01 = j.contains("f01") ? detail::parse_vector(j["f01"], sys.ctx, "f01")
                                    : std::vector<Series>(sys.ell, Series(sys.ctx));
        sys.g01 = j.contains("g01") ? detail::parse_vector(j["g01"], sys.ctx, "g01")
                                    : std::vector<Series>(sys.ell, Series(sys.ctx));

        if (j.contains("radii")) {
            auto& r = j["radii"];
            auto& d = sys.radii;
            d.r0 = r.value("r0", d.r0);
            d.r0_tilde = r.value("r0_tilde", d.r0_tilde);
            d.r0_tilde_prime = r.value("r0_tilde_prime", d.r0_tilde_prime);
            d.R0 = r.value("R0", d.R0);
            d.s0 = r.value("s0", d.s0);
            d.s0_tilde = r.value("s0_tilde", d.s0_tilde);
            d.S0 = r.value("S0", d.S0);
            d.delta = r.value("delta", d.delta);
        }
        sys.radii.validate();
        if (j.contains("quasi_convexity")) {
            auto& q = j["quasi_convexity"];
            sys.qc.L = q.value("L", sys.qc.L);
            sys.qc.M = q.value("M", sys.qc.M);
            sys.qc.m = q.value("m", sys.qc.m);
        }
        if (!(sys.qc.L > 0 && sys.qc.M > 0 && sys.qc.m > 0)) throw ConfigError("L, M, m must be positive");

        std::vector<std::vector<int>> gens;
        for (auto& g : j.value("lattice", nlohmann::json::array()))
            gens.push_back(detail::int_vec(g, sys.ell + 1, "lattice generator"));
        try {
            sys.resonance = ResonanceStructure(gens, K);
        } catch (const StructuralError& e) {
            throw ConfigError(e.what());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    // omega must be a gradient: symmetric Jacobian on the Taylor truncation
    for (int a = 0; a < sys.ell; ++a)
        for (int b = a + 1; b < sys.ell; ++b) {
            Series d = sys.omega[a].diff_action(b) - sys.omega[b].diff_action(a);
            if (d.max_abs_coefficient() > 1e-12) throw ConfigError("omega is not the gradient of a function");
        }
    for (auto* f : {&sys.h10})
        if (!f->empty() && f->context() != sys.ctx) throw ConfigError("internal context mismatch");

    double a = nonresonance_margin(sys.omega, sys.resonance, sys.radii.r0, &sys.margin_modes);
    if (!(a > 1e-12)) {
        std::string msg = "non-lattice modes are resonant on the domain:";
        for (auto& m : sys.margin_modes) {
            msg += " (";
            for (int v : m.k) msg += std::to_string(v) + ",";
            msg += std::to_string(m.j) + ")";
        }
        throw ConfigError(msg);
    }
    nlohmann::json j2 = nlohmann::json::parse(json_text);
    if (j2.contains("a")) {
        double want = j2["a"].get<double>();
        if (a < want) throw ConfigError("non-resonance margin below the requested a");
        a = want;
    }
    sys.resonance.a = a;
    return sys;
}

inline DissipativeSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return build_system(ss.str());
}

// Bundled example systems. The text is also shipped under data/fixtures.
inline std::string fixture_json(const std::string& name) {
    const std::string common = R"(
  "ell": 1,
  "y0": [1.01],
  "x0": [0.0],
  "taylor_cutoff": 6,
  "K": 20,
  "fourier_cutoff": 40,
  "lattice": [[1, -1]],
  "omega": [[{"deg": [1], "coeff": 1.0}]],
  "g01": [[{"k": [0], "j": 0, "deg": [1], "cos": 1.0}]],
  "radii": {"r0": 0.05, "r0_tilde": 0.049, "r0_tilde_prime": 0.0245, "R0": 0.024,
            "s0": 0.1, "s0_tilde": 0.005, "S0": 0.0025, "delta": 0.01},
  "quasi_convexity": {"L": 1.0, "M": 1.0, "m": 1.0},)";
    const std::string h_slow = R"(
  "h10": [{"k": [1], "j": -1, "deg": [0], "cos": -1.0},
          {"k": [1], "j": 0, "deg": [0], "cos": -1.0}],)";
    const std::string h_fast = R"(
  "h10": [{"k": [1], "j": -6, "deg": [0], "cos": -1.0},
          {"k": [1], "j": 0, "deg": [0], "cos": -1.0}],)";
    const std::string f_pair = R"(
  "f01": [[{"k": [1], "j": -1, "deg": [0], "sin": -1.0},
           {"k": [1], "j": 0, "deg": [0], "sin": -1.0}]]
})";
    const std::string f_angle = R"(
  "f01": [[{"k": [1], "j": 0, "deg": [0], "sin": -1.0}]]
})";
    const std::string f_time = R"(
  "f01": [[{"k": [0], "j": 6, "deg": [0], "sin": -1.0}]]
})";
    if (name == "e19") return "{\n  \"name\": \"e19\"," + common + h_slow + f_pair + "\n";
    if (name == "e20") return "{\n  \"name\": \"e20\"," + common + h_slow + f_angle + "\n";
    if (name == "A1") return "{\n  \"name\": \"A1\"," + common + h_fast + f_pair + "\n";
    if (name == "A2") return "{\n  \"name\": \"A2\"," + common + h_slow + f_time + "\n";
    throw ConfigError("unknown fixture " + name);
}

inline const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names{"e19", "e20", "A1", "A2"};
    return names;
}

inline DissipativeSystem fixture(const std::string& name) { return build_system(fixture_json(name)); }

// fixture name or path to a JSON config
inline DissipativeSystem resolve_system(const std::string& what) {
    for (auto& n : fixture_names())
        if (n == what) return fixture(n);
    return load_system(what);
}

struct FieldValue {
    std::vector<double> ydot, xdot;
    bool outside_domain = false;
};

inline FieldValue eval_vector_field(const DissipativeSystem& sys, const DriftFunction& eta,
                                    std::span<const double> y, std::span<const double> x, double t, double eps,
                                    double mu) {
    FieldValue out;
    out.ydot.assign(sys.ell, 0.0);
    out.xdot.assign(sys.ell, 0.0);
    for (int v = 0; v < sys.ell; ++v) {
        if (std::abs(y[v] - sys.y0()[v]) > sys.radii.r0) out.outside_domain = true;
        double eta_v = 0.0;
        if (v < int(eta.size()))
            for (auto& [g, f] : eta[v].grades())
                eta_v += std::pow(eps, g.eps) * std::pow(mu, g.mu) * f.evaluate(y, x, t);
        out.xdot[v] = sys.omega[v].evaluate(y, x, t) + eps * sys.h10.diff_action(v).evaluate(y, x, t) +
                      mu * sys.f01[v].evaluate(y, x, t);
        out.ydot[v] = -eps * sys.h10.diff_angle(v).evaluate(y, x, t) - mu * (sys.g01[v].evaluate(y, x, t) - eta_v);
    }
    return out;
}

}  // namespace rnf
