#pragma once

// Numerical flows of the original and normalized systems, the changes of
// variables evaluated on states, energy rates and action drift.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rnf/estimates.hpp"

namespace rnf {

// Several real series flattened for repeated pointwise evaluation: the
// Fourier phases are built once per call from powers of e^{ix}, e^{it}.
class CompiledSeries {
public:
    CompiledSeries() = default;
    explicit CompiledSeries(const std::vector<Series>& comps) {
        if (comps.empty()) return;
        ctx_ = comps[0].context();
        ell_ = ctx_->ell();
        ncomp_ = comps.size();
        const auto& sp = *ctx_->space;
        monomials_ = sp.monomials;
        max_k_.assign(ell_, 0);
        std::map<FourierMode, size_t> index;
        for (size_t c = 0; c < comps.size(); ++c) {
            for (auto& [m, z] : comps[c].terms()) {
                auto it = index.find(m);
                if (it == index.end()) {
                    it = index.emplace(m, modes_.size()).first;
                    modes_.push_back({m.k, m.j, std::vector<cplx>(ncomp_ * sp.size(), cplx{}), {}});
                    for (int v = 0; v < ell_; ++v) max_k_[v] = std::max(max_k_[v], std::abs(m.k[v]));
                    max_j_ = std::max(max_j_, std::abs(m.j));
                }
                auto& dst = modes_[it->second].z;
                for (size_t a = 0; a < sp.size(); ++a) dst[c * sp.size() + a] = z[a];
            }
        }
        nmono_ = sp.size();
        // each monomial is a lower one times a single offset
        parent_.assign(nmono_, {-1, 0});
        for (size_t a = 1; a < nmono_; ++a) {
            auto m = monomials_[a];
            int v = 0;
            while (m[v] == 0) ++v;
            --m[v];
            for (size_t b = 0; b < a; ++b)
                if (monomials_[b] == m) parent_[a] = {int(b), v};
        }
        for (auto& md : modes_) {
            md.len.assign(ncomp_, 0);
            for (size_t c = 0; c < ncomp_; ++c)
                for (size_t a = 0; a < nmono_; ++a)
                    if (md.z[c * nmono_ + a] != cplx{}) md.len[c] = a + 1;
        }
    }

    size_t components() const { return ncomp_; }

    void eval(const double* y, const double* x, double t, double* out) const {
        for (size_t c = 0; c < ncomp_; ++c) out[c] = 0.0;
        if (modes_.empty()) return;
        thread_local std::vector<double> mono;
        thread_local std::vector<std::vector<cplx>> px;
        thread_local std::vector<cplx> pt;
        mono.resize(nmono_);
        mono[0] = 1.0;
        for (size_t a = 1; a < nmono_; ++a)
            mono[a] = mono[parent_[a].first] * (y[parent_[a].second] - ctx_->y0[parent_[a].second]);
        px.resize(ell_);
        for (int d = 0; d < ell_; ++d) powers(px[d], x[d], max_k_[d]);
        powers(pt, t, max_j_);
        for (auto& m : modes_) {
            cplx ph = m.j >= 0 ? pt[m.j] : std::conj(pt[-m.j]);
            for (int d = 0; d < ell_; ++d) {
                int k = m.k[d];
                if (k) ph *= k > 0 ? px[d][k] : std::conj(px[d][-k]);
            }
            for (size_t c = 0; c < ncomp_; ++c) {
                const cplx* z = &m.z[c * nmono_];
                cplx acc{};
                for (size_t a = 0; a < m.len[c]; ++a) acc += z[a] * mono[a];
                out[c] += acc.real() * ph.real() - acc.imag() * ph.imag();
            }
        }
    }

private:
    struct Mode {
        std::vector<int> k;
        int j;
        std::vector<cplx> z;  // component-major polynomial coefficients
        std::vector<size_t> len;  // per component, one past the last nonzero
    };
    ContextPtr ctx_;
    int ell_ = 0;
    size_t ncomp_ = 0, nmono_ = 0;
    std::vector<std::vector<int>> monomials_;
    std::vector<std::pair<int, int>> parent_;
    std::vector<Mode> modes_;
    std::vector<int> max_k_;
    int max_j_ = 0;

    static void powers(std::vector<cplx>& out, double ang, int n) {
        out.resize(n + 1);
        out[0] = 1.0;
        if (n == 0) return;
        out[1] = cplx(std::cos(ang), std::sin(ang));
        for (int p = 2; p <= n; ++p) {
            // refresh periodically to bound the rounding drift of the recurrence
            out[p] = p % 8 == 0 ? cplx(std::cos(p * ang), std::sin(p * ang)) : out[p - 1] * out[1];
        }
    }
};

struct IntegrationError : std::runtime_error {
    double t;
    std::vector<double> state;
    IntegrationError(const std::string& w, double t_, std::vector<double> s)
        : std::runtime_error(w), t(t_), state(std::move(s)) {}
};

struct IntegratorOptions {
    double tol = 1e-10;
    double stride = 1.0;      // sample spacing
    double h0 = 1e-2;
    double h_min = 1e-12;
    long max_steps = 4'000'000'000L;
    // optional early stop, checked at samples
    std::function<bool(double, const std::vector<double>&)> stop;
};

struct Trajectory {
    int ell = 1;
    bool has_u = false;
    std::vector<double> t;
    std::vector<std::vector<double>> states;  // y..., x... (lifted), [u]
    long steps = 0, rejected = 0;
    double tol = 0.0;
    double max_action_offset = 0.0;  // largest |y - y0| visited (Taylor validity)

    double y(size_t i, int v = 0) const { return states[i][v]; }
    double x(size_t i, int v = 0) const { return states[i][ell + v]; }
    double u(size_t i) const { return has_u ? states[i][2 * ell] : 0.0; }
    size_t size() const { return t.size(); }
};

// Embedded Dormand-Prince 5(4) with step clipping at sample times.
template <class F>
Trajectory integrate(F&& field, std::vector<double> s, double t0, double t_end, const IntegratorOptions& opt,
                     int ell = 1, bool has_u = false) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    if (!(opt.tol > 0)) throw ConfigError("integration tolerance must be positive");
    const size_t n = s.size();
    Trajectory tr;
    tr.ell = ell;
    tr.has_u = has_u;
    tr.tol = opt.tol;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), next(n);
    double t = t0, h = std::min(opt.h0, std::max(t_end - t0, 1e-300));
    field(t, s.data(), k1.data());
    tr.t.push_back(t);
    tr.states.push_back(s);
    double next_sample = t0 + opt.stride;
    while (t < t_end) {
        double target = std::min(next_sample, t_end);
        bool clipped = false;
        const double h_free = h;
        if (t + h >= target) {
            h = target - t;
            clipped = true;
        }
        for (size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * a21 * k1[i];
        field(t + c2 * h, tmp.data(), k2.data());
        for (size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * (a31 * k1[i] + a32 * k2[i]);
        field(t + c3 * h, tmp.data(), k3.data());
        for (size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        field(t + c4 * h, tmp.data(), k4.data());
        for (size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        field(t + c5 * h, tmp.data(), k5.data());
        for (size_t i = 0; i < n; ++i)
            tmp[i] = s[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        field(t + h, tmp.data(), k6.data());
        for (size_t i = 0; i < n; ++i)
            next[i] = s[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        field(t + h, next.data(), k7.data());
        double err = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = opt.tol + opt.tol * std::max(std::abs(s[i]), std::abs(next[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) err = 1e10;
        if (err <= 1.0) {
            t = clipped ? target : t + h;
            s.swap(next);
            k1.swap(k7);
            ++tr.steps;
            if (clipped && target == next_sample) {
                tr.t.push_back(t);
                tr.states.push_back(s);
                next_sample = t0 + opt.stride * double(tr.t.size());
                if (opt.stop && opt.stop(t, s)) break;
            }
            double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            // a clipped step says nothing about the step the error allows
            h = clipped ? std::max(h_free, h * fac) : h * fac;
        } else {
            ++tr.rejected;
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
        }
        if (h < opt.h_min) throw IntegrationError("step size underflow", t, s);
        if (tr.steps + tr.rejected > opt.max_steps) throw IntegrationError("step budget exhausted", t, s);
    }
    if (tr.t.back() != t) {
        tr.t.push_back(t);
        tr.states.push_back(s);
    }
    return tr;
}

inline void record_offsets(Trajectory& tr, const std::vector<double>& y0) {
    for (auto& s : tr.states)
        for (int v = 0; v < tr.ell; ++v) tr.max_action_offset = std::max(tr.max_action_offset, std::abs(s[v] - y0[v]));
}

// ydot = -eps h10_x - mu (g01 - eta), xdot = omega + eps h10_y + mu f01
class OriginalField {
public:
    OriginalField(const DissipativeSystem& sys, const DriftFunction& eta, double eps, double mu) : ell_(sys.ell) {
        std::vector<Series> comps;
        for (int a = 0; a < ell_; ++a) {
            Series yd = sys.h10.diff_angle(a) * (-eps) - sys.g01[a] * mu;
            if (a < int(eta.size())) yd += eta[a].evaluate(eps, mu) * mu;
            comps.push_back(yd);
        }
        for (int a = 0; a < ell_; ++a) comps.push_back(sys.omega[a] + sys.h10.diff_action(a) * eps + sys.f01[a] * mu);
        cs_ = CompiledSeries(comps);
    }
    void operator()(double t, const double* s, double* ds) const { cs_.eval(s, s + ell_, t, ds); }
    int ell() const { return ell_; }

private:
    int ell_;
    CompiledSeries cs_;
};

// truncated normal form (average + resonant modes, grades <= N) in (Y, X, U)
class NormalFormField {
public:
    NormalFormField(const NormalFormResult& nf, double eps, double mu, bool with_u = false)
        : ell_(nf.system->ell), with_u_(with_u) {
        std::vector<Series> comps;
        for (auto& g : nf.nf_ydot) comps.push_back(g.evaluate(eps, mu));
        for (auto& g : nf.nf_xdot) comps.push_back(g.evaluate(eps, mu));
        if (with_u) comps.push_back(nf.nf_udot.evaluate(eps, mu));
        cs_ = CompiledSeries(comps);
    }
    void operator()(double t, const double* s, double* ds) const { cs_.eval(s, s + ell_, t, ds); }

private:
    int ell_;
    bool with_u_;
    CompiledSeries cs_;
};

struct PhaseState {
    std::vector<double> y, x;
    double u = 0.0, t = 0.0;
};

enum class Direction { forward, backward };

// The composed change of variables evaluated on states. Implicit relations
// are solved by fixed-point iteration, so forward and backward are exact
// inverses of each other for the truncated generating functions.
class StateTransform {
public:
    StateTransform(const NormalFormResult& nf, double eps, double mu) : ell_(nf.system->ell) {
        const int N = nf.N;
        auto low = [N](Grade g) { return g.order() <= N; };
        Series psi = nf.conservative.generating.filter(low).evaluate(eps, mu);
        std::vector<Series> pc;
        for (int a = 0; a < ell_; ++a) pc.push_back(psi.diff_angle(a));
        for (int a = 0; a < ell_; ++a) pc.push_back(psi.diff_action(a));
        pc.push_back(psi.diff_time());
        psi_ = CompiledSeries(pc);
        std::vector<Series> dc;
        for (int a = 0; a < ell_; ++a) dc.push_back(nf.dissipative.alpha[a].filter(low).evaluate(eps, mu));
        for (int a = 0; a < ell_; ++a) dc.push_back(nf.dissipative.beta[a].filter(low).evaluate(eps, mu));
        dc.push_back(nf.dissipative.gamma.filter(low).evaluate(eps, mu));
        diss_ = CompiledSeries(dc);
    }

    PhaseState apply(const PhaseState& s, Direction d) const { return d == Direction::forward ? forward(s) : backward(s); }

    // (y, x, u) -> (Y, X, U)
    PhaseState forward(const PhaseState& s) const {
        std::vector<double> p(2 * ell_ + 1), q(2 * ell_ + 1);
        // y = y~ + psi_x(y~, x, t)
        std::vector<double> yt = s.y;
        iterate([&] {
            psi_.eval(yt.data(), s.x.data(), s.t, p.data());
            double change = 0.0;
            for (int a = 0; a < ell_; ++a) {
                double v = s.y[a] - p[a];
                change = std::max(change, std::abs(v - yt[a]));
                yt[a] = v;
            }
            return change;
        });
        psi_.eval(yt.data(), s.x.data(), s.t, p.data());
        std::vector<double> xt(ell_);
        for (int a = 0; a < ell_; ++a) xt[a] = s.x[a] + p[ell_ + a];
        double ut = s.u - p[2 * ell_];
        // X = x~ + alpha(Y, X, t), Y = y~ + beta(Y, X, t)
        PhaseState out{yt, xt, 0.0, s.t};
        iterate([&] {
            diss_.eval(out.y.data(), out.x.data(), s.t, q.data());
            double change = 0.0;
            for (int a = 0; a < ell_; ++a) {
                double X = xt[a] + q[a], Y = yt[a] + q[ell_ + a];
                change = std::max({change, std::abs(X - out.x[a]), std::abs(Y - out.y[a])});
                out.x[a] = X;
                out.y[a] = Y;
            }
            return change;
        });
        diss_.eval(out.y.data(), out.x.data(), s.t, q.data());
        out.u = ut + q[2 * ell_];
        return out;
    }

    // (Y, X, U) -> (y, x, u)
    PhaseState backward(const PhaseState& s) const {
        std::vector<double> p(2 * ell_ + 1), q(2 * ell_ + 1);
        diss_.eval(s.y.data(), s.x.data(), s.t, q.data());
        std::vector<double> xt(ell_), yt(ell_);
        for (int a = 0; a < ell_; ++a) {
            xt[a] = s.x[a] - q[a];
            yt[a] = s.y[a] - q[ell_ + a];
        }
        double ut = s.u - q[2 * ell_];
        // x~ = x + psi_y(y~, x, t)
        std::vector<double> x = xt;
        iterate([&] {
            psi_.eval(yt.data(), x.data(), s.t, p.data());
            double change = 0.0;
            for (int a = 0; a < ell_; ++a) {
                double v = xt[a] - p[ell_ + a];
                change = std::max(change, std::abs(v - x[a]));
                x[a] = v;
            }
            return change;
        });
        psi_.eval(yt.data(), x.data(), s.t, p.data());
        PhaseState out{std::vector<double>(ell_), x, ut + p[2 * ell_], s.t};
        for (int a = 0; a < ell_; ++a) out.y[a] = yt[a] + p[a];
        return out;
    }

private:
    int ell_;
    CompiledSeries psi_, diss_;

    template <class Step>
    static void iterate(Step&& step) {
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            double c = step();
            if (c <= 1e-16 || (c >= prev && c < 1e-13)) return;
            prev = c;
        }
        throw DomainError("state transformation did not converge; parameters too large for this state");
    }
};

inline PhaseState transform_state(const NormalFormResult& nf, Direction d, const PhaseState& s, double eps,
                                  double mu) {
    return StateTransform(nf, eps, mu).apply(s, d);
}

struct EnergySample {
    double t, E, dEdt_num, dEdt_closed;
};

struct EnergyTrace {
    std::vector<EnergySample> samples;
    bool has_closed_form = false;
};

// closed-form energy rate known for some fixtures: rate(Y, X, t, eps, mu)
inline std::optional<std::function<double(double, double, double, double, double)>> closed_energy_rate(
    const std::string& name) {
    if (name == "e19")
        return [](double, double X, double t, double e, double m) { return -0.5 * e * m * (1.0 - std::cos(2 * X - 2 * t)); };
    if (name == "A1" || name == "A2") return [](double, double, double, double, double) { return 0.0; };
    return std::nullopt;
}

// E = h00(Y) + U + eps p(Y, X, t) differentiated along the truncated normal form
class EnergyRate {
public:
    EnergyRate(const NormalFormResult& nf, double eps, double mu) : ell_(nf.system->ell) {
        Series p = nf.eps_p.evaluate(eps, mu);
        Series E = detail::potential(nf.system->omega) + p;
        std::vector<Series> comps;
        comps.push_back(E);
        for (int a = 0; a < ell_; ++a) comps.push_back(E.diff_action(a));
        for (int a = 0; a < ell_; ++a) comps.push_back(E.diff_angle(a));
        comps.push_back(E.diff_time());
        for (auto& g : nf.nf_ydot) comps.push_back(g.evaluate(eps, mu));
        for (auto& g : nf.nf_xdot) comps.push_back(g.evaluate(eps, mu));
        comps.push_back(nf.nf_udot.evaluate(eps, mu));
        cs_ = CompiledSeries(comps);
        buf_.resize(comps.size());
    }
    // returns (E without U, dE/dt)
    std::pair<double, double> operator()(const double* y, const double* x, double t) const {
        cs_.eval(y, x, t, buf_.data());
        const double* g = buf_.data();
        double rate = g[1 + 2 * ell_];
        for (int a = 0; a < ell_; ++a) {
            rate += g[1 + a] * g[2 + 2 * ell_ + a];           // E_Y . Ydot
            rate += g[1 + ell_ + a] * g[2 + 3 * ell_ + a];    // E_X . Xdot
        }
        rate += g[2 + 4 * ell_];  // Udot
        return {g[0], rate};
    }

private:
    int ell_;
    CompiledSeries cs_;
    mutable std::vector<double> buf_;
};

inline EnergyTrace energy_derivative(const NormalFormResult& nf, const Trajectory& traj, double eps, double mu) {
    EnergyTrace tr;
    EnergyRate rate(nf, eps, mu);
    auto closed = closed_energy_rate(nf.system->name);
    tr.has_closed_form = closed.has_value();
    const int ell = traj.ell;
    for (size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj.states[i];
        auto [E, d] = rate(s.data(), s.data() + ell, traj.t[i]);
        double c = closed ? (*closed)(s[0], s[ell], traj.t[i], eps, mu) : std::nan("");
        tr.samples.push_back({traj.t[i], E + traj.u(i), d, c});
    }
    return tr;
}

struct DriftRecord {
    double sup_drift = 0.0;
    double bound = 0.0;
    double first_crossing = -1.0;  // time the bound was first exceeded, -1 if never
    double checked_until = 0.0;
    bool beyond_T = false;  // the trajectory runs past the guaranteed time
    bool respected = true;
};

// sup |y(t) - y(0)| over the whole trajectory against 2 C_p lambda + rho
inline DriftRecord action_drift(const Trajectory& traj, const StabilityReport& rep) {
    DriftRecord d;
    d.bound = 2.0 * rep.C_p * rep.lambda + rep.rho;
    d.checked_until = traj.t.back();
    d.beyond_T = traj.t.back() > rep.T;
    for (size_t i = 0; i < traj.size(); ++i) {
        double acc = 0.0;
        for (int v = 0; v < traj.ell; ++v) acc += std::pow(traj.y(i, v) - traj.y(0, v), 2);
        double dist = std::sqrt(acc);
        d.sup_drift = std::max(d.sup_drift, dist);
        if (dist > d.bound && d.first_crossing < 0) d.first_crossing = traj.t[i];
    }
    d.respected = d.first_crossing < 0;
    return d;
}

struct FlowComparison {
    std::vector<double> t, deviation;  // max over components of |state difference|
    double max_deviation = 0.0;
    double fitted_C = 0.0;  // max deviation / (lambda^{N+1} t_end)
    Trajectory original, normalized;
};

// Integrates both flows from matching initial data and compares the
// normalized trajectory, pulled back to the original variables, with the
// original one.
inline FlowComparison compare_flows(const DissipativeSystem& sys, const NormalFormResult& nf, const PhaseState& ic,
                                    double t_end, double eps, double mu, IntegratorOptions opt = {}) {
    const int ell = sys.ell;
    StateTransform T(nf, eps, mu);
    PhaseState nic = T.forward(ic);
    std::vector<double> s0 = ic.y, n0 = nic.y;
    s0.insert(s0.end(), ic.x.begin(), ic.x.end());
    n0.insert(n0.end(), nic.x.begin(), nic.x.end());
    FlowComparison fc;
    fc.original = integrate(OriginalField(sys, nf.eta, eps, mu), s0, ic.t, t_end, opt, ell);
    fc.normalized = integrate(NormalFormField(nf, eps, mu), n0, ic.t, t_end, opt, ell);
    const size_t n = std::min(fc.original.size(), fc.normalized.size());
    for (size_t i = 0; i < n; ++i) {
        const auto& ns = fc.normalized.states[i];
        PhaseState ps{std::vector<double>(ns.begin(), ns.begin() + ell), std::vector<double>(ns.begin() + ell, ns.end()),
                      0.0, fc.normalized.t[i]};
        PhaseState back = T.backward(ps);
        double dev = 0.0;
        for (int v = 0; v < ell; ++v) {
            dev = std::max(dev, std::abs(back.y[v] - fc.original.y(i, v)));
            dev = std::max(dev, std::abs(back.x[v] - fc.original.x(i, v)));
        }
        fc.t.push_back(fc.original.t[i]);
        fc.deviation.push_back(dev);
        fc.max_deviation = std::max(fc.max_deviation, dev);
    }
    const double lam = std::max(eps, mu);
    const double scale = std::pow(lam, nf.N + 1) * (t_end - ic.t);
    fc.fitted_C = scale > 0 ? fc.max_deviation / scale : 0.0;
    return fc;
}

struct FigureFiles {
    std::filesystem::path lift, orbit, energy;
};

// lift (t, X lifted, Y), orbit in original variables (x mod 2 pi, y), energy rate
inline FigureFiles emit_figure_data(const Trajectory& normalized, const Trajectory& original, const EnergyTrace& energy,
                                    const std::filesystem::path& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    FigureFiles f{dir / (stem + "_lift.csv"), dir / (stem + "_orbit.csv"), dir / (stem + "_energy.csv")};
    auto open = [](const std::filesystem::path& p) {
        std::ofstream o(p);
        if (!o) throw std::runtime_error("cannot write " + p.string());
        return o;
    };
    char buf[128];
    {
        auto o = open(f.lift);
        o << "t,x_lift,y\n";
        for (size_t i = 0; i < normalized.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", normalized.t[i], normalized.x(i), normalized.y(i));
            o << buf;
        }
    }
    {
        auto o = open(f.orbit);
        o << "x,y\n";
        for (size_t i = 0; i < original.size(); ++i) {
            double x = std::fmod(original.x(i), 2 * std::numbers::pi);
            if (x < 0) x += 2 * std::numbers::pi;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, original.y(i));
            o << buf;
        }
    }
    {
        auto o = open(f.energy);
        o << "t,dEdt_num,dEdt_closed\n";
        for (auto& s : energy.samples) {
            if (std::isnan(s.dEdt_closed))
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,\n", s.t, s.dEdt_num);
            else
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.t, s.dEdt_num, s.dEdt_closed);
            o << buf;
        }
    }
    return f;
}

}  // namespace rnf
