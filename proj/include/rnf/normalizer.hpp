#pragma once

// Resonant normal form of a dissipative system in two stages.
//
// Conservative stage: a mixed-variable generating function
//   psi(y~, x, t) = sum_j eps^j psi_j0,  x~ = x + psi_y,  y = y~ + psi_x,  u = u~ + psi_t
// removes the non-resonant part of the transformed Hamiltonian order by order.
//
// Dissipative stage: functions alpha, beta, gamma of the new variables,
//   x~ = X - alpha(Y, X, t),  y~ = Y - beta(Y, X, t),  u~ = U - gamma(Y, X, t),
// remove non-resonant terms at every grade with mu-power >= 1, while the
// drift eta (a function of the original variables, entering ydot as mu*eta)
// and sigma absorb the average and resonant parts.

#include <chrono>
#include <string>
#include <vector>

#include "rnf/system.hpp"

namespace rnf {

struct NormalizerOptions {
    int order = 2;
    bool extended = false;   // normalize the u-equation too (sigma, gamma)
    double zero_tol = 1e-12; // absolute threshold for computed zeros in results
};

struct ConservativeTransformation {
    std::vector<Series> psi;  // psi[j - 1] = psi_j0
    GradedSeries generating;  // sum_j eps^j psi_j0
    // backward map (y~, x~, t) -> original: x = x~ + gamma_x, y = y~ + gamma_y, u = u~ + gamma_u
    GradedVector gamma_x, gamma_y;
    GradedSeries gamma_u;
    // forward action map y~ = y + r_inverse(y, x, t), and x~ = x + angle_forward(y, x, t)
    GradedVector r_inverse, angle_forward;
};

struct DissipativeTransformation {
    GradedVector alpha, beta;
    GradedSeries gamma;
    // forward map (y~, x~, t) -> new: X = x~ + forward_x, Y = y~ + forward_y, U = u~ + forward_u
    GradedVector forward_x, forward_y;
    GradedSeries forward_u;
};

struct NormalFormResult {
    std::shared_ptr<const DissipativeSystem> system;
    int N = 0;
    bool extended = false;
    ConservativeTransformation conservative;
    DissipativeTransformation dissipative;
    DriftFunction eta;
    GradedSeries sigma;

    // complete transformed field up to order N + 1, all Fourier modes
    GradedVector xdot, ydot;
    GradedSeries udot;
    // transformed Hamiltonian of the conservative stage, grades 0..N+1
    GradedSeries hamiltonian;

    // normal form pieces, grades <= N; each holds the full eps^i mu^j weight
    GradedVector omega_d;   // averages of xdot, grade (0,0) = omega
    GradedVector eps_p_Y;   // average + resonant of xdot at grades (i, 0), i >= 1
    GradedVector eps_p_X;   // minus resonant part of ydot at grades (i, 0)
    GradedSeries eps_p_t;   // minus resonant part of udot at grades (i, 0)
    GradedVector mu_s;      // average + resonant of xdot at grades with mu-power >= 1
    GradedSeries eps_p;     // average + resonant of the Hamiltonian at grades (i, 0), i >= 1

    // truncated normal form fields (average + resonant modes, grades <= N)
    GradedVector nf_xdot, nf_ydot;
    GradedSeries nf_udot;

    // remainders: grade N+1 parts and Fourier tails beyond K (grades <= N+1)
    GradedVector F_high, G_high, F_tail, G_tail;
    GradedSeries H_high, H_tail;
    GradedSeries B_high;  // Hamiltonian grade N+1
    GradedSeries A_tail;  // Hamiltonian tail beyond K, grades <= N

    // largest coefficient left in nr modes at grades <= N, below the top Taylor
    // degree; the top degree is polluted by truncated action derivatives
    double max_nonresonant_residual = 0.0;
    double top_degree_residual = 0.0;
    double seconds = 0.0;
};

namespace detail {

inline GradedSeries lift(const Series& f, Grade g, int N) { return GradedSeries::single(f, g, N); }

// h00(y + dy) - h00(y) from omega = grad h00, as sum over |alpha| >= 1 of
// d^alpha h00 dy^alpha / alpha!
inline GradedSeries potential_increment(const std::vector<Series>& omega, const GradedVector& dy, int N) {
    const int ell = int(omega.size());
    const auto& ctx = omega[0].context();
    GradedSeries out(ctx, N);
    std::vector<std::vector<GradedSeries>> pw(ell);
    for (int v = 0; v < ell; ++v) {
        pw[v].push_back(lift(Series::constant(ctx, 1.0), {0, 0}, N));
        for (int p = 1; p <= N; ++p)
            pw[v].push_back(dy[v].empty() ? GradedSeries(ctx, N) : (pw[v].back() * dy[v]).scaled(1.0 / p));
    }
    std::vector<int> alpha(ell, 0);
    std::function<void(int, int)> rec = [&](int pos, int used) {
        if (pos == ell) {
            if (used == 0) return;
            int first = 0;
            while (alpha[first] == 0) ++first;
            Series d = omega[first];
            for (int v = 0; v < ell; ++v)
                for (int p = 0; p < alpha[v] - (v == first ? 1 : 0); ++p) d = d.diff_action(v);
            GradedSeries c = lift(d, {0, 0}, N);
            for (int v = 0; v < ell; ++v)
                if (alpha[v] > 0) c = c * pw[v][alpha[v]];
            out += c;
            return;
        }
        for (int p = 0; used + p <= N; ++p) {
            alpha[pos] = p;
            rec(pos + 1, used + p);
        }
        alpha[pos] = 0;
    };
    rec(0, 0);
    return out;
}

// h00 with grad h00 = omega, h00(y0) = 0, by integrating along the ray from y0
inline Series potential(const std::vector<Series>& omega) {
    const int ell = int(omega.size());
    const auto& ctx = omega[0].context();
    const auto& sp = *ctx->space;
    Series h(ctx);
    for (int i = 0; i < ell; ++i) {
        auto* z = omega[i].coefficient(omega[i].zero_mode());
        if (!z) continue;
        for (size_t a = 0; a < sp.size(); ++a) {
            if ((*z)[a] == cplx{}) continue;
            auto m = sp.monomials[a];
            ++m[i];
            h.add_term(h.zero_mode(), m, (*z)[a].real() / (sp.total[a] + 1), 0.0);
        }
    }
    return h;
}

struct ConservativeMaps {
    GradedVector psi_x, psi_y;
    GradedSeries psi_t;
    GradedVector gx, gy;
    GradedSeries gu;
};

inline ConservativeMaps conservative_maps(const GradedSeries& psi, int ell) {
    const int N = psi.order_cutoff();
    const auto& ctx = psi.context();
    ConservativeMaps m;
    for (int v = 0; v < ell; ++v) {
        m.psi_x.push_back(psi.diff_angle(v));
        m.psi_y.push_back(psi.diff_action(v));
    }
    m.psi_t = psi.diff_time();
    // x = x~ + gx with gx = -psi_y(y~, x~ + gx, t)
    m.gx = zeros(ctx, N, ell);
    for (int it = 0; it <= N; ++it) {
        GradedVector next;
        for (int v = 0; v < ell; ++v) next.push_back(-compose_shift(m.psi_y[v], {}, m.gx));
        m.gx = next;
    }
    for (int v = 0; v < ell; ++v) m.gy.push_back(compose_shift(m.psi_x[v], {}, m.gx));
    m.gu = compose_shift(m.psi_t, {}, m.gx);
    return m;
}

}  // namespace detail

class Normalizer {
public:
    Normalizer(std::shared_ptr<const DissipativeSystem> sys, NormalizerOptions opt)
        : sys_(std::move(sys)), opt_(opt), ell_(sys_->ell), N_(opt.order), Nt_(opt.order + 1),
          ctx_(sys_->ctx), res_(sys_->resonance) {
        if (N_ < 1 || N_ > 8) throw ConfigError("normal form order must be between 1 and 8");
    }

    NormalFormResult run() {
        auto t0 = std::chrono::steady_clock::now();
        NormalFormResult nf;
        nf.system = sys_;
        nf.N = N_;
        nf.extended = opt_.extended;

        conservative_stage(nf);
        prepare_tilde();
        dissipative_stage(nf);
        assemble(nf);
        nf.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return nf;
    }

    // one conservative order: psi_n0 from the transformed Hamiltonian with psi_{<n}
    Series conservative_step(int n, const std::vector<Series>& known) const {
        GradedSeries psi = generating(known);
        auto maps = detail::conservative_maps(psi, ell_);
        GradedSeries H = transformed_hamiltonian(psi, maps);
        Series L = H.at({n, 0}).project(Part::nonresonant_leqK, res_);
        return solve_homological(L, sys_->omega, res_).chopped(opt_.zero_tol);
    }

private:
    std::shared_ptr<const DissipativeSystem> sys_;
    NormalizerOptions opt_;
    int ell_, N_, Nt_;
    ContextPtr ctx_;
    const ResonanceStructure& res_;

    detail::ConservativeMaps maps_;
    // S(d psi) terms of the tilde field
    std::vector<std::vector<GradedSeries>> Sxx_, Sxy_, Syy_, Syx_;
    GradedVector Sxt_, Syt_, Stx_, Sty_;
    GradedSeries Stt_;
    GradedVector xs_, ys_base_;
    GradedSeries us_base_;

    GradedVector alpha_, beta_;
    GradedSeries gamma_;
    GradedVector eta_;
    GradedSeries sigma_;

    GradedSeries generating(const std::vector<Series>& psis) const {
        GradedSeries g(ctx_, Nt_);
        for (size_t i = 0; i < psis.size(); ++i) g.set({int(i) + 1, 0}, psis[i]);
        return g;
    }

    GradedSeries transformed_hamiltonian(const GradedSeries& psi, const detail::ConservativeMaps& m) const {
        // H~ = h00(y~ + gy) + eps h10(y~ + gy, x~ + gx, t) + psi_t(y~, x~ + gx, t)
        GradedSeries H = detail::lift(detail::potential(sys_->omega), {0, 0}, Nt_);
        H += detail::potential_increment(sys_->omega, m.gy, Nt_);
        H += compose_shift(detail::lift(sys_->h10, {1, 0}, Nt_), m.gy, m.gx);
        H += compose_shift(m.psi_t, {}, m.gx);
        return H;
    }

    void conservative_stage(NormalFormResult& nf) {
        std::vector<Series> psis;
        for (int n = 1; n <= N_; ++n) psis.push_back(conservative_step(n, psis));
        nf.conservative.psi = psis;
        nf.conservative.generating = generating(psis);
        maps_ = detail::conservative_maps(nf.conservative.generating, ell_);
        nf.hamiltonian = transformed_hamiltonian(nf.conservative.generating, maps_).chopped(opt_.zero_tol);
        nf.conservative.gamma_x = maps_.gx;
        nf.conservative.gamma_y = maps_.gy;
        nf.conservative.gamma_u = maps_.gu;

        // forward: y~ = y + R with R = -psi_x(y + R, x, t); x~ = x + psi_y(y + R, x, t)
        GradedVector R = zeros(ctx_, Nt_, ell_);
        for (int it = 0; it <= Nt_; ++it) {
            GradedVector next;
            for (int v = 0; v < ell_; ++v) next.push_back(-compose_shift(maps_.psi_x[v], R, {}));
            R = next;
        }
        nf.conservative.r_inverse = R;
        for (int v = 0; v < ell_; ++v)
            nf.conservative.angle_forward.push_back(compose_shift(maps_.psi_y[v], R, {}));
    }

    GradedSeries S(const GradedSeries& f) const { return compose_shift(f, {}, maps_.gx); }
    GradedSeries C(const GradedSeries& f) const { return compose_shift(f, maps_.gy, maps_.gx); }

    void prepare_tilde() {
        const auto& m = maps_;
        Sxx_.assign(ell_, {});
        Sxy_.assign(ell_, {});
        Syy_.assign(ell_, {});
        Syx_.assign(ell_, {});
        Sxt_.clear();
        Syt_.clear();
        Stx_.clear();
        Sty_.clear();
        for (int a = 0; a < ell_; ++a) {
            for (int b = 0; b < ell_; ++b) {
                Sxx_[a].push_back(S(m.psi_x[a].diff_angle(b)));
                Sxy_[a].push_back(S(m.psi_x[a].diff_action(b)));
                Syy_[a].push_back(S(m.psi_y[a].diff_action(b)));
                Syx_[a].push_back(S(m.psi_y[a].diff_angle(b)));
            }
            Sxt_.push_back(S(m.psi_x[a].diff_time()));
            Syt_.push_back(S(m.psi_y[a].diff_time()));
            Stx_.push_back(S(m.psi_t.diff_angle(a)));
            Sty_.push_back(S(m.psi_t.diff_action(a)));
        }
        Stt_ = S(m.psi_t.diff_time());

        // parts of the original field that do not involve the unknowns
        xs_.clear();
        ys_base_.clear();
        for (int a = 0; a < ell_; ++a) {
            GradedSeries xd = detail::lift(sys_->omega[a], {0, 0}, Nt_) +
                              detail::lift(sys_->h10.diff_action(a), {1, 0}, Nt_) +
                              detail::lift(sys_->f01[a], {0, 1}, Nt_);
            GradedSeries yd = detail::lift(-sys_->h10.diff_angle(a), {1, 0}, Nt_) +
                              detail::lift(-sys_->g01[a], {0, 1}, Nt_);
            xs_.push_back(C(xd));
            ys_base_.push_back(C(yd));
        }
        us_base_ = C(detail::lift(-sys_->h10.diff_time(), {1, 0}, Nt_));
    }

    struct Field {
        GradedVector x, y;
        GradedSeries u;
    };

    // field in (y~, x~, u~) for the current eta, sigma
    Field tilde_field() const {
        Field f;
        GradedVector ys;
        for (int a = 0; a < ell_; ++a) ys.push_back(ys_base_[a] + C(eta_[a].shifted({0, 1})));
        GradedSeries us = us_base_ + C(sigma_.shifted({0, 1}));

        GradedVector rhs;
        for (int a = 0; a < ell_; ++a) {
            GradedSeries r = ys[a] - Sxt_[a];
            for (int b = 0; b < ell_; ++b) r -= Sxx_[a][b] * xs_[b];
            rhs.push_back(r);
        }
        GradedVector yt = zeros(ctx_, Nt_, ell_);
        for (int it = 0; it <= Nt_ + 1; ++it) {
            GradedVector next;
            for (int a = 0; a < ell_; ++a) {
                GradedSeries r = rhs[a];
                for (int b = 0; b < ell_; ++b) r -= Sxy_[a][b] * yt[b];
                next.push_back(r);
            }
            yt = next;
        }
        for (int a = 0; a < ell_; ++a) {
            GradedSeries r = xs_[a] + Syt_[a];
            for (int b = 0; b < ell_; ++b) r += Syy_[a][b] * yt[b] + Syx_[a][b] * xs_[b];
            f.x.push_back(r);
        }
        f.y = yt;
        f.u = us - Stt_;
        for (int b = 0; b < ell_; ++b) f.u -= Stx_[b] * xs_[b] + Sty_[b] * yt[b];
        return f;
    }

    // field in (Y, X, U) for the current alpha, beta, gamma
    Field new_field(const Field& tf) const {
        GradedVector mA, mB;
        for (int a = 0; a < ell_; ++a) {
            mA.push_back(-alpha_[a]);
            mB.push_back(-beta_[a]);
        }
        GradedVector xs, ys;
        for (int a = 0; a < ell_; ++a) {
            xs.push_back(compose_shift(tf.x[a], mB, mA));
            ys.push_back(compose_shift(tf.y[a], mB, mA));
        }
        GradedSeries us = compose_shift(tf.u, mB, mA);

        Field f;
        f.x = zeros(ctx_, Nt_, ell_);
        f.y = zeros(ctx_, Nt_, ell_);
        for (int it = 0; it <= Nt_ + 1; ++it) {
            Field n;
            for (int a = 0; a < ell_; ++a) {
                GradedSeries X = xs[a] + alpha_[a].diff_time();
                GradedSeries Y = ys[a] + beta_[a].diff_time();
                for (int b = 0; b < ell_; ++b) {
                    X += alpha_[a].diff_angle(b) * f.x[b] + alpha_[a].diff_action(b) * f.y[b];
                    Y += beta_[a].diff_angle(b) * f.x[b] + beta_[a].diff_action(b) * f.y[b];
                }
                n.x.push_back(X);
                n.y.push_back(Y);
            }
            f.x = n.x;
            f.y = n.y;
        }
        f.u = us + gamma_.diff_time();
        for (int b = 0; b < ell_; ++b) f.u += gamma_.diff_angle(b) * f.x[b] + gamma_.diff_action(b) * f.y[b];
        return f;
    }

    Series homological(const Series& f) const {
        return solve_homological(f.project(Part::nonresonant_leqK, res_), sys_->omega, res_);
    }

    void dissipative_stage(NormalFormResult& nf) {
        alpha_ = zeros(ctx_, Nt_, ell_);
        beta_ = zeros(ctx_, Nt_, ell_);
        gamma_ = GradedSeries(ctx_, Nt_);
        eta_ = zeros(ctx_, Nt_, ell_);
        sigma_ = GradedSeries(ctx_, Nt_);
        for (int n = 1; n <= N_; ++n) {
            Field f = new_field(tilde_field());
            for (int i = 0; i < n; ++i) {
                Grade g{i, n - i}, ge{i, n - i - 1};
                for (int a = 0; a < ell_; ++a) {
                    Series Yg = f.y[a].at(g);
                    eta_[a].set(ge, (-Yg.project_average_resonant(res_)).chopped(opt_.zero_tol));
                    beta_[a].set(g, homological(Yg).chopped(opt_.zero_tol));
                }
                for (int a = 0; a < ell_; ++a) {
                    Series Xg = f.x[a].at(g);
                    for (int b = 0; b < ell_; ++b) Xg -= sys_->omega[a].diff_action(b) * beta_[b].at(g);
                    alpha_[a].set(g, homological(Xg).chopped(opt_.zero_tol));
                }
                if (opt_.extended) {
                    Series Ug = f.u.at(g);
                    sigma_.set(ge, (-Ug.project_average_resonant(res_)).chopped(opt_.zero_tol));
                    gamma_.set(g, homological(Ug).chopped(opt_.zero_tol));
                }
            }
        }
        nf.dissipative.alpha = alpha_;
        nf.dissipative.beta = beta_;
        nf.dissipative.gamma = gamma_;
        nf.eta = eta_;
        nf.sigma = sigma_;

        // forward map of the dissipative stage: X = x~ + alpha(y~ + Dy, x~ + Dx, t)
        GradedVector Dx = zeros(ctx_, Nt_, ell_), Dy = zeros(ctx_, Nt_, ell_);
        for (int it = 0; it <= Nt_; ++it) {
            GradedVector nx, ny;
            for (int a = 0; a < ell_; ++a) {
                nx.push_back(compose_shift(alpha_[a], Dy, Dx));
                ny.push_back(compose_shift(beta_[a], Dy, Dx));
            }
            Dx = nx;
            Dy = ny;
        }
        nf.dissipative.forward_x = Dx;
        nf.dissipative.forward_y = Dy;
        nf.dissipative.forward_u = compose_shift(gamma_, Dy, Dx);

        Field f = new_field(tilde_field());
        for (int a = 0; a < ell_; ++a) {
            nf.xdot.push_back(f.x[a].chopped(opt_.zero_tol));
            nf.ydot.push_back(f.y[a].chopped(opt_.zero_tol));
        }
        nf.udot = f.u.chopped(opt_.zero_tol);
    }

    void assemble(NormalFormResult& nf) const {
        auto low = [&](Grade g) { return g.order() <= N_; };
        auto eps_only = [&](Grade g) { return g.mu == 0 && g.eps >= 1 && g.order() <= N_; };
        auto with_mu = [&](Grade g) { return g.mu >= 1 && g.order() <= N_; };
        auto high = [&](Grade g) { return g.order() == Nt_; };
        auto ar = [&](const GradedSeries& f) {
            return f.map([&](const Series& s) { return s.project_average_resonant(res_); });
        };

        for (int a = 0; a < ell_; ++a) {
            const auto& X = nf.xdot[a];
            const auto& Y = nf.ydot[a];
            nf.omega_d.push_back(X.project(Part::average, res_).filter(low));
            nf.eps_p_Y.push_back(ar(X).filter(eps_only));
            nf.eps_p_X.push_back((-Y.project(Part::resonant_leqK, res_)).filter(eps_only) -
                                 Y.project(Part::average, res_).filter(eps_only));
            nf.mu_s.push_back(ar(X).filter(with_mu));
            nf.nf_xdot.push_back(ar(X).filter(low));
            nf.nf_ydot.push_back(ar(Y).filter(low));
            nf.F_high.push_back(X.filter(high));
            nf.G_high.push_back(Y.filter(high));
            nf.F_tail.push_back(X.project(Part::tail_gtK, res_).filter(low));
            nf.G_tail.push_back(Y.project(Part::tail_gtK, res_).filter(low));
        }
        nf.eps_p_t = (-ar(nf.udot)).filter(eps_only);
        nf.nf_udot = ar(nf.udot).filter(low);
        nf.H_high = nf.udot.filter(high);
        nf.H_tail = nf.udot.project(Part::tail_gtK, res_).filter(low);
        nf.eps_p = ar(nf.hamiltonian).filter(eps_only);
        nf.B_high = nf.hamiltonian.filter(high);
        nf.A_tail = nf.hamiltonian.project(Part::tail_gtK, res_).filter(low);

        double worst = 0.0, top = 0.0;
        const auto& sp = *ctx_->space;
        auto scan = [&](const GradedSeries& f) {
            for (auto& [g, s] : f.grades()) {
                if (g.order() > N_) continue;
                Series nr = s.project(Part::nonresonant_leqK, res_);
                for (auto& [m, z] : nr.terms())
                    for (size_t a = 0; a < sp.size(); ++a) {
                        double& w = sp.total[a] < sp.degree ? worst : top;
                        w = std::max(w, std::abs(z[a]));
                    }
            }
        };
        for (int a = 0; a < ell_; ++a) {
            scan(nf.xdot[a]);
            scan(nf.ydot[a]);
        }
        if (opt_.extended) scan(nf.udot);
        nf.max_nonresonant_residual = worst;
        nf.top_degree_residual = top;
    }
};

inline NormalFormResult build_normal_form(const DissipativeSystem& sys, NormalizerOptions opt) {
    return Normalizer(std::make_shared<DissipativeSystem>(sys), opt).run();
}

enum class StabilityCase { case_i, case_ii };

inline const char* to_string(StabilityCase c) { return c == StabilityCase::case_i ? "case_i" : "case_ii"; }

inline bool graded_vector_empty(const GradedVector& v) {
    return std::all_of(v.begin(), v.end(), [](const GradedSeries& g) { return g.empty(); });
}

// case i when the resonant conservative part p_X or the dissipative resonant part s vanishes
inline StabilityCase classify(const NormalFormResult& nf) {
    return graded_vector_empty(nf.eps_p_X) || graded_vector_empty(nf.mu_s) ? StabilityCase::case_i
                                                                          : StabilityCase::case_ii;
}

// Series of the composite change of variables as functions of (y, x, t):
// Y - y and X - x.
struct CompositeDefect {
    GradedVector dy, dx;
};

inline CompositeDefect composite_defect(const NormalFormResult& nf) {
    const auto& ct = nf.conservative;
    const auto& dt = nf.dissipative;
    CompositeDefect d;
    for (size_t a = 0; a < ct.r_inverse.size(); ++a) {
        d.dy.push_back(ct.r_inverse[a] + compose_shift(dt.forward_y[a], ct.r_inverse, ct.angle_forward));
        d.dx.push_back(ct.angle_forward[a] + compose_shift(dt.forward_x[a], ct.r_inverse, ct.angle_forward));
    }
    return d;
}

// Serialized artifact: every grade of every piece in the debug dump format.
inline std::string dump_normal_form(const NormalFormResult& nf) {
    std::string out = "# normal form of " + nf.system->name + ", order " + std::to_string(nf.N) +
                      (nf.extended ? ", extended" : "") + "\n";
    const int ell = nf.system->ell;
    for (size_t j = 0; j < nf.conservative.psi.size(); ++j)
        out += GradedSeries::single(nf.conservative.psi[j], {int(j) + 1, 0}, nf.N).dump("psi");
    auto vec = [&](const GradedVector& v, const std::string& name) {
        for (int a = 0; a < ell; ++a) out += v[a].dump(ell == 1 ? name : name + "[" + std::to_string(a) + "]");
    };
    vec(nf.dissipative.alpha, "alpha");
    vec(nf.dissipative.beta, "beta");
    out += nf.dissipative.gamma.dump("gamma");
    vec(nf.eta, "eta");
    out += nf.sigma.dump("sigma");
    vec(nf.omega_d, "omega_d");
    vec(nf.eps_p_Y, "eps_p_Y");
    vec(nf.eps_p_X, "eps_p_X");
    out += nf.eps_p_t.dump("eps_p_t");
    vec(nf.mu_s, "mu_s");
    vec(nf.nf_xdot, "Xdot");
    vec(nf.nf_ydot, "Ydot");
    out += nf.nf_udot.dump("Udot");
    return out;
}

}  // namespace rnf
