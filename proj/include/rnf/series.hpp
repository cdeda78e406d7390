#pragma once

// Sparse Fourier-Taylor series in (y, x, t): Fourier modes in the angles x and
// the time t, Taylor polynomials in the action offset y - y0.
//
// Each stored mode (k, j) is the canonical representative of its conjugate
// pair (first nonzero entry of (k..., j) positive). The coefficient is a
// polynomial z(dy) with complex values and the term means Re(z e^{i(k.x+jt)}),
// i.e. Re(z) cos + (-Im z) sin. For the zero mode only Re(z) is kept.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnf {

using cplx = std::complex<double>;

struct StructuralError : std::logic_error {
    using std::logic_error::logic_error;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct FourierMode {
    std::vector<int> k;
    int j = 0;

    int order() const {
        int s = std::abs(j);
        for (int v : k) s += std::abs(v);
        return s;
    }
    bool is_zero() const {
        return j == 0 && std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    }
    bool canonical() const {
        for (int v : k)
            if (v != 0) return v > 0;
        return j >= 0;
    }
    FourierMode operator-() const {
        FourierMode m{k, -j};
        for (auto& v : m.k) v = -v;
        return m;
    }
    friend FourierMode operator+(const FourierMode& a, const FourierMode& b) {
        FourierMode m{a.k, a.j + b.j};
        for (size_t i = 0; i < m.k.size(); ++i) m.k[i] += b.k[i];
        return m;
    }
    friend FourierMode operator-(const FourierMode& a, const FourierMode& b) { return a + (-b); }
    auto operator<=>(const FourierMode&) const = default;
    bool operator==(const FourierMode&) const = default;

    double phase(std::span<const double> x, double t) const {
        double th = j * t;
        for (size_t i = 0; i < k.size(); ++i) th += k[i] * x[i];
        return th;
    }
};

// Monomials dy^m with |m| <= degree in ell variables, with product and
// derivative tables. Shared between all series of the same (ell, degree).
class TaylorSpace {
public:
    int ell;
    int degree;
    std::vector<std::vector<int>> monomials;  // graded, then lexicographic descending
    std::vector<int> total;                   // |m| per monomial
    // products[a] lists (b, c) with monomial a * monomial b = monomial c
    std::vector<std::vector<std::pair<int, int>>> products;
    // diff[var][a] = (index of m - e_var, m_var), index -1 when m_var = 0
    std::vector<std::vector<std::pair<int, int>>> diff;

    static std::shared_ptr<const TaylorSpace> get(int ell, int degree) {
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::shared_ptr<const TaylorSpace>> cache;
        std::lock_guard lock(mu);
        auto& slot = cache[{ell, degree}];
        if (!slot) slot = std::shared_ptr<const TaylorSpace>(new TaylorSpace(ell, degree));
        return slot;
    }

    size_t size() const { return monomials.size(); }

    int index(const std::vector<int>& m) const {
        auto it = lookup_.find(m);
        return it == lookup_.end() ? -1 : it->second;
    }

private:
    std::map<std::vector<int>, int> lookup_;

    TaylorSpace(int l, int d) : ell(l), degree(d) {
        if (l < 1 || d < 0) throw StructuralError("taylor space needs ell >= 1 and degree >= 0");
        for (int deg = 0; deg <= d; ++deg) {
            std::vector<int> m(l, 0);
            enumerate(m, 0, deg);
        }
        for (size_t i = 0; i < monomials.size(); ++i) lookup_[monomials[i]] = int(i);
        products.resize(size());
        for (size_t a = 0; a < size(); ++a)
            for (size_t b = 0; b < size(); ++b) {
                if (total[a] + total[b] > d) continue;
                std::vector<int> m(l);
                for (int i = 0; i < l; ++i) m[i] = monomials[a][i] + monomials[b][i];
                products[a].emplace_back(int(b), lookup_.at(m));
            }
        diff.assign(l, std::vector<std::pair<int, int>>(size(), {-1, 0}));
        for (int v = 0; v < l; ++v)
            for (size_t a = 0; a < size(); ++a) {
                if (monomials[a][v] == 0) continue;
                auto m = monomials[a];
                --m[v];
                diff[v][a] = {lookup_.at(m), monomials[a][v]};
            }
    }

    void enumerate(std::vector<int>& m, int pos, int left) {
        if (pos == ell - 1) {
            m[pos] = left;
            monomials.push_back(m);
            total.push_back(std::accumulate(m.begin(), m.end(), 0));
            return;
        }
        for (int v = left; v >= 0; --v) {
            m[pos] = v;
            enumerate(m, pos + 1, left - v);
        }
    }
};

// Shared shape of a family of series: base point and cutoffs.
struct SeriesContext {
    std::vector<double> y0;
    int taylor_cutoff = 6;
    int fourier_cutoff = 40;
    std::shared_ptr<const TaylorSpace> space;

    static std::shared_ptr<const SeriesContext> make(std::vector<double> y0, int taylor_cutoff,
                                                     int fourier_cutoff) {
        auto c = std::make_shared<SeriesContext>();
        c->space = TaylorSpace::get(int(y0.size()), taylor_cutoff);
        c->y0 = std::move(y0);
        c->taylor_cutoff = taylor_cutoff;
        c->fourier_cutoff = fourier_cutoff;
        return c;
    }
    int ell() const { return int(y0.size()); }
    bool same_shape(const SeriesContext& o) const {
        return y0 == o.y0 && taylor_cutoff == o.taylor_cutoff && fourier_cutoff == o.fourier_cutoff;
    }
};
using ContextPtr = std::shared_ptr<const SeriesContext>;

enum class Part { average, nonresonant_leqK, resonant_leqK, tail_gtK };
enum class NormEvaluator { sampled, majorant };

inline const char* to_string(NormEvaluator e) {
    return e == NormEvaluator::sampled ? "sampled" : "majorant";
}

// Lattice of resonant modes, spanned by linearly independent integer vectors
// of length ell + 1, with the Fourier cutoff K used by the projections.
class ResonanceStructure {
public:
    std::vector<std::vector<int>> generators;
    int K = 20;
    double a = 0.0;

    ResonanceStructure() = default;
    ResonanceStructure(std::vector<std::vector<int>> gens, int K_, double a_ = 0.0)
        : generators(std::move(gens)), K(K_), a(a_) {
        if (K <= 0) throw StructuralError("resonance cutoff K must be positive");
        check_independent();
    }

    // Exact membership in the integer span of the generators.
    bool contains(const FourierMode& m) const {
        if (m.is_zero()) return true;
        if (generators.empty()) return false;
        const size_t rows = m.k.size() + 1, cols = generators.size();
        // rational Gaussian elimination on [G | v]
        std::vector<std::vector<Rat>> A(rows, std::vector<Rat>(cols + 1));
        for (size_t r = 0; r < rows; ++r) {
            for (size_t c = 0; c < cols; ++c) A[r][c] = Rat(generators[c].at(r));
            A[r][cols] = Rat(r < m.k.size() ? m.k[r] : m.j);
        }
        size_t piv_row = 0;
        std::vector<size_t> piv_col;
        for (size_t c = 0; c < cols && piv_row < rows; ++c) {
            size_t p = piv_row;
            while (p < rows && A[p][c].num == 0) ++p;
            if (p == rows) continue;
            std::swap(A[p], A[piv_row]);
            for (size_t r = 0; r < rows; ++r) {
                if (r == piv_row || A[r][c].num == 0) continue;
                Rat f = A[r][c] / A[piv_row][c];
                for (size_t cc = c; cc <= cols; ++cc) A[r][cc] = A[r][cc] - f * A[piv_row][cc];
            }
            piv_col.push_back(c);
            ++piv_row;
        }
        for (size_t r = piv_row; r < rows; ++r)
            if (A[r][cols].num != 0) return false;
        for (size_t r = 0; r < piv_row; ++r) {
            Rat coef = A[r][cols] / A[r][piv_col[r]];
            if (coef.den != 1) return false;
        }
        return true;
    }

    Part classify(const FourierMode& m) const {
        if (m.is_zero()) return Part::average;
        if (m.order() > K) return Part::tail_gtK;
        return contains(m) ? Part::resonant_leqK : Part::nonresonant_leqK;
    }

private:
    struct Rat {
        long long num = 0, den = 1;
        Rat() = default;
        explicit Rat(long long n, long long d = 1) : num(n), den(d) { reduce(); }
        void reduce() {
            if (den < 0) num = -num, den = -den;
            long long g = std::gcd(num < 0 ? -num : num, den);
            if (g > 1) num /= g, den /= g;
        }
        friend Rat operator-(Rat a, Rat b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
        friend Rat operator*(Rat a, Rat b) { return Rat(a.num * b.num, a.den * b.den); }
        friend Rat operator/(Rat a, Rat b) { return Rat(a.num * b.den, a.den * b.num); }
    };

    void check_independent() const {
        // rank over the rationals must equal the generator count
        if (generators.empty()) return;
        const size_t rows = generators[0].size(), cols = generators.size();
        for (auto& g : generators)
            if (g.size() != rows) throw StructuralError("lattice generators differ in length");
        std::vector<std::vector<Rat>> A(rows, std::vector<Rat>(cols));
        for (size_t r = 0; r < rows; ++r)
            for (size_t c = 0; c < cols; ++c) A[r][c] = Rat(generators[c][r]);
        size_t rank = 0;
        for (size_t c = 0; c < cols && rank < rows; ++c) {
            size_t p = rank;
            while (p < rows && A[p][c].num == 0) ++p;
            if (p == rows) continue;
            std::swap(A[p], A[rank]);
            for (size_t r = rank + 1; r < rows; ++r) {
                if (A[r][c].num == 0) continue;
                Rat f = A[r][c] / A[rank][c];
                for (size_t cc = c; cc < cols; ++cc) A[r][cc] = A[r][cc] - f * A[rank][cc];
            }
            ++rank;
        }
        if (rank != cols) throw StructuralError("lattice generators are linearly dependent");
    }
};

class FourierTaylorSeries {
public:
    using Poly = std::vector<cplx>;
    using TermMap = std::map<FourierMode, Poly>;

    FourierTaylorSeries() = default;
    explicit FourierTaylorSeries(ContextPtr ctx) : ctx_(std::move(ctx)) {
        if (!ctx_) throw StructuralError("series needs a context");
    }

    static FourierTaylorSeries constant(ContextPtr ctx, double c) {
        FourierTaylorSeries f(ctx);
        f.add_term(f.zero_mode(), std::vector<int>(f.ell(), 0), c, 0.0);
        return f;
    }

    // c cos(k.x + j t) + s sin(k.x + j t) times dy^m, m given as a multi-index
    static FourierTaylorSeries trig(ContextPtr ctx, FourierMode mode, std::vector<int> m, double c,
                                    double s) {
        FourierTaylorSeries f(ctx);
        f.add_term(std::move(mode), std::move(m), c, s);
        return f;
    }

    // Action monomial y^m (absolute powers) re-expanded about y0.
    static FourierTaylorSeries action_power(ContextPtr ctx, const std::vector<int>& m) {
        auto f = constant(ctx, 1.0);
        for (int v = 0; v < f.ell(); ++v) {
            FourierTaylorSeries lin(ctx);
            std::vector<int> e(f.ell(), 0);
            lin.add_term(f.zero_mode(), e, ctx->y0[v], 0.0);
            e[v] = 1;
            lin.add_term(f.zero_mode(), e, 1.0, 0.0);
            for (int p = 0; p < m.at(v); ++p) f = f * lin;
        }
        return f;
    }

    const ContextPtr& context() const { return ctx_; }
    int ell() const { return ctx_->ell(); }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    bool truncated() const { return truncated_; }
    size_t mode_count() const { return terms_.size(); }

    FourierMode zero_mode() const { return FourierMode{std::vector<int>(ell(), 0), 0}; }

    // Adds c cos + s sin at multi-index m; normalizes to the canonical mode.
    void add_term(FourierMode mode, const std::vector<int>& m, double c, double s) {
        if (int(mode.k.size()) != ell() || int(m.size()) != ell())
            throw StructuralError("term dimension does not match series");
        if (mode.order() > ctx_->fourier_cutoff) {
            truncated_ = true;
            return;
        }
        int idx = ctx_->space->index(m);
        if (idx < 0) {
            truncated_ = true;
            return;
        }
        Poly z(ctx_->space->size(), cplx{});
        z[idx] = cplx(c, -s);
        accumulate(mode, z);
        prune();
    }

    // Adds Re(z e^{i theta}) for an arbitrary (not necessarily canonical) mode.
    void add_poly(const FourierMode& mode, const Poly& z) {
        if (mode.order() > ctx_->fourier_cutoff) {
            truncated_ = true;
            return;
        }
        accumulate(mode, z);
        prune();
    }

    const Poly* coefficient(const FourierMode& mode) const {
        auto it = terms_.find(mode.canonical() ? mode : -mode);
        return it == terms_.end() ? nullptr : &it->second;
    }

    // cos and sin coefficients of dy^m on mode (canonical orientation)
    std::pair<double, double> trig_coefficient(const FourierMode& mode, const std::vector<int>& m) const {
        bool flip = !mode.canonical();
        auto* p = coefficient(mode);
        int idx = ctx_->space->index(m);
        if (!p || idx < 0) return {0.0, 0.0};
        cplx z = (*p)[idx];
        double s = -z.imag();
        return {z.real(), flip ? -s : s};
    }

    friend FourierTaylorSeries operator+(const FourierTaylorSeries& a, const FourierTaylorSeries& b) {
        a.check_compatible(b);
        FourierTaylorSeries r = a;
        r.truncated_ = a.truncated_ || b.truncated_;
        for (auto& [m, z] : b.terms_) r.accumulate(m, z);
        r.prune();
        return r;
    }
    friend FourierTaylorSeries operator-(const FourierTaylorSeries& a, const FourierTaylorSeries& b) {
        return a + (-b);
    }
    FourierTaylorSeries operator-() const { return scaled(cplx(-1.0)); }
    friend FourierTaylorSeries operator*(double c, const FourierTaylorSeries& a) { return a.scaled(cplx(c)); }
    friend FourierTaylorSeries operator*(const FourierTaylorSeries& a, double c) { return a.scaled(cplx(c)); }

    FourierTaylorSeries& operator+=(const FourierTaylorSeries& b) { return *this = *this + b; }
    FourierTaylorSeries& operator-=(const FourierTaylorSeries& b) { return *this = *this - b; }

    friend FourierTaylorSeries operator*(const FourierTaylorSeries& a, const FourierTaylorSeries& b) {
        a.check_compatible(b);
        FourierTaylorSeries r(a.ctx_);
        r.truncated_ = a.truncated_ || b.truncated_;
        const auto& sp = *a.ctx_->space;
        const int KF = a.ctx_->fourier_cutoff;
        Poly tmp(sp.size());
        for (auto& [p, A] : a.terms_)
            for (auto& [q, B] : b.terms_) {
                // Re(A e^{ip}) Re(B e^{iq}) = Re(AB e^{i(p+q)})/2 + Re(A conj(B) e^{i(p-q)})/2
                for (int pass = 0; pass < 2; ++pass) {
                    FourierMode m = pass == 0 ? p + q : p - q;
                    if (m.order() > KF) {
                        r.truncated_ = true;
                        continue;
                    }
                    std::fill(tmp.begin(), tmp.end(), cplx{});
                    bool dropped = false;
                    for (size_t ia = 0; ia < sp.size(); ++ia) {
                        if (A[ia] == cplx{}) continue;
                        for (auto [ib, ic] : sp.products[ia]) {
                            cplx bv = pass == 0 ? B[ib] : std::conj(B[ib]);
                            tmp[ic] += 0.5 * A[ia] * bv;
                        }
                        if (sp.products[ia].size() < sp.size()) dropped = true;
                    }
                    if (dropped && r.would_drop(A, B)) r.truncated_ = true;
                    r.accumulate(m, tmp);
                }
            }
        r.prune();
        return r;
    }

    FourierTaylorSeries scaled(cplx c) const {
        FourierTaylorSeries r = *this;
        for (auto& [m, z] : r.terms_)
            for (auto& v : z) v *= c;
        r.fix_zero_mode();
        r.prune();
        return r;
    }

    // d/dx_var
    FourierTaylorSeries diff_angle(int var) const {
        FourierTaylorSeries r(ctx_);
        r.truncated_ = truncated_;
        for (auto& [m, z] : terms_) {
            if (m.k.at(var) == 0) continue;
            Poly w = z;
            for (auto& v : w) v *= cplx(0.0, double(m.k[var]));
            r.terms_.emplace(m, std::move(w));
        }
        r.prune();
        return r;
    }

    FourierTaylorSeries diff_time() const {
        FourierTaylorSeries r(ctx_);
        r.truncated_ = truncated_;
        for (auto& [m, z] : terms_) {
            if (m.j == 0) continue;
            Poly w = z;
            for (auto& v : w) v *= cplx(0.0, double(m.j));
            r.terms_.emplace(m, std::move(w));
        }
        r.prune();
        return r;
    }

    // d/dy_var; lowers the Taylor degree by one
    FourierTaylorSeries diff_action(int var) const {
        const auto& sp = *ctx_->space;
        FourierTaylorSeries r(ctx_);
        r.truncated_ = truncated_;
        for (auto& [m, z] : terms_) {
            Poly w(sp.size(), cplx{});
            bool any = false;
            for (size_t a = 0; a < sp.size(); ++a) {
                auto [to, f] = sp.diff[var][a];
                if (to < 0 || z[a] == cplx{}) continue;
                w[to] += double(f) * z[a];
                any = true;
            }
            if (any) r.terms_.emplace(m, std::move(w));
        }
        r.prune();
        return r;
    }

    FourierTaylorSeries project(Part part, const ResonanceStructure& res) const {
        FourierTaylorSeries r(ctx_);
        r.truncated_ = truncated_;
        for (auto& [m, z] : terms_)
            if (res.classify(m) == part) r.terms_.emplace(m, z);
        return r;
    }

    // average plus resonant part
    FourierTaylorSeries project_average_resonant(const ResonanceStructure& res) const {
        return project(Part::average, res) + project(Part::resonant_leqK, res);
    }

    bool is_action_only() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero());
    }

    static cplx eval_poly(const TaylorSpace& sp, const Poly& z, std::span<const double> dy) {
        cplx acc{};
        if (sp.ell == 1) {
            // Horner in the single variable
            for (int a = int(z.size()) - 1; a >= 0; --a) acc = acc * dy[0] + z[a];
            return acc;
        }
        for (size_t a = 0; a < sp.size(); ++a) {
            if (z[a] == cplx{}) continue;
            double mono = 1.0;
            for (int v = 0; v < sp.ell; ++v)
                for (int p = 0; p < sp.monomials[a][v]; ++p) mono *= dy[v];
            acc += z[a] * mono;
        }
        return acc;
    }

    // Coefficient polynomial of a mode evaluated at the action y (absolute).
    cplx mode_value(const Poly& z, std::span<const double> y) const {
        std::vector<double> dy(ell());
        for (int v = 0; v < ell(); ++v) dy[v] = y[v] - ctx_->y0[v];
        return eval_poly(*ctx_->space, z, dy);
    }

    double evaluate(std::span<const double> y, std::span<const double> x, double t) const {
        std::vector<double> dy(ell());
        for (int v = 0; v < ell(); ++v) dy[v] = y[v] - ctx_->y0[v];
        double acc = 0.0;
        for (auto& [m, z] : terms_) {
            cplx c = eval_poly(*ctx_->space, z, dy);
            double th = m.phase(x, t);
            acc += c.real() * std::cos(th) - c.imag() * std::sin(th);
        }
        return acc;
    }
    double evaluate(double y, double x, double t) const {
        return evaluate(std::span<const double>(&y, 1), std::span<const double>(&x, 1), t);
    }

    // sup over the action ball of radius r of sum_modes |f_kj(y)| e^{(|k|+|j|) s}
    double norm(double r, double s, NormEvaluator ev = NormEvaluator::sampled) const {
        if (terms_.empty()) return 0.0;
        const auto& sp = *ctx_->space;
        if (ev == NormEvaluator::majorant) {
            double acc = 0.0;
            for (auto& [m, z] : terms_) {
                double w = 0.0;
                for (size_t a = 0; a < sp.size(); ++a) w += std::abs(z[a]) * std::pow(r, sp.total[a]);
                acc += w * std::exp(m.order() * s);
            }
            return acc;
        }
        double best = 0.0;
        for (auto& dy : sample_offsets(ell(), r)) {
            double acc = 0.0;
            for (auto& [m, z] : terms_) acc += std::abs(eval_poly(sp, z, dy)) * std::exp(m.order() * s);
            best = std::max(best, acc);
        }
        return best;
    }

    // Chebyshev-Lobatto points on [-r, r] per action dimension, tensor grid.
    static std::vector<std::vector<double>> sample_offsets(int ell, double r, int per_dim = 33) {
        std::vector<double> nodes(per_dim);
        for (int i = 0; i < per_dim; ++i) nodes[i] = r * std::cos(std::numbers::pi * i / (per_dim - 1));
        std::vector<std::vector<double>> pts{{}};
        for (int v = 0; v < ell; ++v) {
            std::vector<std::vector<double>> next;
            for (auto& p : pts)
                for (double n : nodes) {
                    auto q = p;
                    q.push_back(n);
                    next.push_back(std::move(q));
                }
            pts = std::move(next);
        }
        return pts;
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (auto& [mode, z] : terms_)
            for (auto& v : z) m = std::max({m, std::abs(v.real()), std::abs(v.imag())});
        return m;
    }

    // Drops every coefficient below an absolute tolerance.
    FourierTaylorSeries chopped(double tol) const {
        FourierTaylorSeries r = *this;
        for (auto& [m, z] : r.terms_)
            for (auto& v : z) {
                double re = std::abs(v.real()) < tol ? 0.0 : v.real();
                double im = std::abs(v.imag()) < tol ? 0.0 : v.imag();
                v = cplx(re, im);
            }
        r.drop_empty_modes();
        return r;
    }

    // Lines "(k..., j, m...) c s", sorted lexicographically, for c cos + s sin.
    std::string dump() const {
        struct Row {
            std::vector<int> key;
            double c, s;
        };
        std::vector<Row> rows;
        const auto& sp = *ctx_->space;
        for (auto& [m, z] : terms_)
            for (size_t a = 0; a < sp.size(); ++a) {
                if (z[a] == cplx{}) continue;
                Row row;
                row.key = m.k;
                row.key.push_back(m.j);
                row.key.insert(row.key.end(), sp.monomials[a].begin(), sp.monomials[a].end());
                row.c = z[a].real() + 0.0;
                row.s = -z[a].imag() + 0.0;
                rows.push_back(std::move(row));
            }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
        std::string out;
        char buf[96];
        for (auto& r : rows) {
            out += '(';
            for (size_t i = 0; i < r.key.size(); ++i) {
                if (i) out += ", ";
                out += std::to_string(r.key[i]);
            }
            std::snprintf(buf, sizeof buf, ") %.17g %.17g\n", r.c, r.s);
            out += buf;
        }
        return out;
    }

    void check_compatible(const FourierTaylorSeries& b) const {
        if (!ctx_ || !b.ctx_) throw StructuralError("series without context");
        if (ctx_ != b.ctx_ && !ctx_->same_shape(*b.ctx_))
            throw StructuralError("series base point or cutoffs differ");
    }

private:
    ContextPtr ctx_;
    TermMap terms_;
    bool truncated_ = false;

    void accumulate(const FourierMode& mode, const Poly& z) {
        bool flip = !mode.canonical();
        const FourierMode& key = flip ? -mode : mode;
        auto it = terms_.find(key);
        if (it == terms_.end()) it = terms_.emplace(key, Poly(ctx_->space->size(), cplx{})).first;
        bool zero = key.is_zero();
        for (size_t a = 0; a < z.size(); ++a) {
            cplx v = flip ? std::conj(z[a]) : z[a];
            if (zero) v = cplx(v.real(), 0.0);
            it->second[a] += v;
        }
    }

    void fix_zero_mode() {
        auto it = terms_.find(zero_mode());
        if (it != terms_.end())
            for (auto& v : it->second) v = cplx(v.real(), 0.0);
    }

    bool would_drop(const Poly& A, const Poly& B) const {
        const auto& sp = *ctx_->space;
        int da = -1, db = -1;
        for (size_t i = 0; i < sp.size(); ++i) {
            if (A[i] != cplx{}) da = std::max(da, sp.total[i]);
            if (B[i] != cplx{}) db = std::max(db, sp.total[i]);
        }
        return da >= 0 && db >= 0 && da + db > sp.degree;
    }

    // canonical sparse form: relative zero threshold 1e-14
    void prune() {
        double big = max_abs_coefficient();
        double tol = 1e-14 * big;
        for (auto& [m, z] : terms_)
            for (auto& v : z) {
                double re = std::abs(v.real()) <= tol ? 0.0 : v.real();
                double im = std::abs(v.imag()) <= tol ? 0.0 : v.imag();
                v = cplx(re, im);
            }
        drop_empty_modes();
    }

    void drop_empty_modes() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            bool all0 = std::all_of(it->second.begin(), it->second.end(), [](cplx v) { return v == cplx{}; });
            it = all0 ? terms_.erase(it) : std::next(it);
        }
    }
};

using Series = FourierTaylorSeries;

// Euclidean combination of component norms.
inline double vector_norm(const std::vector<Series>& v, double r, double s,
                          NormEvaluator ev = NormEvaluator::sampled) {
    double acc = 0.0;
    for (auto& f : v) {
        double n = f.norm(r, s, ev);
        acc += n * n;
    }
    return std::sqrt(acc);
}

struct SingularDivisor : std::runtime_error {
    FourierMode mode;
    double divisor;
    SingularDivisor(const FourierMode& m, double d, const std::string& what)
        : std::runtime_error(what), mode(m), divisor(d) {}
};

// 1/g about y0 for an action-only g, to the Taylor cutoff.
inline Series taylor_reciprocal(const Series& g, double floor = 0.0) {
    if (!g.is_action_only()) throw StructuralError("taylor_reciprocal needs an action-only series");
    const auto& sp = *g.context()->space;
    auto* p = g.coefficient(g.zero_mode());
    double g0 = p ? (*p)[0].real() : 0.0;
    if (std::abs(g0) <= floor || g0 == 0.0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "singular divisor %.3e at the base point", g0);
        throw SingularDivisor(g.zero_mode(), g0, buf);
    }
    // 1/g = (1/g0) sum_n (-h)^n, h = (g - g0)/g0
    Series h = g * (1.0 / g0) - Series::constant(g.context(), 1.0);
    Series acc = Series::constant(g.context(), 1.0);
    Series pw = acc;
    for (int n = 1; n <= sp.degree; ++n) {
        pw = pw * (-h);
        if (pw.empty()) break;
        acc += pw;
    }
    return acc * (1.0 / g0);
}

// Solves omega . psi_x + psi_t + L = 0 mode by mode. L must already be
// restricted to non-resonant modes up to the cutoff.
inline Series solve_homological(const Series& L, const std::vector<Series>& omega,
                                const ResonanceStructure& res) {
    Series psi(L.context());
    if (int(omega.size()) != L.ell()) throw StructuralError("frequency dimension mismatch");
    const auto ctx = L.context();
    const double floor = res.a / 2.0;
    for (auto& [m, z] : L.terms()) {
        Part part = res.classify(m);
        if (part != Part::nonresonant_leqK)
            throw StructuralError("homological input has average, resonant or tail modes");
        Series d = Series::constant(ctx, double(m.j));
        for (int v = 0; v < L.ell(); ++v)
            if (m.k[v] != 0) d += double(m.k[v]) * omega[v];
        Series inv;
        try {
            inv = taylor_reciprocal(d, floor);
        } catch (const SingularDivisor& e) {
            std::string what = "singular divisor for mode (";
            for (int v : m.k) what += std::to_string(v) + ", ";
            what += std::to_string(m.j) + ")";
            throw SingularDivisor(m, e.divisor, what);
        }
        // psi_kj = i L_kj / (omega.k + j)
        Series single(ctx);
        single.add_poly(m, z);
        psi += (single * inv).scaled(cplx(0.0, 1.0));
    }
    return psi;
}

// Tail bound of the Fourier series beyond K from the norm on a wider strip.
inline double tail_constant(int K, double sigma0, int ell) {
    double q = std::exp(-sigma0 / 2.0);
    return std::exp((K + 1) * sigma0 / 2.0) * std::pow((1.0 + q) / (1.0 - q), ell + 1);
}

inline double tail_bound(const Series& f, int K, double sigma0, double r0, double s0,
                         NormEvaluator ev = NormEvaluator::sampled) {
    if (!(sigma0 > 0.0 && sigma0 < s0)) throw DomainError("tail_bound needs 0 < sigma0 < s0");
    return tail_constant(K, sigma0, f.ell()) * f.norm(r0, s0 + sigma0, ev) * std::exp(-(K + 1) * sigma0);
}

}  // namespace rnf
