#pragma once

// Series graded by powers eps^i mu^j with i + j <= N, and substitution of
// near-identity shifts into series.

#include <functional>
#include <map>
#include <vector>

#include "rnf/series.hpp"

namespace rnf {

struct Grade {
    int eps = 0;
    int mu = 0;
    int order() const { return eps + mu; }
    auto operator<=>(const Grade&) const = default;
    bool operator==(const Grade&) const = default;
    friend Grade operator+(Grade a, Grade b) { return {a.eps + b.eps, a.mu + b.mu}; }
};

class GradedSeries {
public:
    GradedSeries() = default;
    GradedSeries(ContextPtr ctx, int N) : ctx_(std::move(ctx)), N_(N) {}

    static GradedSeries single(const Series& f, Grade g, int N) {
        GradedSeries r(f.context(), N);
        r.set(g, f);
        return r;
    }

    const ContextPtr& context() const { return ctx_; }
    int order_cutoff() const { return N_; }
    const std::map<Grade, Series>& grades() const { return grades_; }
    bool empty() const { return grades_.empty(); }

    Series at(Grade g) const {
        auto it = grades_.find(g);
        return it == grades_.end() ? Series(ctx_) : it->second;
    }
    bool has(Grade g) const { return grades_.count(g) != 0; }

    void set(Grade g, const Series& f) {
        if (g.order() > N_) return;
        if (f.empty())
            grades_.erase(g);
        else
            grades_[g] = f;
    }
    void add(Grade g, const Series& f) {
        if (g.order() > N_ || f.empty()) return;
        auto it = grades_.find(g);
        if (it == grades_.end())
            grades_.emplace(g, f);
        else {
            it->second += f;
            if (it->second.empty()) grades_.erase(it);
        }
    }

    friend GradedSeries operator+(const GradedSeries& a, const GradedSeries& b) {
        GradedSeries r = a;
        for (auto& [g, f] : b.grades_) r.add(g, f);
        return r;
    }
    friend GradedSeries operator-(const GradedSeries& a, const GradedSeries& b) { return a + (-b); }
    GradedSeries operator-() const { return scaled(-1.0); }
    GradedSeries& operator+=(const GradedSeries& b) { return *this = *this + b; }
    GradedSeries& operator-=(const GradedSeries& b) { return *this = *this - b; }

    GradedSeries scaled(double c) const {
        return map([c](const Series& f) { return f * c; });
    }

    friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b) {
        GradedSeries r(a.ctx_ ? a.ctx_ : b.ctx_, std::min(a.N_, b.N_));
        for (auto& [ga, fa] : a.grades_)
            for (auto& [gb, fb] : b.grades_) {
                Grade g = ga + gb;
                if (g.order() > r.N_) continue;
                r.add(g, fa * fb);
            }
        return r;
    }

    // grade-wise map; the result keeps only non-empty grades
    GradedSeries map(const std::function<Series(const Series&)>& fn) const {
        GradedSeries r(ctx_, N_);
        for (auto& [g, f] : grades_) r.set(g, fn(f));
        return r;
    }

    GradedSeries diff_angle(int v) const {
        return map([v](const Series& f) { return f.diff_angle(v); });
    }
    GradedSeries diff_time() const {
        return map([](const Series& f) { return f.diff_time(); });
    }
    GradedSeries diff_action(int v) const {
        return map([v](const Series& f) { return f.diff_action(v); });
    }
    GradedSeries project(Part p, const ResonanceStructure& res) const {
        return map([&](const Series& f) { return f.project(p, res); });
    }
    GradedSeries chopped(double tol) const {
        return map([tol](const Series& f) { return f.chopped(tol); });
    }

    // keeps grades satisfying the predicate
    GradedSeries filter(const std::function<bool(Grade)>& keep) const {
        GradedSeries r(ctx_, N_);
        for (auto& [g, f] : grades_)
            if (keep(g)) r.set(g, f);
        return r;
    }

    GradedSeries with_cutoff(int N) const {
        GradedSeries r(ctx_, N);
        for (auto& [g, f] : grades_) r.set(g, f);
        return r;
    }

    // multiplies every grade by eps^de mu^dm
    GradedSeries shifted(Grade d) const {
        GradedSeries r(ctx_, N_);
        for (auto& [g, f] : grades_) r.set(g + d, f);
        return r;
    }

    // sum of eps^i mu^j f_ij
    Series evaluate(double eps, double mu) const {
        Series acc(ctx_);
        for (auto& [g, f] : grades_) {
            double w = std::pow(eps, g.eps) * std::pow(mu, g.mu);
            if (w != 0.0) acc += f * w;
        }
        return acc;
    }

    bool truncated() const {
        return std::any_of(grades_.begin(), grades_.end(), [](auto& kv) { return kv.second.truncated(); });
    }

    std::string dump(const std::string& name) const {
        std::string out;
        for (auto& [g, f] : grades_) {
            out += "# " + name + " grade (" + std::to_string(g.eps) + ", " + std::to_string(g.mu) + ")\n";
            out += f.dump();
        }
        return out;
    }

private:
    ContextPtr ctx_;
    int N_ = 0;
    std::map<Grade, Series> grades_;
};

using GradedVector = std::vector<GradedSeries>;

inline GradedVector zeros(const ContextPtr& ctx, int N, int n) {
    return GradedVector(n, GradedSeries(ctx, N));
}

// F(y + dy, x + dx, t) expanded in Taylor series of the shifts, truncated at
// the order cutoff of F. Empty shift components are treated as zero.
inline GradedSeries compose_shift(const GradedSeries& F, const GradedVector& dy, const GradedVector& dx) {
    const int N = F.order_cutoff();
    const int ell = F.context() ? F.context()->ell() : 0;
    if (F.empty()) return F;
    std::vector<const GradedSeries*> shift(2 * ell, nullptr);
    for (int v = 0; v < ell; ++v) {
        if (v < int(dy.size()) && !dy[v].empty()) shift[v] = &dy[v];
        if (v < int(dx.size()) && !dx[v].empty()) shift[ell + v] = &dx[v];
    }
    for (auto* s : shift)
        if (s && s->has(Grade{0, 0})) throw StructuralError("shift has a grade (0,0) part");

    std::vector<int> active;
    for (int v = 0; v < 2 * ell; ++v)
        if (shift[v]) active.push_back(v);
    if (active.empty()) return F;

    // powers of each active shift, divided by the factorial
    std::vector<std::vector<GradedSeries>> powers(2 * ell);
    for (int v : active) {
        GradedSeries s = shift[v]->with_cutoff(N);
        powers[v].push_back(GradedSeries::single(Series::constant(F.context(), 1.0), {0, 0}, N));
        for (int p = 1; p <= N; ++p) powers[v].push_back((powers[v].back() * s).scaled(1.0 / p));
    }

    GradedSeries result = F;
    // depth-first over multi-indices alpha on the active variables
    std::function<void(size_t, int, const GradedSeries&, const GradedSeries&)> walk =
        [&](size_t pos, int used, const GradedSeries& deriv, const GradedSeries& coef) {
            if (pos == active.size()) {
                if (used > 0) result += deriv * coef;
                return;
            }
            int v = active[pos];
            GradedSeries d = deriv;
            for (int p = 0; used + p <= N; ++p) {
                if (p > 0) {
                    d = v < ell ? d.diff_action(v) : d.diff_angle(v - ell);
                    if (d.empty()) break;
                }
                GradedSeries c = p == 0 ? coef : coef * powers[v][p];
                if (c.empty()) break;
                walk(pos + 1, used + p, d, c);
            }
        };
    walk(0, 0, F, GradedSeries::single(Series::constant(F.context(), 1.0), {0, 0}, N));
    return result;
}

inline GradedSeries compose_shift(const Series& f, const GradedVector& dy, const GradedVector& dx, int N) {
    return compose_shift(GradedSeries::single(f, {0, 0}, N), dy, dx);
}

}  // namespace rnf
