#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "rnf/dynamics.hpp"

namespace rnf::testing {

inline ContextPtr small_context(double y0 = 1.01, int degree = 6, int fourier_cutoff = 40) {
    return SeriesContext::make({y0}, degree, fourier_cutoff);
}

// random series on modes of order <= max_order, Taylor degree <= max_degree
inline Series random_series(std::mt19937& rng, const ContextPtr& ctx, int max_order, int max_degree, int terms = 8) {
    std::uniform_int_distribution<int> kd(-max_order, max_order), md(0, max_degree);
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    Series f(ctx);
    for (int i = 0; i < terms; ++i) {
        int k = kd(rng), j = kd(rng);
        while (std::abs(k) + std::abs(j) > max_order) {
            k = kd(rng);
            j = kd(rng);
        }
        f.add_term(FourierMode{{k}, j}, {md(rng)}, cd(rng), cd(rng));
    }
    return f;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}


// sup over 50 points (|y - y0| <= 0.02) of |f - g|, relative to sup |g|
template <class G>
double relative_sup_error(const Series& f, G&& closed, double y0 = 1.01, unsigned seed = 7) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dy(-0.02, 0.02), ang(0.0, 2 * std::numbers::pi);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < 50; ++i) {
        double y = y0 + dy(rng), x = ang(rng), t = ang(rng);
        double c = closed(y, x, t);
        worst = std::max(worst, std::abs(f.evaluate(y, x, t) - c));
        scale = std::max(scale, std::abs(c));
    }
    return scale > 0 ? worst / scale : worst;
}

// largest coefficient difference between two series
inline double coefficient_gap(const Series& a, const Series& b) { return (a - b).max_abs_coefficient(); }

// the same below the top Taylor degree, whose coefficients are incomplete
// after an action derivative (the dropped next degree would feed them)
inline double gap_below_top_degree(const Series& a, const Series& b) {
    Series d = a - b;
    const auto& sp = *d.context()->space;
    double w = 0.0;
    for (auto& [m, z] : d.terms())
        for (size_t i = 0; i < sp.size(); ++i)
            if (sp.total[i] < sp.degree) w = std::max(w, std::abs(z[i]));
    return w;
}

inline Series reciprocal_power(const ContextPtr& ctx, int p) { return taylor_reciprocal(Series::action_power(ctx, {p})); }

}  // namespace rnf::testing
