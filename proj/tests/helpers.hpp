#pragma once

// Builders and independent reference computations shared by the unit and
// acceptance binaries. Everything here is deliberately written against the
// public headers only, in a different style from the library internals, so
// the checks do not inherit the library's own mistakes.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dyslex/features.hpp"
#include "dyslex/ingest.hpp"
#include "dyslex/lasso.hpp"
#include "dyslex/matrix.hpp"
#include "dyslex/rng.hpp"

namespace testhelp {

// --- orthogonal-design regression problems --------------------------------

// Design whose columns are zero-mean, mutually orthogonal and scaled to
// ||x_j||^2 = n, so the L1 solution has the soft-threshold closed form.
struct OrthoProblem {
    dyslex::Matrix x;
    std::vector<double> y;
};

inline OrthoProblem make_ortho_problem(std::uint64_t seed, std::size_t n, std::size_t p) {
    dyslex::rng::Stream rs(seed);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (auto& c : cols)
        for (auto& v : c) v = rs.normal();

    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    // Gram-Schmidt against the intercept direction and all earlier columns
    for (std::size_t j = 0; j < p; ++j) {
        auto& c = cols[j];
        double m = 0.0;
        for (double v : c) m += v;
        m /= static_cast<double>(n);
        for (double& v : c) v -= m;
        for (std::size_t k = 0; k < j; ++k) {
            const double proj = dot(c, cols[k]) / dot(cols[k], cols[k]);
            for (std::size_t i = 0; i < n; ++i) c[i] -= proj * cols[k][i];
        }
        const double scale = std::sqrt(static_cast<double>(n) / dot(c, c));
        for (double& v : c) v *= scale;
    }

    OrthoProblem prob;
    prob.x = dyslex::Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) prob.x(i, j) = cols[j][i];

    // sparse truth plus noise and an offset, so the intercept is exercised
    prob.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.7 + 1.5 * cols[0][i] - 0.8 * cols[1][i];
        if (p > 3) v += 0.3 * cols[3][i];
        prob.y[i] = v + 0.2 * rs.normal();
    }
    return prob;
}

// Closed-form solution for an OrthoProblem: beta_j = S(x_j^T (y - ybar) / n).
inline std::vector<double> ortho_solution(const OrthoProblem& prob, double lambda) {
    const std::size_t n = prob.x.rows, p = prob.x.cols;
    double ybar = 0.0;
    for (double v : prob.y) ybar += v;
    ybar /= static_cast<double>(n);
    std::vector<double> beta(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) z += prob.x(i, j) * (prob.y[i] - ybar);
        z /= static_cast<double>(n);
        if (z > lambda) beta[j] = z - lambda;
        else if (z < -lambda) beta[j] = z + lambda;
    }
    return beta;
}

// Dense random regression problem with a planted support.
inline OrthoProblem make_noise_problem(std::uint64_t seed, std::size_t n, std::size_t p,
                                       const std::vector<std::pair<std::size_t, double>>& truth,
                                       double noise_sd) {
    dyslex::rng::Stream rs(seed);
    OrthoProblem prob;
    prob.x = dyslex::Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) prob.x(i, j) = rs.normal();
    prob.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (const auto& [j, w] : truth) v += w * prob.x(i, j);
        prob.y[i] = v + noise_sd * rs.normal();
    }
    return prob;
}

// --- reference solvers -----------------------------------------------------

// Ordinary least squares with intercept via normal equations on [1 X],
// Gaussian elimination with partial pivoting. Valid for small full-rank p.
inline std::pair<double, std::vector<double>> least_squares(const dyslex::Matrix& x,
                                                            const std::vector<double>& y) {
    const std::size_t n = x.rows, p = x.cols, m = p + 1;
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    auto aug = [&](std::size_t i, std::size_t j) -> double {
        if (j == 0) return 1.0;
        return x(i, j - 1);
    };
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t i = 0; i < n; ++i) a[r][c] += aug(i, r) * aug(i, c);
        for (std::size_t i = 0; i < n; ++i) a[r][m] += aug(i, r) * y[i];
    }
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> sol(m);
    for (std::size_t r = 0; r < m; ++r) sol[r] = a[r][m] / a[r][r];
    return {sol[0], std::vector<double>(sol.begin() + 1, sol.end())};
}

// Largest stationarity violation of the averaged L1 objective at a fit:
// active coordinates must sit exactly at +/- lambda, inactive ones inside,
// and the residual must have zero mean (free intercept).
inline double kkt_violation(const dyslex::Matrix& x, const std::vector<double>& y,
                            const dyslex::selection::LassoFit& fit) {
    const std::size_t n = x.rows, p = x.cols;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < p; ++j) pred += x(i, j) * fit.coefficients[j];
        r[i] = y[i] - pred;
    }
    double rbar = 0.0;
    for (double v : r) rbar += v;
    double viol = std::abs(rbar / static_cast<double>(n));
    for (std::size_t j = 0; j < p; ++j) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += x(i, j) * r[i];
        g /= static_cast<double>(n);
        const double b = fit.coefficients[j];
        if (b > 0.0) viol = std::max(viol, std::abs(g - fit.lambda));
        else if (b < 0.0) viol = std::max(viol, std::abs(g + fit.lambda));
        else viol = std::max(viol, std::max(0.0, std::abs(g) - fit.lambda));
    }
    return viol;
}

// --- independent movement classifier ---------------------------------------

// Brute-force reimplementation of the movement taxonomy from its documented
// rules: the line-change test first, then direction by the sign of dx with 0
// counting forward, then the length bands (short < short_max, long >
// long_min, the boundaries inclusive to medium).
inline dyslex::features::MovementClass brute_movement(double dx, double dy,
                                                      const dyslex::features::MovementThresholds& t) {
    using MC = dyslex::features::MovementClass;
    if (dx <= -t.change_line_dx_min && dy >= t.change_line_dy_min) return MC::change_of_line;
    const double len = std::sqrt(dx * dx + dy * dy);
    const bool fwd = dx >= 0.0;
    if (len < t.short_max) return fwd ? MC::short_forward : MC::short_backward;
    if (len > t.long_min) return fwd ? MC::long_forward : MC::long_backward;
    return fwd ? MC::medium_forward : MC::medium_backward;
}

// --- classifier fixtures ----------------------------------------------------

// Two Gaussian blobs at +/- sep/2 along every axis; labels +1 then -1.
inline dyslex::Matrix make_blobs(std::uint64_t seed, std::size_t n_per_class, std::size_t p,
                                 double sep, std::vector<int>& labels) {
    dyslex::rng::Stream rs(seed);
    dyslex::Matrix x(2 * n_per_class, p);
    labels.assign(2 * n_per_class, 0);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int lab = i < n_per_class ? +1 : -1;
        labels[i] = lab;
        for (std::size_t j = 0; j < p; ++j) x(i, j) = lab * sep / 2.0 + rs.normal();
    }
    return x;
}

// --- feature-table fixtures -------------------------------------------------

// Full 35-column table of standard-normal noise with one informative column
// carrying the labels at the given gap; first n_control rows are control.
inline dyslex::features::FeatureTable make_signal_table(std::uint64_t seed, std::size_t n_control,
                                                        std::size_t n_dyslexic, std::size_t signal_col,
                                                        double gap, double jitter = 0.3) {
    using dyslex::features::kFeatureCount;
    dyslex::rng::Stream rs(seed);
    dyslex::features::FeatureTable table;
    const std::size_t n = n_control + n_dyslexic;
    table.values = dyslex::Matrix(n, kFeatureCount);
    for (std::size_t i = 0; i < n; ++i) {
        const bool dys = i >= n_control;
        char id[32];
        std::snprintf(id, sizeof id, "p%03zu", i);
        table.subject_ids.push_back(id);
        table.labels.push_back(dys ? dyslex::ingest::Label::dyslexic : dyslex::ingest::Label::control);
        table.text_ids.push_back("t1");
        for (std::size_t j = 0; j < kFeatureCount; ++j) table.values(i, j) = rs.normal();
        table.values(i, signal_col) = (dys ? +1.0 : -1.0) * gap / 2.0 + jitter * rs.normal();
    }
    return table;
}

// --- layout / session fixtures ----------------------------------------------

// Uniform grid layout: per_line words of width 80 at a 100 px pitch, line
// boxes 40 px tall inside a 60 px line. Word i of line l has index
// l * per_line + i and spans x in [100 i, 100 i + 80].
inline dyslex::ingest::TextLayout grid_layout(int per_line, int lines) {
    dyslex::ingest::TextLayout layout;
    layout.line_height = 60.0;
    layout.screen_width = per_line * 100.0 + 100.0;
    layout.screen_height = lines * 60.0 + 200.0;
    for (int l = 0; l < lines; ++l) {
        for (int i = 0; i < per_line; ++i) {
            dyslex::ingest::WordBox box;
            box.index = l * per_line + i;
            box.line = l;
            box.x_min = 100.0 * i;
            box.x_max = 100.0 * i + 80.0;
            box.y_min = 60.0 * l + 10.0;
            box.y_max = 60.0 * l + 50.0;
            layout.words.push_back(box);
        }
    }
    layout.validate();
    return layout;
}

// Session visiting the given points in order, 100 ms fixations 25 ms apart.
inline dyslex::ingest::ReadingSession session_from_points(
    const std::vector<std::pair<double, double>>& points, const std::string& subject = "s1",
    dyslex::ingest::Label label = dyslex::ingest::Label::control) {
    dyslex::ingest::ReadingSession s;
    s.subject_id = subject;
    s.label = label;
    s.text_id = "t1";
    double t = 0.0;
    for (const auto& [x, y] : points) {
        s.fixations.push_back({x, y, t, t + 100.0, std::nullopt});
        t += 125.0;
    }
    return s;
}

// --- file utilities ---------------------------------------------------------

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Fresh directory under the system temp root; callers may leave it behind.
inline std::string fresh_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    static std::uint64_t counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("dyslex_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    fs::create_directories(dir);
    return dir.string();
}

}  // namespace testhelp
