#include "ican/curve.hpp"

#include "ican/stats.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ican {

namespace {

constexpr double kGoldenRatio = 0.6180339887498948482;

double splitmix_step(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<double>(z ^ (z >> 31));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + stream;
    (void)splitmix_step(x);
    return x;
}

double sq_dist_to(const CurvePath& path, double t, double px, double py) {
    const double du = path.u(t) - px;
    const double dv = path.v(t) - py;
    return du * du + dv * dv;
}

}  // namespace

CurvePath make_path(std::function<double(double)> u, std::function<double(double)> v,
                    double t_lo, double t_hi, int nodes) {
    if (!(t_hi > t_lo)) throw std::invalid_argument("make_path: empty parameter interval");
    if (nodes < 2) throw std::invalid_argument("make_path: need at least two grid nodes");
    CurvePath path;
    path.u = std::move(u);
    path.v = std::move(v);
    path.grid.resize(nodes);
    path.grid_u.resize(nodes);
    path.grid_v.resize(nodes);
    const double step = (t_hi - t_lo) / static_cast<double>(nodes - 1);
    for (int i = 0; i < nodes; ++i) {
        const double t = t_lo + step * i;
        path.grid[i] = t;
        path.grid_u[i] = path.u(t);
        path.grid_v[i] = path.v(t);
    }
    return path;
}

CurveModel make_curve_model(GPModel u_model, GPModel v_model, double t_lo, double t_hi,
                            int grid_nodes) {
    CurveModel curve;
    curve.t_lo = t_lo;
    curve.t_hi = t_hi;
    const double pad = 0.05 * (t_hi - t_lo);
    // The evaluators own copies so the path stays valid when the model moves.
    curve.path = make_path([m = u_model](double t) { return predict_mean(m, t); },
                           [m = v_model](double t) { return predict_mean(m, t); },
                           t_lo - pad, t_hi + pad, grid_nodes);
    curve.u_model = std::move(u_model);
    curve.v_model = std::move(v_model);
    return curve;
}

Projection project_to_curve(const CurvePath& path, double px, double py) {
    const std::size_t n = path.grid.size();
    if (n < 2) throw std::invalid_argument("project_to_curve: path has no grid");

    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double du = path.grid_u[i] - px;
        const double dv = path.grid_v[i] - py;
        const double sq = du * du + dv * dv;
        if (sq < best_sq) {
            best_sq = sq;
            best = i;
        }
    }

    // Golden-section refinement over the two cells adjacent to the argmin.
    double lo = path.grid[best == 0 ? 0 : best - 1];
    double hi = path.grid[best + 1 >= n ? n - 1 : best + 1];
    double t_best = path.grid[best];
    double a = lo, b = hi;
    double c = b - kGoldenRatio * (b - a);
    double d = a + kGoldenRatio * (b - a);
    double fc = sq_dist_to(path, c, px, py);
    double fd = sq_dist_to(path, d, px, py);
    for (int iter = 0; iter < 60 && (b - a) > 1e-12 * (1.0 + std::abs(a)); ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGoldenRatio * (b - a);
            fc = sq_dist_to(path, c, px, py);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGoldenRatio * (b - a);
            fd = sq_dist_to(path, d, px, py);
        }
    }
    const double t_ref = 0.5 * (a + b);
    const double sq_ref = sq_dist_to(path, t_ref, px, py);
    if (sq_ref < best_sq) {
        best_sq = sq_ref;
        t_best = t_ref;
    }
    return {t_best, std::sqrt(best_sq)};
}

Projection project_to_curve(const CurveModel& curve, double px, double py) {
    return project_to_curve(curve.path, px, py);
}

LatentAssignment isomap_embed_1d(std::span<const double> x, std::span<const double> y,
                                 int k_neighbors) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("isomap_embed_1d: size mismatch");
    if (k_neighbors < 1) throw std::invalid_argument("isomap_embed_1d: k must be positive");
    if (n < static_cast<std::size_t>(k_neighbors) + 1)
        throw std::invalid_argument("isomap_embed_1d: need at least k + 1 points");

    Eigen::MatrixXd dist(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            const double d = std::sqrt(dx * dx + dy * dy);
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd geo;
    int k = k_neighbors;
    while (true) {
        geo = Eigen::MatrixXd::Constant(n, n, inf);
        for (std::size_t i = 0; i < n; ++i) geo(i, i) = 0.0;

        // Symmetric kNN graph; ties broken by index for determinism.
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
                return a < b;
            });
            int added = 0;
            for (std::size_t j : idx) {
                if (j == i) continue;
                geo(i, j) = dist(i, j);
                geo(j, i) = dist(i, j);
                if (++added == k) break;
            }
        }

        // Connectivity check by BFS over finite edges.
        std::vector<char> seen(n, 0);
        std::deque<std::size_t> queue{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            for (std::size_t j = 0; j < n; ++j) {
                if (!seen[j] && std::isfinite(geo(i, j))) {
                    seen[j] = 1;
                    ++reached;
                    queue.push_back(j);
                }
            }
        }
        if (reached == n) break;
        if (static_cast<std::size_t>(k) >= n - 1)
            throw std::runtime_error("isomap_embed_1d: graph cannot be connected");
        k = std::min<int>(k + 2, static_cast<int>(n) - 1);
    }

    // All-pairs shortest paths (Floyd-Warshall).
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i) {
            const double dim = geo(i, m);
            if (!std::isfinite(dim)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const double alt = dim + geo(m, j);
                if (alt < geo(i, j)) geo(i, j) = alt;
            }
        }

    // Classical MDS: first coordinate of -1/2 J G^2 J.
    Eigen::MatrixXd g2 = geo.array().square();
    const Eigen::VectorXd row_means = g2.rowwise().mean();
    const double grand = row_means.mean();
    g2.colwise() -= row_means;
    g2.rowwise() -= row_means.transpose();
    g2.array() += grand;
    g2 *= -0.5;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g2);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("isomap_embed_1d: eigendecomposition failed");
    const Eigen::Index top = static_cast<Eigen::Index>(n) - 1;  // eigenvalues ascending
    const double lambda = std::max(eig.eigenvalues()(top), 0.0);
    const Eigen::VectorXd coord = std::sqrt(lambda) * eig.eigenvectors().col(top);

    LatentAssignment out;
    out.values.assign(coord.data(), coord.data() + coord.size());
    return out;
}

namespace {

std::vector<double> rescale_unit(const std::vector<double>& t) {
    const auto [lo_it, hi_it] = std::minmax_element(t.begin(), t.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw std::runtime_error("principal_curve_fit: degenerate embedding");
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = (t[i] - lo) / (hi - lo);
    return out;
}

double project_all(const CurvePath& path, const PairedSample& data, std::vector<double>& t_out) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Projection p = project_to_curve(path, data.x[i], data.y[i]);
        t_out[i] = p.t;
        total += p.dist;
    }
    return total;
}

}  // namespace

PrincipalCurveFit principal_curve_fit(const PairedSample& data, int max_alternations,
                                      int isomap_k, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (n < 10) throw std::invalid_argument("principal_curve_fit: need at least 10 points");
    if (sample_variance(data.x) <= 0.0 || sample_variance(data.y) <= 0.0)
        throw std::invalid_argument("principal_curve_fit: degenerate data");
    if (max_alternations < 1) throw std::invalid_argument("principal_curve_fit: need an alternation");

    std::vector<double> t = rescale_unit(isomap_embed_1d(data.x, data.y, isomap_k).values);

    PrincipalCurveFit best;
    bool have_best = false;
    double prev_obj = std::numeric_limits<double>::infinity();
    std::vector<double> t_next(n);

    for (int a = 0; a < max_alternations; ++a) {
        const std::uint64_t fit_seed = derive_seed(seed, static_cast<std::uint64_t>(a));
        GPModel u = fit_gp(t, data.x, fit_seed);
        GPModel v = fit_gp(t, data.y, fit_seed);
        const auto [lo_it, hi_it] = std::minmax_element(t.begin(), t.end());
        CurveModel curve = make_curve_model(std::move(u), std::move(v), *lo_it, *hi_it);

        const double obj = project_all(curve.path, data, t_next);
        if (obj > prev_obj) break;  // keep the log non-increasing

        best.curve = std::move(curve);
        best.latents.values = t_next;
        best.l2 = obj;
        best.objective_log.push_back(obj);
        have_best = true;

        const bool converged = std::isfinite(prev_obj) &&
                               (prev_obj - obj) < 1e-4 * std::max(prev_obj, 1e-12);
        prev_obj = obj;
        t = t_next;
        if (converged) break;
    }
    if (!have_best) throw std::runtime_error("principal_curve_fit: no alternation accepted");
    return best;
}

double bump_basis_u(std::span<const double, 2> coeffs, double t) {
    return coeffs[0] * normal_pdf(t, kBumpCenters[0], kBumpSigma) +
           coeffs[1] * normal_pdf(t, kBumpCenters[1], kBumpSigma);
}

namespace {

// Latents live on [0, 1] exactly: the reachable curve ends pin down the
// coefficient scale, which would otherwise be traded off against a latent
// shift along the exponential flanks.
CurvePath bump_path(const std::array<double, 4>& c) {
    return make_path(
        [c](double t) { return bump_basis_u(std::span<const double, 2>(c.data(), 2), t); },
        [c](double t) { return bump_basis_u(std::span<const double, 2>(c.data() + 2, 2), t); },
        0.0, 1.0, 2000);
}

// Closed-form least squares for one component against the two bump basis
// functions evaluated at the current projections.
std::array<double, 2> bump_lls(const std::vector<double>& t, const std::vector<double>& target) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = normal_pdf(t[i], kBumpCenters[0], kBumpSigma);
        design(i, 1) = normal_pdf(t[i], kBumpCenters[1], kBumpSigma);
        rhs(i) = target[i];
    }
    const Eigen::Matrix2d gram = design.transpose() * design;
    if (std::abs(gram.determinant()) < 1e-12 * std::max(1.0, gram.trace() * gram.trace()))
        throw std::runtime_error("fit_parametric_l2: singular least-squares system");
    const Eigen::Vector2d sol = gram.ldlt().solve(design.transpose() * rhs);
    return {sol(0), sol(1)};
}

}  // namespace

namespace {

// One alternation run: project onto the seeded curve, then iterate linear
// least squares against re-projection. Rounds that would worsen the
// objective are discarded, so the logged objective is non-increasing.
BumpCurveFit bump_alternation(const PairedSample& data, const std::array<double, 4>& seed,
                              int max_rounds) {
    const std::size_t n = data.size();
    std::vector<double> t(n);
    {
        const CurvePath path = bump_path(seed);
        for (std::size_t i = 0; i < n; ++i)
            t[i] = project_to_curve(path, data.x[i], data.y[i]).t;
    }

    // The least-squares step minimizes per-component squares, not the sum
    // of norms, so single rounds can tick the objective up; iterate to the
    // fixed point and keep/log improvements only.
    BumpCurveFit best;
    best.l2 = std::numeric_limits<double>::infinity();
    std::vector<double> t_next(n);
    double prev = std::numeric_limits<double>::infinity();
    for (int round = 0; round < max_rounds; ++round) {
        const auto cu = bump_lls(t, data.x);
        const auto cv = bump_lls(t, data.y);
        const std::array<double, 4> coeffs{cu[0], cu[1], cv[0], cv[1]};
        CurvePath path = bump_path(coeffs);
        const double obj = project_all(path, data, t_next);
        if (obj < best.l2) {
            best.coeffs = coeffs;
            best.latents.values = t_next;
            best.l2 = obj;
            best.path = std::move(path);
            best.objective_log.push_back(obj);
        }
        t = t_next;
        if (std::isfinite(prev) && std::abs(prev - obj) < 1e-9 * std::max(prev, 1e-12)) break;
        prev = obj;
    }
    return best;
}

}  // namespace

BumpCurveFit fit_parametric_l2(const PairedSample& data, int max_rounds) {
    const std::size_t n = data.size();
    if (n < 10) throw std::invalid_argument("fit_parametric_l2: need at least 10 points");

    // The curve ends t = 0 and t = 1 are each carried by a single basis
    // function with weight normal_pdf(0.1 sigma-units), so data extremes
    // give coefficient-scale seeds. The alternation is run from several
    // sign patterns; the embedding ordering is unreliable here because the
    // two exponential legs of the curve can almost touch.
    const double end_basis = normal_pdf(0.0, kBumpCenters[0], kBumpSigma);
    const auto [x_min_it, x_max_it] = std::minmax_element(data.x.begin(), data.x.end());
    const auto [y_min_it, y_max_it] = std::minmax_element(data.y.begin(), data.y.end());
    const double x_hi = *x_max_it / end_basis;
    const double x_lo = *x_min_it / end_basis;
    const double y_hi = *y_max_it / end_basis;
    const double y_lo = *y_min_it / end_basis;

    const std::array<std::array<double, 4>, 4> seeds{{
        {x_hi, x_hi, y_hi, y_lo},
        {x_hi, x_hi, y_lo, y_hi},
        {x_lo, x_lo, y_hi, y_lo},
        {x_hi, x_lo, y_hi, y_lo},
    }};

    BumpCurveFit best;
    best.l2 = std::numeric_limits<double>::infinity();
    for (const auto& seed : seeds) {
        try {
            BumpCurveFit candidate = bump_alternation(data, seed, max_rounds);
            if (candidate.l2 < best.l2) best = std::move(candidate);
        } catch (const std::runtime_error&) {
            continue;  // singular system from a collapsed seed
        }
    }
    if (!std::isfinite(best.l2))
        throw std::runtime_error("fit_parametric_l2: singular least-squares system");

    // Same point set is described with t -> 1-t and swapped coefficients;
    // pick the orientation with alpha2 >= beta2.
    if (best.coeffs[2] < best.coeffs[3]) {
        best.coeffs = {best.coeffs[1], best.coeffs[0], best.coeffs[3], best.coeffs[2]};
        for (double& ti : best.latents.values) ti = 1.0 - ti;
        best.path = bump_path(best.coeffs);
    }
    return best;
}

}  // namespace ican
