#include "roughpath/norms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "roughpath/random.hpp"

namespace rp {

std::string to_string(CrossnormKind kind) {
    switch (kind) {
        case CrossnormKind::hilbert: return "hilbert";
        case CrossnormKind::projective: return "projective";
        case CrossnormKind::injective: return "injective";
    }
    return "unknown";
}

CrossnormKind crossnorm_from_string(const std::string& name) {
    if (name == "hilbert") return CrossnormKind::hilbert;
    if (name == "projective") return CrossnormKind::projective;
    if (name == "injective") return CrossnormKind::injective;
    throw std::invalid_argument("unknown crossnorm kind '" + name + "'");
}

namespace {

double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double l1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

void check_block(std::span<const double> block, int d, int k) {
    if (k < 1) throw std::invalid_argument("level_norm: level must be >= 1");
    if (d < 1) throw std::invalid_argument("level_norm: dimension must be >= 1");
    if (block.size() != ipow(static_cast<std::size_t>(d), k)) throw std::invalid_argument("level_norm: block size is not d^k");
}

// digits[idx * k + j] is the 0-based letter of mode j in flat index idx.
std::vector<int> digit_table(int d, int k) {
    const std::size_t n = ipow(static_cast<std::size_t>(d), k);
    std::vector<int> digits(n * static_cast<std::size_t>(k));
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t rest = idx;
        for (int j = k - 1; j >= 0; --j) {
            digits[idx * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(d));
            rest /= static_cast<std::size_t>(d);
        }
    }
    return digits;
}

void normalize(std::vector<double>& v) {
    const double n = euclid(v);
    if (n > 0.0) {
        for (double& x : v) x /= n;
    }
}

Eigen::MatrixXd as_matrix(std::span<const double> block, int d) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m(i, j) = block[static_cast<std::size_t>(i * d + j)];
    }
    return m;
}

std::vector<double> column(const Eigen::MatrixXd& m, int c) {
    std::vector<double> v(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, c);
    return v;
}

// Start vectors: the per-mode slice norms, then random Gaussian directions.
std::vector<std::vector<std::vector<double>>> starts(std::span<const double> block, int d, int k, int restarts, Rng& rng) {
    const auto digits = digit_table(d, k);
    std::vector<std::vector<double>> slice(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (std::size_t idx = 0; idx < block.size(); ++idx) {
        for (int j = 0; j < k; ++j) {
            slice[static_cast<std::size_t>(j)][static_cast<std::size_t>(digits[idx * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)])] += block[idx] * block[idx];
        }
    }
    for (auto& v : slice) {
        for (double& x : v) x = std::sqrt(x);
        normalize(v);
    }
    std::vector<std::vector<std::vector<double>>> out{slice};
    for (int r = 0; r < restarts; ++r) {
        std::vector<std::vector<double>> u(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(d)));
        for (auto& v : u) {
            for (double& x : v) x = rng.normal();
            normalize(v);
        }
        out.push_back(std::move(u));
    }
    return out;
}

RankOneTerm best_over_starts(std::span<const double> block, int d, int k, const CrossnormOptions& options, Rng& rng) {
    RankOneTerm best;
    for (auto& s : starts(block, d, k, options.restarts, rng)) {
        RankOneTerm cand = best_rank_one(block, d, k, std::move(s), options.max_sweeps);
        if (best.factors.empty() || std::abs(cand.sigma) > std::abs(best.sigma)) best = std::move(cand);
    }
    return best;
}

}  // namespace

RankOneTerm best_rank_one(std::span<const double> block, int d, int k, std::vector<std::vector<double>> u, int max_sweeps) {
    check_block(block, d, k);
    if (static_cast<int>(u.size()) != k) throw std::invalid_argument("best_rank_one: need k start vectors");
    const auto digits = digit_table(d, k);
    const std::size_t K = static_cast<std::size_t>(k);
    double sigma = 0.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double norm_v = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            std::vector<double> v(static_cast<std::size_t>(d), 0.0);
            for (std::size_t idx = 0; idx < block.size(); ++idx) {
                double p = block[idx];
                for (std::size_t i = 0; i < K; ++i) {
                    if (i != j) p *= u[i][static_cast<std::size_t>(digits[idx * K + i])];
                }
                v[static_cast<std::size_t>(digits[idx * K + j])] += p;
            }
            norm_v = euclid(v);
            if (norm_v > 0.0) {
                for (double& x : v) x /= norm_v;
                u[j] = std::move(v);
            }
        }
        const double prev = sigma;
        sigma = norm_v;
        if (sweep > 0 && std::abs(sigma - prev) <= 1e-15 * std::max(1.0, sigma)) break;
    }
    // Recompute the pairing so the sign is carried by sigma.
    double pairing = 0.0;
    for (std::size_t idx = 0; idx < block.size(); ++idx) {
        double p = block[idx];
        for (std::size_t i = 0; i < K; ++i) p *= u[i][static_cast<std::size_t>(digits[idx * K + i])];
        pairing += p;
    }
    return {pairing, std::move(u)};
}

CrossnormBound level_norm_bound(std::span<const double> block, int d, int k, CrossnormKind kind,
                                const CrossnormOptions& options) {
    check_block(block, d, k);
    CrossnormBound out;
    if (kind == CrossnormKind::hilbert || k == 1) {
        out.value = euclid(block);
        return out;
    }
    if (k == 2) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_matrix(block, d), Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        if (kind == CrossnormKind::injective) {
            out.value = s(0);
            out.terms.push_back({s(0), {column(svd.matrixU(), 0), column(svd.matrixV(), 0)}});
        } else {
            for (int r = 0; r < s.size(); ++r) {
                out.value += s(r);
                if (s(r) > 0.0) out.terms.push_back({s(r), {column(svd.matrixU(), r), column(svd.matrixV(), r)}});
            }
        }
        return out;
    }

    Rng rng(options.seed);
    if (kind == CrossnormKind::injective) {
        RankOneTerm best = best_over_starts(block, d, k, options, rng);
        if (best.sigma < 0.0) {
            best.sigma = -best.sigma;
            for (double& x : best.factors[0]) x = -x;
        }
        out.value = best.sigma;
        out.terms.push_back(std::move(best));
        return out;
    }

    // Projective: greedy rank-1 deflation; sum of |sigma| plus the l1 norm of the residual.
    const auto digits = digit_table(d, k);
    const std::size_t K = static_cast<std::size_t>(k);
    std::vector<double> residual(block.begin(), block.end());
    const double scale = euclid(block);
    out.value = l1(residual);
    double extracted = 0.0;
    std::vector<RankOneTerm> terms;
    const int max_terms = d * k;
    for (int step = 0; step < max_terms && euclid(residual) > 1e-14 * scale; ++step) {
        RankOneTerm t = best_over_starts(residual, d, k, options, rng);
        if (t.sigma == 0.0) break;
        for (std::size_t idx = 0; idx < residual.size(); ++idx) {
            double p = t.sigma;
            for (std::size_t i = 0; i < K; ++i) p *= t.factors[i][static_cast<std::size_t>(digits[idx * K + i])];
            residual[idx] -= p;
        }
        extracted += std::abs(t.sigma);
        terms.push_back(std::move(t));
        const double candidate = extracted + l1(residual);
        if (candidate < out.value) {
            out.value = candidate;
            out.terms = terms;
        }
    }
    return out;
}

double level_norm(std::span<const double> block, int d, int k, CrossnormKind kind, const CrossnormOptions& options) {
    return level_norm_bound(block, d, k, kind, options).value;
}

HoelderParams::HoelderParams(double alpha_, double T_, std::vector<double> grid_)
    : alpha(alpha_), T(T_), grid(std::move(grid_)) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("HoelderParams: alpha must lie in (0,1]");
    if (!(T > 0.0)) throw std::invalid_argument("HoelderParams: T must be positive");
    if (grid.size() < 2) throw std::invalid_argument("HoelderParams: grid needs at least two points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] > T) throw std::invalid_argument("HoelderParams: grid point outside [0,T]");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("HoelderParams: grid must be strictly increasing");
    }
}

std::vector<double> hoelder_grid(std::span<const double> times, double T, int dyadic_depth) {
    if (dyadic_depth < 0) throw std::invalid_argument("hoelder_grid: negative dyadic depth");
    std::vector<double> g(times.begin(), times.end());
    g.push_back(0.0);
    g.push_back(T);
    const std::size_t n = std::size_t{1} << dyadic_depth;
    for (std::size_t i = 1; i < n; ++i) g.push_back(T * static_cast<double>(i) / static_cast<double>(n));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

HoelderParams hoelder_params_for(const MultiplicativeFunctional& x, double alpha, int dyadic_depth) {
    return HoelderParams(alpha, x.horizon(), hoelder_grid(x.breakpoints(), x.horizon(), dyadic_depth));
}

namespace {

template <class LevelValue>
double hoelder_sup(const TensorShape& shape, const HoelderParams& p, CrossnormKind kind, const CrossnormOptions& options,
                   LevelValue&& level_value) {
    double best = 0.0;
    const auto& g = p.grid;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        for (std::size_t j = i + 1; j < g.size(); ++j) {
            const double dt = g[j] - g[i];
            for (int k = 1; k <= shape.N; ++k) {
                const std::vector<double> block = level_value(i, j, k);
                const double n = level_norm(block, shape.d, k, kind, options);
                best = std::max(best, std::pow(n / std::pow(dt, k * p.alpha), 1.0 / k));
            }
        }
    }
    return best;
}

// Values x(g_i, g_j) for a fixed i and increasing j, built as x(g_i,g_{j-1}) x(g_{j-1},g_j).
class ChenSweep {
public:
    ChenSweep(const MultiplicativeFunctional& x, const std::vector<double>& grid) {
        steps_.reserve(grid.size() - 1);
        for (std::size_t j = 0; j + 1 < grid.size(); ++j) steps_.push_back(x(grid[j], grid[j + 1]).tensor());
    }

    const TruncatedTensor& at(std::size_t i, std::size_t j) {
        if (j == i + 1 || i != row_) {
            row_ = i;
            col_ = i + 1;
            acc_ = steps_[i];
        }
        while (col_ < j) {
            acc_ = tensor_mul(acc_, steps_[col_]);
            ++col_;
        }
        return acc_;
    }

private:
    std::vector<TruncatedTensor> steps_;
    TruncatedTensor acc_;
    std::size_t row_ = static_cast<std::size_t>(-1);
    std::size_t col_ = 0;
};

void check_grid(const MultiplicativeFunctional& x, const HoelderParams& p) {
    if (p.grid.back() > x.horizon()) throw std::invalid_argument("hoelder_norm: grid exceeds the functional's horizon");
}

}  // namespace

double hoelder_norm(const MultiplicativeFunctional& x, const HoelderParams& p, CrossnormKind kind,
                    const CrossnormOptions& options) {
    check_grid(x, p);
    ChenSweep sweep(x, p.grid);
    return hoelder_sup(x.shape(), p, kind, options, [&](std::size_t i, std::size_t j, int k) {
        auto lvl = sweep.at(i, j).level(k);
        return std::vector<double>(lvl.begin(), lvl.end());
    });
}

double hoelder_metric(const MultiplicativeFunctional& x, const MultiplicativeFunctional& y, const HoelderParams& p,
                      CrossnormKind kind, const CrossnormOptions& options) {
    if (!(x.shape() == y.shape())) throw std::invalid_argument("hoelder_metric: shape mismatch");
    check_grid(x, p);
    check_grid(y, p);
    ChenSweep sx(x, p.grid);
    ChenSweep sy(y, p.grid);
    return hoelder_sup(x.shape(), p, kind, options, [&](std::size_t i, std::size_t j, int k) {
        auto a = sx.at(i, j).level(k);
        auto b = sy.at(i, j).level(k);
        std::vector<double> diff(a.size());
        for (std::size_t q = 0; q < a.size(); ++q) diff[q] = a[q] - b[q];
        return diff;
    });
}

NormConfig NormConfig::from_config(const Config& cfg) {
    NormConfig out;
    out.kind = crossnorm_from_string(cfg.get_string("norm.kind", to_string(out.kind)));
    out.crossnorm.restarts = cfg.get_int("norm.restarts", out.crossnorm.restarts);
    out.crossnorm.seed = cfg.get_u64("norm.seed", out.crossnorm.seed);
    out.dyadic_depth = cfg.get_int("hoelder.dyadic_depth", out.dyadic_depth);
    if (out.crossnorm.restarts < 0) throw std::invalid_argument("norm.restarts must be >= 0");
    if (out.dyadic_depth < 0 || out.dyadic_depth > 20) throw std::invalid_argument("hoelder.dyadic_depth must lie in [0,20]");
    return out;
}

TimeExtensionBound time_extension_constant(const PiecewiseLinearPath& path, double alpha, int dyadic_depth) {
    const auto x = exact_pl_functional(path, 2);
    const TimeExtendedPath xh(path);
    const HoelderParams p(alpha, path.horizon(), hoelder_grid(path.times(), path.horizon(), dyadic_depth));
    TimeExtensionBound out;
    out.path_norm = hoelder_norm(x, p);
    out.extended_norm = hoelder_norm(xh.functional(), p);
    out.C = out.extended_norm / std::max(out.path_norm, 1.0);
    return out;
}

AppendixFReport appendix_f_counterexample() {
    using Mat = std::array<std::array<std::int64_t, 3>, 3>;
    // Coordinates (t, x, y); phi(t,x,y) = (x + y, x - y, x - y).
    const Mat phi{{{0, 1, 1}, {0, 1, -1}, {0, 1, -1}}};
    const auto vec_norm = [](const std::array<std::int64_t, 3>& v) {
        return std::abs(v[0]) + std::max(std::abs(v[1]), std::abs(v[2]));
    };
    const auto mat_norm = [](const Mat& a) {
        return std::abs(a[0][0]) + std::max(std::abs(a[0][1]), std::abs(a[0][2])) +
               std::max(std::abs(a[1][0]), std::abs(a[2][0])) +
               std::max({std::abs(a[1][1]), std::abs(a[1][2]), std::abs(a[2][1]), std::abs(a[2][2])});
    };

    AppendixFReport r;
    // The unit ball of |t| + max(|x|,|y|) is the hull of (+-1,0,0) and (0,+-1,+-1),
    // so the operator norm is attained at one of these vertices.
    const std::array<std::array<std::int64_t, 3>, 6> vertices{
        {{1, 0, 0}, {-1, 0, 0}, {0, 1, 1}, {0, 1, -1}, {0, -1, 1}, {0, -1, -1}}};
    for (const auto& e : vertices) {
        std::array<std::int64_t, 3> image{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) image[static_cast<std::size_t>(i)] += phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(j)];
        }
        r.phi_norm = std::max(r.phi_norm, vec_norm(image));
    }

    Mat A{};
    A[1][1] = 1;
    A[1][2] = 1;
    A[2][1] = 1;
    A[2][2] = -1;
    r.A_norm = mat_norm(A);

    // (phi (x) phi)(A) = Phi A Phi^T.
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            std::int64_t s = 0;
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t b = 0; b < 3; ++b) s += phi[i][a] * A[a][b] * phi[j][b];
            }
            r.image[i][j] = s;
        }
    }
    r.image_norm = mat_norm(r.image);
    return r;
}

}  // namespace rp
