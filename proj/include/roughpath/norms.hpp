#ifndef ROUGHPATH_NORMS_HPP
#define ROUGHPATH_NORMS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roughpath/config.hpp"
#include "roughpath/rough_path.hpp"
#include "roughpath/tensor.hpp"

namespace rp {

/// Tensor norms on (R^d)^{(x)k} built from the Euclidean norm on R^d.
/// hilbert is exact; projective is an upper bound; injective is a lower bound.
/// Both bounds are exact for k <= 2 and for rank-1 blocks.
enum class CrossnormKind { hilbert, projective, injective };

std::string to_string(CrossnormKind kind);
CrossnormKind crossnorm_from_string(const std::string& name);

struct CrossnormOptions {
    int restarts = 32;
    std::uint64_t seed = 0;
    int max_sweeps = 200;
};

/// A rank-1 term sigma * u_1 (x) ... (x) u_k with unit u_i.
struct RankOneTerm {
    double sigma = 0.0;
    std::vector<std::vector<double>> factors;
};

struct CrossnormBound {
    double value = 0.0;
    /// injective: the maximizing unit directions (one term, sigma = value).
    /// projective: the extracted rank-1 terms; value also includes the l1 norm of what is left.
    std::vector<RankOneTerm> terms;
};

CrossnormBound level_norm_bound(std::span<const double> block, int d, int k, CrossnormKind kind,
                                const CrossnormOptions& options = {});
double level_norm(std::span<const double> block, int d, int k, CrossnormKind kind, const CrossnormOptions& options = {});

/// Largest |<block, u_1 (x) ... (x) u_k>| found by alternating maximization from one start.
RankOneTerm best_rank_one(std::span<const double> block, int d, int k, std::vector<std::vector<double>> start,
                          int max_sweeps);

struct HoelderParams {
    double alpha = 0.5;
    double T = 1.0;
    /// Ordered evaluation times in [0,T]; the sup is taken over pairs of grid points.
    std::vector<double> grid;

    HoelderParams(double alpha, double T, std::vector<double> grid);
};

/// Union of the given times, {0, T} and the dyadic points k T / 2^depth.
std::vector<double> hoelder_grid(std::span<const double> times, double T, int dyadic_depth);
/// Grid from the functional's breakpoints refined to the given dyadic depth.
HoelderParams hoelder_params_for(const MultiplicativeFunctional& x, double alpha, int dyadic_depth);

/// max over levels i and grid pairs u < v of (||x^(i)_{u,v}|| / |v-u|^{i alpha})^{1/i}.
/// Pair values are assembled from consecutive grid steps by Chen's relation.
double hoelder_norm(const MultiplicativeFunctional& x, const HoelderParams& p,
                    CrossnormKind kind = CrossnormKind::hilbert, const CrossnormOptions& options = {});
/// Same sup applied to the level-wise differences of x and y.
double hoelder_metric(const MultiplicativeFunctional& x, const MultiplicativeFunctional& y, const HoelderParams& p,
                      CrossnormKind kind = CrossnormKind::hilbert, const CrossnormOptions& options = {});

/// Settings read from the norm.* and hoelder.* configuration keys.
struct NormConfig {
    CrossnormKind kind = CrossnormKind::hilbert;
    CrossnormOptions crossnorm;
    int dyadic_depth = 10;

    static NormConfig from_config(const Config& cfg);
};

/// ||x|| and ||x_hat|| in the Hilbert Hoelder norm, with C = ||x_hat|| / max(||x||, 1).
struct TimeExtensionBound {
    double path_norm = 0.0;
    double extended_norm = 0.0;
    double C = 0.0;
};

TimeExtensionBound time_extension_constant(const PiecewiseLinearPath& path, double alpha, int dyadic_depth);

/// The two-dimensional construction showing a compatible pair of norms on R + E that is not
/// strongly uniform. Everything is evaluated in integer arithmetic.
struct AppendixFReport {
    std::int64_t phi_norm = 0;
    std::int64_t A_norm = 0;
    std::int64_t image_norm = 0;
    std::array<std::array<std::int64_t, 3>, 3> image{};
};

AppendixFReport appendix_f_counterexample();

}  // namespace rp

#endif  // ROUGHPATH_NORMS_HPP
