#ifndef ROUGHPATH_ROUGH_PATH_HPP
#define ROUGHPATH_ROUGH_PATH_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughpath/random.hpp"
#include "roughpath/tensor.hpp"
#include "roughpath/words.hpp"

namespace rp {

/// Ordered samples (t_i, x_i) of a path [0,T] -> R^d, linear between samples.
class PiecewiseLinearPath {
public:
    /// Requires at least two samples, times[0] == 0 and strictly increasing times.
    PiecewiseLinearPath(std::vector<double> times, std::vector<std::vector<double>> points);

    int dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    double horizon() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    std::span<const double> point(std::size_t i) const { return points_[i]; }

    /// Linear interpolation at t in [0,T].
    std::vector<double> value_at(double t) const;
    /// The path u -> (u, x_u) in R^{1+d}.
    PiecewiseLinearPath time_augmented() const;

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> points_;
    int dim_ = 0;
};

/// Reads "t,x1,...,xd" CSV. Parse errors name the offending line.
PiecewiseLinearPath read_path_csv(std::istream& in);
PiecewiseLinearPath read_path_csv_file(const std::string& filename);
void write_path_csv(std::ostream& out, const PiecewiseLinearPath& path);

/// Exact signature of the restricted path: the Chen product of exp(increment)
/// over the linear pieces of [s,t]. For s > t the inverse of the (t,s) value.
GroupElement signature_pl(const PiecewiseLinearPath& path, int N, double s, double t);

enum class Provenance { exact_pl, pure_area, lifted, custom };
std::string to_string(Provenance p);

/// Two-parameter map (s,t) -> T_1^(N) expected to satisfy Chen's relation.
class MultiplicativeFunctional {
public:
    using Evaluator = std::function<GroupElement(double, double)>;

    MultiplicativeFunctional(TensorShape shape, double horizon, Evaluator eval, Provenance provenance,
                             std::vector<double> breakpoints = {});

    const TensorShape& shape() const { return shape_; }
    double horizon() const { return horizon_; }
    Provenance provenance() const { return provenance_; }
    /// Interior times where the functional is known to be non-smooth; used to snap partitions.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    GroupElement operator()(double s, double t) const;

private:
    TensorShape shape_;
    double horizon_;
    Evaluator eval_;
    Provenance provenance_;
    std::vector<double> breakpoints_;
};

MultiplicativeFunctional exact_pl_functional(const PiecewiseLinearPath& path, int N);

/// x^(1) = 0, x^(2)_{s,t} = (t - s) A for a d x d (row-major) antisymmetric A.
MultiplicativeFunctional pure_area_functional(int d, std::vector<double> area, double horizon);

/// Wraps an arbitrary evaluator; nothing is verified until chen_check is run.
MultiplicativeFunctional custom_functional(TensorShape shape, double horizon, MultiplicativeFunctional::Evaluator eval);

struct TimeTriple {
    double s, u, t;
};

std::vector<TimeTriple> sample_triples(double horizon, std::size_t count, Rng& rng);

/// Max over triples of the level-sum norm of x(s,u) x(u,t) - x(s,t).
double chen_check(const MultiplicativeFunctional& x, std::span<const TimeTriple> triples);

struct LiftOptions {
    /// Dyadic depths; the depth-D partition of [s,t] has about 2^D pieces.
    std::vector<int> depths{8};
    /// Polynomial extrapolation of the per-depth values to zero mesh.
    bool extrapolate = false;
    /// Inputs whose Chen residual exceeds this are rejected.
    double chen_tolerance = 1e-10;
    std::size_t chen_samples = 16;
    std::uint64_t seed = 0;
};

struct LiftTrace {
    std::vector<int> depths;
    std::vector<std::size_t> pieces;
    std::vector<TruncatedTensor> values;
    /// Max coordinate change from the previous depth (0 for the first).
    std::vector<double> change;
    std::optional<TruncatedTensor> extrapolated;

    /// The extrapolated value when present, otherwise the deepest-mesh value.
    const TruncatedTensor& best() const { return extrapolated ? *extrapolated : values.back(); }
};

/// Partition points of [s,t] (s < t) at a dyadic depth, snapped to the breakpoints.
std::vector<double> lift_partition(double s, double t, std::span<const double> breakpoints, int depth);

/// Partition products of the input padded with zeros up to target_N, one per depth.
LiftTrace lift_trace(const MultiplicativeFunctional& x, int target_N, double s, double t, const LiftOptions& options);

/// Lyons lift to level target_N. Evaluation returns LiftTrace::best() of lift_trace.
/// Throws std::invalid_argument when the input fails chen_check at the configured tolerance.
MultiplicativeFunctional lyons_lift(const MultiplicativeFunctional& x, int target_N, const LiftOptions& options = {});

/// The split of a level-2 block over R^{1+d} given by
/// (t,x) (x) (s,y) -> (ts, ty, sx, x (x) y).
struct TimeExtensionParts {
    double time = 0.0;
    std::vector<double> time_then_space;  // entries (0, i)
    std::vector<double> space_then_time;  // entries (i, 0)
    std::vector<double> space;            // entries (i, j), row-major d x d
};

TimeExtensionParts time_extension_iso(std::span<const double> block, int d);
std::vector<double> time_extension_iso_inverse(const TimeExtensionParts& parts);

/// Level-2 time extension over R^{1+d}; letter 1 is the time coordinate.
class TimeExtendedPath {
public:
    TimeExtendedPath(const PiecewiseLinearPath& path, int N = 2);

    const MultiplicativeFunctional& functional() const { return functional_; }
    GroupElement operator()(double s, double t) const { return functional_(s, t); }
    static Word time_word() { return Word{1}; }
    int space_dim() const { return functional_.shape().d - 1; }

private:
    MultiplicativeFunctional functional_;
};

/// Throws std::invalid_argument unless N == 2.
TimeExtendedPath time_extend(const PiecewiseLinearPath& path, int N = 2);

/// Projection pi^y: the output coordinate at word (i_1..i_j) is <x, y_{i_1} (x) ... (x) y_{i_j}>.
/// Needs exactly N+1 vectors of length d.
MultiplicativeFunctional project_pi_y(const MultiplicativeFunctional& x, const std::vector<std::vector<double>>& y);

}  // namespace rp

#endif  // ROUGHPATH_ROUGH_PATH_HPP
