#ifndef ROUGHPATH_UAT_LAB_HPP
#define ROUGHPATH_UAT_LAB_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "roughpath/config.hpp"
#include "roughpath/rough_path.hpp"
#include "roughpath/words.hpp"

namespace rp {

/// Seeded generator of a bounded family of piecewise-linear paths in R^d.
/// Each path starts at 0 and takes `segments` steps of size amplitude * U[-1,1]^d at jittered times.
struct FamilySpec {
    int count = 200;
    int d = 2;
    int segments = 4;
    double amplitude = 0.3;
    double T = 1.0;
    std::uint64_t seed = 0;
    /// Hoelder bound on the time-extended paths; when unset the measured maximum is recorded.
    std::optional<double> R;
    double alpha = 0.5;
    int hoelder_depth = 6;

    /// Reads the family.* keys.
    static FamilySpec from_config(const Config& cfg);
};

/// Raised when a path lies outside the recorded Hoelder ball of a family.
class OutOfFamilyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PathFamily {
public:
    /// With spec.R set, draws exceeding R are discarded and redrawn.
    static PathFamily generate(const FamilySpec& spec);
    /// Wraps given paths; R is spec.R if set, otherwise the measured maximum.
    PathFamily(FamilySpec spec, std::vector<PiecewiseLinearPath> paths);

    const FamilySpec& spec() const { return spec_; }
    const std::vector<PiecewiseLinearPath>& paths() const { return paths_; }
    std::size_t size() const { return paths_.size(); }
    int d() const { return spec_.d; }
    double R() const { return R_; }
    /// Hoelder norm of each time-extended member.
    const std::vector<double>& hoelder_norms() const { return norms_; }
    std::size_t rejected() const { return rejected_; }

    /// Hoelder norm of the time-extension of a path, with this family's alpha and grid depth.
    double hoelder_of(const PiecewiseLinearPath& path) const;
    /// Throws OutOfFamilyError if the path's norm exceeds R or its dimension differs.
    void require_member(const PiecewiseLinearPath& path) const;

private:
    PathFamily() = default;
    FamilySpec spec_;
    std::vector<PiecewiseLinearPath> paths_;
    std::vector<double> norms_;
    double R_ = 0.0;
    std::size_t rejected_ = 0;
};

enum class TargetKind { shuffle_square, smooth_of_increment, terminal_coordinate, level_norm, custom };

std::string to_string(TargetKind k);
TargetKind target_kind_from_string(const std::string& s);

/// A real function of a path. level_norm is the negative control ||x^(k)_{0,T}||, which is
/// continuous in the rough path norm but not in the weak-* topology.
struct TargetFunctional {
    TargetKind kind = TargetKind::custom;
    std::vector<double> params;
    std::function<double(const PiecewiseLinearPath&)> eval;

    double operator()(const PiecewiseLinearPath& path) const { return eval(path); }
};

/// (x^i_T - x^i_0)^2 for a space coordinate i in 1..d.
TargetFunctional shuffle_square_target(int coordinate);
/// sin(<x^(1)_{0,T}, phi>) for the time-extended path: phi has length 1+d (time weight first) or d.
TargetFunctional smooth_of_increment_target(std::vector<double> phi);
/// Signature coordinate of the time-augmented path at a word over letters 1..1+d (letter 1 is time).
TargetFunctional terminal_coordinate_target(Word w);
/// Hilbert norm of level k of the signature of the path itself.
TargetFunctional level_norm_target(int k);
TargetFunctional custom_target(std::function<double(const PiecewiseLinearPath&)> f);

/// Reads target.kind and target.params (comma separated). custom cannot be configured.
TargetFunctional target_from_config(const Config& cfg, int d);

/// Dense row-major feature matrix: one row per path, one column per word of length <= N over
/// the 1+d letters of the time-augmented path, in coordinate order.
struct FeatureMatrix {
    TensorShape shape{1, 0};
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    /// The first columns, i.e. the features of a lower truncation level.
    FeatureMatrix truncate(int N) const;
    /// Keeps the listed rows in the given order.
    FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;
};

/// Signature features S(x)_{0,T} of the time-augmented members; rows are computed concurrently.
FeatureMatrix build_features(const PathFamily& family, int N);
FeatureMatrix build_features(const std::vector<PiecewiseLinearPath>& paths, int N);

struct FitResult {
    LinearFunctional functional;
    double train_sup_err = 0.0;
    std::size_t rank = 0;
    bool rank_deficient = false;
    /// Ratio of largest to smallest nonzero singular value of the (ridge-augmented) system.
    double condition = 0.0;
    /// Max |entry| per column.
    std::vector<double> column_scale;
};

/// Minimizes sum (<S, l> - y)^2 + ridge ||l||^2. Rank deficiency is reported and the
/// minimum-norm solution is returned.
FitResult fit_linear_functional(const FeatureMatrix& features, const std::vector<double>& targets, double ridge = 0.0);

/// <row r, l> for each row.
std::vector<double> predict(const FeatureMatrix& features, const LinearFunctional& l);

struct SweepOptions {
    std::vector<int> levels{1, 2, 3, 4};
    double holdout = 0.25;
    double ridge = 0.0;
    std::uint64_t seed = 0;

    /// Reads the sweep.* keys.
    static SweepOptions from_config(const Config& cfg);
};

struct LevelReport {
    int level = 0;
    double train_sup_err = 0.0;
    /// Sup error over the held-out members; 0 when nothing is held out.
    double test_sup_err = 0.0;
    std::size_t n_features = 0;
    std::size_t rank = 0;
    double condition = 0.0;
    double seconds = 0.0;
    LinearFunctional functional;
};

struct FitReport {
    std::vector<LevelReport> levels;
    double R = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<double> column_scale;
};

/// Seeded train/held-out split of the family, then one fit per level (levels run concurrently).
FitReport uat_sweep(const PathFamily& family, const TargetFunctional& target, const SweepOptions& options);

/// CSV with header level,train_sup_err,test_sup_err,n_features,seconds,rank,condition.
void write_report_csv(std::ostream& out, const FitReport& report);
/// The fitted functional of the given report row together with its level and shape.
nlohmann::json functional_json(const LevelReport& row);

}  // namespace rp

#endif  // ROUGHPATH_UAT_LAB_HPP
