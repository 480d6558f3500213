#include "roughpath/uat_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "roughpath/norms.hpp"
#include "roughpath/random.hpp"

namespace rp {

namespace {

PiecewiseLinearPath draw_path(Rng& rng, const FamilySpec& spec) {
    std::vector<double> times{0.0};
    std::vector<std::vector<double>> points{std::vector<double>(static_cast<std::size_t>(spec.d), 0.0)};
    for (int i = 1; i <= spec.segments; ++i) {
        const double t = i == spec.segments ? spec.T : (i - 1 + rng.uniform(0.3, 0.9)) / spec.segments * spec.T;
        std::vector<double> p = points.back();
        for (double& v : p) v += spec.amplitude * rng.uniform(-1.0, 1.0);
        times.push_back(t);
        points.push_back(std::move(p));
    }
    return PiecewiseLinearPath(std::move(times), std::move(points));
}

void validate(const FamilySpec& s) {
    if (s.count < 1) throw std::invalid_argument("family.count must be >= 1");
    if (s.d < 1) throw std::invalid_argument("family.d must be >= 1");
    if (s.segments < 1) throw std::invalid_argument("family.segments must be >= 1");
    if (!(s.amplitude > 0.0)) throw std::invalid_argument("family.amplitude must be > 0");
    if (!(s.T > 0.0)) throw std::invalid_argument("family.T must be > 0");
    if (s.R && !(*s.R > 0.0)) throw std::invalid_argument("family.R must be > 0");
    if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw std::invalid_argument("family.alpha must lie in (0,1]");
    if (s.hoelder_depth < 0 || s.hoelder_depth > 16) throw std::invalid_argument("family.hoelder_depth must lie in 0..16");
}

double hoelder_of_spec(const FamilySpec& spec, const PiecewiseLinearPath& path) {
    const TimeExtendedPath te(path);
    return hoelder_norm(te.functional(), hoelder_params_for(te.functional(), spec.alpha, spec.hoelder_depth));
}

// Runs f(i) for i in [0, n) on a few threads; every index is written by exactly one call.
template <class F>
void parallel_for(std::size_t n, F f) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) f(i);
        }));
    }
    for (auto& j : jobs) j.get();
}

std::size_t feature_count(int d, int N) { return TensorShape(1 + d, N).total_size(); }

}  // namespace

FamilySpec FamilySpec::from_config(const Config& cfg) {
    FamilySpec s;
    s.count = cfg.get_int("family.count", s.count);
    s.d = cfg.get_int("family.d", s.d);
    s.segments = cfg.get_int("family.segments", s.segments);
    s.amplitude = cfg.get_double("family.amplitude", s.amplitude);
    s.T = cfg.get_double("family.T", s.T);
    s.seed = cfg.get_u64("family.seed", s.seed);
    if (cfg.has("family.R")) s.R = cfg.get_double("family.R", 0.0);
    s.alpha = cfg.get_double("family.alpha", s.alpha);
    s.hoelder_depth = cfg.get_int("family.hoelder_depth", s.hoelder_depth);
    validate(s);
    return s;
}

PathFamily PathFamily::generate(const FamilySpec& spec) {
    validate(spec);
    PathFamily f;
    f.spec_ = spec;
    Rng rng(spec.seed);
    const std::size_t max_draws = static_cast<std::size_t>(spec.count) * 100;
    std::size_t draws = 0;
    while (f.paths_.size() < static_cast<std::size_t>(spec.count)) {
        if (++draws > max_draws) {
            throw std::invalid_argument("PathFamily: too many draws exceed family.R; raise R or lower the amplitude");
        }
        auto path = draw_path(rng, spec);
        const double n = hoelder_of_spec(spec, path);
        if (spec.R && n > *spec.R) {
            ++f.rejected_;
            continue;
        }
        f.paths_.push_back(std::move(path));
        f.norms_.push_back(n);
    }
    f.R_ = spec.R ? *spec.R : *std::max_element(f.norms_.begin(), f.norms_.end());
    return f;
}

PathFamily::PathFamily(FamilySpec spec, std::vector<PiecewiseLinearPath> paths) : spec_(spec), paths_(std::move(paths)) {
    if (paths_.empty()) throw std::invalid_argument("PathFamily: no paths");
    spec_.count = static_cast<int>(paths_.size());
    spec_.d = paths_.front().dim();
    for (const auto& p : paths_) {
        if (p.dim() != spec_.d) throw std::invalid_argument("PathFamily: paths of different dimension");
    }
    validate(spec_);
    norms_.resize(paths_.size());
    parallel_for(paths_.size(), [&](std::size_t i) { norms_[i] = hoelder_of_spec(spec_, paths_[i]); });
    const double measured = *std::max_element(norms_.begin(), norms_.end());
    if (spec_.R && measured > *spec_.R) throw OutOfFamilyError("PathFamily: a member exceeds family.R");
    R_ = spec_.R ? *spec_.R : measured;
}

double PathFamily::hoelder_of(const PiecewiseLinearPath& path) const { return hoelder_of_spec(spec_, path); }

void PathFamily::require_member(const PiecewiseLinearPath& path) const {
    if (path.dim() != spec_.d) throw OutOfFamilyError("path dimension differs from the family");
    const double n = hoelder_of(path);
    if (n > R_) {
        std::ostringstream msg;
        msg << "path Hoelder norm " << n << " exceeds the family bound R = " << R_;
        throw OutOfFamilyError(msg.str());
    }
}

std::string to_string(TargetKind k) {
    switch (k) {
        case TargetKind::shuffle_square: return "shuffle_square";
        case TargetKind::smooth_of_increment: return "smooth_of_increment";
        case TargetKind::terminal_coordinate: return "terminal_coordinate";
        case TargetKind::level_norm: return "level_norm";
        case TargetKind::custom: return "custom";
    }
    return "custom";
}

TargetKind target_kind_from_string(const std::string& s) {
    for (auto k : {TargetKind::shuffle_square, TargetKind::smooth_of_increment, TargetKind::terminal_coordinate,
                   TargetKind::level_norm, TargetKind::custom}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown target kind '" + s + "'");
}

TargetFunctional shuffle_square_target(int coordinate) {
    if (coordinate < 1) throw std::invalid_argument("shuffle_square: coordinate must be >= 1");
    const auto i = static_cast<std::size_t>(coordinate - 1);
    return {TargetKind::shuffle_square, {static_cast<double>(coordinate)}, [i](const PiecewiseLinearPath& p) {
                if (i >= static_cast<std::size_t>(p.dim())) throw std::invalid_argument("shuffle_square: coordinate exceeds d");
                const double inc = p.point(p.size() - 1)[i] - p.point(0)[i];
                return inc * inc;
            }};
}

TargetFunctional smooth_of_increment_target(std::vector<double> phi) {
    if (phi.empty()) throw std::invalid_argument("smooth_of_increment: phi must be non-empty");
    auto params = phi;
    return {TargetKind::smooth_of_increment, std::move(params), [phi = std::move(phi)](const PiecewiseLinearPath& p) {
                // phi acts on the increment of the time-extended path; a length-d phi has no time weight.
                const auto d = static_cast<std::size_t>(p.dim());
                if (phi.size() != d && phi.size() != d + 1) {
                    throw std::invalid_argument("smooth_of_increment: phi must have length d or 1+d");
                }
                const std::size_t shift = phi.size() - d;
                double z = shift ? phi[0] * p.horizon() : 0.0;
                for (std::size_t k = 0; k < d; ++k) z += phi[k + shift] * (p.point(p.size() - 1)[k] - p.point(0)[k]);
                return std::sin(z);
            }};
}

TargetFunctional terminal_coordinate_target(Word w) {
    std::vector<double> params(w.letters().begin(), w.letters().end());
    for (int letter : w.letters()) {
        if (letter < 1) throw std::invalid_argument("terminal_coordinate: letters must be >= 1");
    }
    return {TargetKind::terminal_coordinate, std::move(params), [w](const PiecewiseLinearPath& p) {
                const auto aug = p.time_augmented();
                if (!w.fits(TensorShape(aug.dim(), w.size()))) throw std::invalid_argument("terminal_coordinate: letter exceeds 1+d");
                return signature_pl(aug, w.size(), 0.0, aug.horizon()).tensor().coeff(w);
            }};
}

TargetFunctional level_norm_target(int k) {
    if (k < 1) throw std::invalid_argument("level_norm: k must be >= 1");
    return {TargetKind::level_norm, {static_cast<double>(k)}, [k](const PiecewiseLinearPath& p) {
                const auto s = signature_pl(p, k, 0.0, p.horizon());
                double sq = 0.0;
                for (double v : s.tensor().level(k)) sq += v * v;
                return std::sqrt(sq);
            }};
}

TargetFunctional custom_target(std::function<double(const PiecewiseLinearPath&)> f) {
    if (!f) throw std::invalid_argument("custom target: empty function");
    return {TargetKind::custom, {}, std::move(f)};
}

TargetFunctional target_from_config(const Config& cfg, int d) {
    const auto kind = target_kind_from_string(cfg.get_string("target.kind", "smooth_of_increment"));
    switch (kind) {
        case TargetKind::shuffle_square: return shuffle_square_target(cfg.get_int("target.params", 1));
        case TargetKind::smooth_of_increment:
            return smooth_of_increment_target(cfg.get_doubles("target.params", std::vector<double>(static_cast<std::size_t>(d) + 1, 1.0)));
        case TargetKind::terminal_coordinate: {
            const auto letters = cfg.get_ints("target.params", {2});
            return terminal_coordinate_target(Word(letters));
        }
        case TargetKind::level_norm: return level_norm_target(cfg.get_int("target.params", 2));
        case TargetKind::custom: break;
    }
    throw std::invalid_argument("target.kind custom can only be built in code");
}

FeatureMatrix FeatureMatrix::truncate(int N) const {
    if (N < 0 || N > shape.N) throw std::invalid_argument("FeatureMatrix::truncate: level out of range");
    FeatureMatrix out;
    out.shape = TensorShape(shape.d, N);
    out.rows = rows;
    out.cols = out.shape.total_size();
    out.data.resize(out.rows * out.cols);
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(r * cols), out.cols,
                    out.data.begin() + static_cast<std::ptrdiff_t>(r * out.cols));
    }
    return out;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& keep) const {
    FeatureMatrix out;
    out.shape = shape;
    out.rows = keep.size();
    out.cols = cols;
    out.data.resize(out.rows * cols);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        if (keep[r] >= rows) throw std::out_of_range("FeatureMatrix::select_rows: row out of range");
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(keep[r] * cols), cols,
                    out.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
    }
    return out;
}

FeatureMatrix build_features(const std::vector<PiecewiseLinearPath>& paths, int N) {
    if (paths.empty()) throw std::invalid_argument("build_features: no paths");
    if (N < 0) throw std::invalid_argument("build_features: N must be >= 0");
    FeatureMatrix out;
    out.shape = TensorShape(1 + paths.front().dim(), N);
    out.rows = paths.size();
    out.cols = out.shape.total_size();
    out.data.resize(out.rows * out.cols);
    for (const auto& p : paths) {
        if (p.dim() != paths.front().dim()) throw std::invalid_argument("build_features: paths of different dimension");
    }
    parallel_for(paths.size(), [&](std::size_t r) {
        const auto aug = paths[r].time_augmented();
        const auto sig = signature_pl(aug, N, 0.0, aug.horizon());
        auto dst = out.data.begin() + static_cast<std::ptrdiff_t>(r * out.cols);
        for (int k = 0; k <= N; ++k) dst = std::copy(sig.tensor().level(k).begin(), sig.tensor().level(k).end(), dst);
    });
    return out;
}

FeatureMatrix build_features(const PathFamily& family, int N) { return build_features(family.paths(), N); }

FitResult fit_linear_functional(const FeatureMatrix& features, const std::vector<double>& targets, double ridge) {
    if (features.rows < 1) throw std::invalid_argument("fit_linear_functional: need at least one row");
    if (targets.size() != features.rows) throw std::invalid_argument("fit_linear_functional: one target per row required");
    if (!(ridge >= 0.0)) throw std::invalid_argument("fit_linear_functional: ridge must be >= 0");

    const auto n = static_cast<Eigen::Index>(features.rows);
    const auto m = static_cast<Eigen::Index>(features.cols);
    const Eigen::Index extra = ridge > 0.0 ? m : 0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + extra, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + extra);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) A(r, c) = features.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        b(r) = targets[static_cast<std::size_t>(r)];
    }
    // Ridge as extra rows sqrt(ridge) I against zero targets.
    for (Eigen::Index c = 0; c < extra; ++c) A(n + c, c) = std::sqrt(ridge);

    FitResult out;
    out.column_scale.assign(features.cols, 0.0);
    for (std::size_t r = 0; r < features.rows; ++r) {
        for (std::size_t c = 0; c < features.cols; ++c) out.column_scale[c] = std::max(out.column_scale[c], std::abs(features.at(r, c)));
    }

    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd coeffs = cod.solve(b);
    out.rank = static_cast<std::size_t>(cod.rank());
    out.rank_deficient = out.rank < features.cols;

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    double smin = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > smax * 1e-15 * static_cast<double>(std::max(n + extra, m))) smin = sv(i);
    }
    out.condition = smin > 0.0 ? smax / smin : 0.0;

    out.functional = LinearFunctional(features.shape);
    const auto words = all_words(features.shape.d, features.shape.N);
    for (std::size_t c = 0; c < features.cols; ++c) {
        if (coeffs(static_cast<Eigen::Index>(c)) != 0.0) out.functional.add(words[c], coeffs(static_cast<Eigen::Index>(c)));
    }
    const auto fitted = predict(features, out.functional);
    for (std::size_t r = 0; r < features.rows; ++r) out.train_sup_err = std::max(out.train_sup_err, std::abs(fitted[r] - targets[r]));
    return out;
}

std::vector<double> predict(const FeatureMatrix& features, const LinearFunctional& l) {
    if (!(l.shape() == features.shape)) throw std::invalid_argument("predict: functional shape differs from the features");
    std::vector<std::pair<std::size_t, double>> dense;
    for (const auto& [w, c] : l.terms()) {
        std::size_t offset = 0;
        for (int k = 0; k < w.size(); ++k) offset += features.shape.level_size(k);
        dense.emplace_back(offset + w.flat_index(features.shape.d), c);
    }
    std::vector<double> out(features.rows, 0.0);
    for (std::size_t r = 0; r < features.rows; ++r) {
        for (const auto& [col, c] : dense) out[r] += c * features.at(r, col);
    }
    return out;
}

SweepOptions SweepOptions::from_config(const Config& cfg) {
    SweepOptions o;
    o.levels = cfg.get_ints("sweep.levels", o.levels);
    o.holdout = cfg.get_double("sweep.holdout", o.holdout);
    o.ridge = cfg.get_double("sweep.ridge", o.ridge);
    o.seed = cfg.get_u64("sweep.seed", cfg.get_u64("family.seed", o.seed));
    if (o.levels.empty()) throw std::invalid_argument("sweep.levels must be non-empty");
    for (int N : o.levels) {
        if (N < 0 || N > 8) throw std::invalid_argument("sweep.levels entries must lie in 0..8");
    }
    if (!(o.holdout >= 0.0 && o.holdout < 1.0)) throw std::invalid_argument("sweep.holdout must lie in [0,1)");
    if (!(o.ridge >= 0.0)) throw std::invalid_argument("sweep.ridge must be >= 0");
    return o;
}

FitReport uat_sweep(const PathFamily& family, const TargetFunctional& target, const SweepOptions& options) {
    if (options.levels.empty()) throw std::invalid_argument("uat_sweep: no levels");
    if (!(options.holdout >= 0.0 && options.holdout < 1.0)) throw std::invalid_argument("uat_sweep: holdout must lie in [0,1)");

    // Fisher-Yates with the portable generator, so the split is identical everywhere.
    const std::size_t n = family.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(options.seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::size_t n_test = static_cast<std::size_t>(std::floor(options.holdout * static_cast<double>(n)));
    n_test = std::min(n_test, n - 1);
    const std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    const std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = target(family.paths()[i]);
    std::vector<double> y_train, y_test;
    for (auto i : train) y_train.push_back(y[i]);
    for (auto i : test) y_test.push_back(y[i]);

    const int top = *std::max_element(options.levels.begin(), options.levels.end());
    const auto all = build_features(family, top);
    const auto train_all = all.select_rows(train);
    const auto test_all = all.select_rows(test);

    FitReport report;
    report.R = family.R();
    report.n_train = train.size();
    report.n_test = test.size();
    report.levels.resize(options.levels.size());
    parallel_for(options.levels.size(), [&](std::size_t li) {
        const auto start = std::chrono::steady_clock::now();
        const int N = options.levels[li];
        const auto fit = fit_linear_functional(train_all.truncate(N), y_train, options.ridge);
        LevelReport& row = report.levels[li];
        row.level = N;
        row.train_sup_err = fit.train_sup_err;
        row.n_features = feature_count(family.d(), N);
        row.rank = fit.rank;
        row.condition = fit.condition;
        row.functional = fit.functional;
        if (!test.empty()) {
            const auto pred = predict(test_all.truncate(N), fit.functional);
            for (std::size_t r = 0; r < pred.size(); ++r) row.test_sup_err = std::max(row.test_sup_err, std::abs(pred[r] - y_test[r]));
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    report.column_scale.assign(all.cols, 0.0);
    for (std::size_t r = 0; r < all.rows; ++r) {
        for (std::size_t c = 0; c < all.cols; ++c) report.column_scale[c] = std::max(report.column_scale[c], std::abs(all.at(r, c)));
    }
    return report;
}

void write_report_csv(std::ostream& out, const FitReport& report) {
    out << "level,train_sup_err,test_sup_err,n_features,seconds,rank,condition\n";
    out << std::setprecision(17);
    for (const auto& r : report.levels) {
        out << r.level << ',' << r.train_sup_err << ',' << r.test_sup_err << ',' << r.n_features << ',' << r.seconds << ','
            << r.rank << ',' << r.condition << '\n';
    }
}

nlohmann::json functional_json(const LevelReport& row) {
    return {{"level", row.level}, {"n_features", row.n_features}, {"functional", to_json(row.functional)}};
}

}  // namespace rp
