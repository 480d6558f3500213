#include <doctest.h>

#include <cmath>
#include <sstream>

#include "roughpath/uat_lab.hpp"
#include "test_support.hpp"

using namespace rp;

namespace {

std::size_t column(const FeatureMatrix& f, const Word& w) {
    std::size_t offset = 0;
    for (int k = 0; k < w.size(); ++k) offset += f.shape.level_size(k);
    return offset + w.flat_index(f.shape.d);
}

// Shuffle by the last-letter recursion: (ua) sh (vb) = (u sh vb) a + (ua sh v) b.
void shuffle_into(const std::vector<int>& u, const std::vector<int>& v, std::map<std::vector<int>, double>& out, double c) {
    if (u.empty() || v.empty()) {
        std::vector<int> w = u.empty() ? v : u;
        out[w] += c;
        return;
    }
    std::map<std::vector<int>, double> left, right;
    shuffle_into({u.begin(), u.end() - 1}, v, left, 1.0);
    shuffle_into(u, {v.begin(), v.end() - 1}, right, 1.0);
    for (const auto& [w, k] : left) {
        auto ext = w;
        ext.push_back(u.back());
        out[ext] += c * k;
    }
    for (const auto& [w, k] : right) {
        auto ext = w;
        ext.push_back(v.back());
        out[ext] += c * k;
    }
}

FamilySpec small_spec(int count, std::uint64_t seed) {
    FamilySpec s;
    s.count = count;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("feature columns: unit, time word and shuffle closure") {
    const auto family = PathFamily::generate(small_spec(30, 1));
    const auto f = build_features(family, 4);
    CHECK(f.cols == 1 + 3 + 9 + 27 + 81);
    const Word time{1};
    for (std::size_t r = 0; r < f.rows; ++r) {
        CHECK(f.at(r, 0) == 1.0);
        CHECK(f.at(r, column(f, time)) == doctest::Approx(family.spec().T).epsilon(1e-14));
    }
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs{{{2}, {3}}, {{2}, {1, 3}}, {{3, 2}, {2, 1}}, {{1}, {2, 2, 3}}};
    for (const auto& [u, v] : pairs) {
        std::map<std::vector<int>, double> expansion;
        shuffle_into(u, v, expansion, 1.0);
        for (std::size_t r = 0; r < f.rows; ++r) {
            double rhs = 0.0;
            for (const auto& [w, c] : expansion) rhs += c * f.at(r, column(f, Word(w)));
            CHECK(f.at(r, column(f, Word(u))) * f.at(r, column(f, Word(v))) == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("level-2 features agree with the time extension") {
    const auto family = PathFamily::generate(small_spec(10, 2));
    const auto f = build_features(family, 2);
    for (std::size_t r = 0; r < f.rows; ++r) {
        const TimeExtendedPath te(family.paths()[r]);
        const auto x = te(0.0, family.paths()[r].horizon());
        std::size_t c = 0;
        for (int k = 0; k <= 2; ++k) {
            for (double v : x.tensor().level(k)) CHECK(f.at(r, c++) == doctest::Approx(v).epsilon(1e-12).scale(1.0));
        }
    }
    const auto lower = f.truncate(1);
    CHECK(lower.cols == 4);
    CHECK(lower.at(3, 2) == f.at(3, 2));
}

TEST_CASE("family bound and out-of-family rejection") {
    auto spec = small_spec(40, 3);
    const auto free_family = PathFamily::generate(spec);
    for (double n : free_family.hoelder_norms()) CHECK(n <= free_family.R());

    spec.R = 1.2;
    const auto bounded = PathFamily::generate(spec);
    CHECK(bounded.size() == 40);
    CHECK(bounded.rejected() > 0);
    CHECK(bounded.R() == 1.2);
    for (double n : bounded.hoelder_norms()) CHECK(n <= 1.2);
    CHECK_NOTHROW(bounded.require_member(bounded.paths()[0]));

    const PiecewiseLinearPath wild({0.0, 0.5, 1.0}, {{0.0, 0.0}, {5.0, -5.0}, {0.0, 0.0}});
    CHECK_THROWS_AS(bounded.require_member(wild), OutOfFamilyError);
    const PiecewiseLinearPath wrong_dim({0.0, 1.0}, {{0.0}, {0.1}});
    CHECK_THROWS_AS(bounded.require_member(wrong_dim), OutOfFamilyError);
    spec.R = 1e-3;
    CHECK_THROWS_AS(PathFamily::generate(spec), std::invalid_argument);
}

TEST_CASE("fits: zero target, an existing column, ridge against normal equations") {
    const auto family = PathFamily::generate(small_spec(60, 4));
    const auto f = build_features(family, 2);

    const auto zero = fit_linear_functional(f, std::vector<double>(f.rows, 0.0));
    CHECK(zero.functional.terms().empty());
    CHECK(zero.train_sup_err == 0.0);
    CHECK(zero.rank_deficient);  // unit, time and time-time columns are collinear

    const Word w{2, 3};
    SweepOptions opts;
    opts.levels = {2, 3};
    opts.seed = 9;
    const auto report = uat_sweep(family, terminal_coordinate_target(w), opts);
    for (const auto& row : report.levels) {
        CHECK(row.test_sup_err <= 1e-8);
        CHECK(row.train_sup_err <= 1e-8);
    }

    // One feature plus the unit column: solve the 2x2 ridge normal equations by hand.
    FeatureMatrix g;
    g.shape = TensorShape(1, 1);
    g.rows = 5;
    g.cols = 2;
    const std::vector<double> xs{0.1, -0.4, 0.7, 1.3, 0.2}, ys{1.0, 0.5, -0.2, 2.0, 0.3};
    for (double x : xs) {
        g.data.push_back(1.0);
        g.data.push_back(x);
    }
    const double lambda = 0.3;
    double s0 = 0, s1 = 0, s11 = 0, b0 = 0, b1 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s0 += 1;
        s1 += xs[i];
        s11 += xs[i] * xs[i];
        b0 += ys[i];
        b1 += xs[i] * ys[i];
    }
    const double a00 = s0 + lambda, a01 = s1, a11 = s11 + lambda;
    const double det = a00 * a11 - a01 * a01;
    const double c0 = (a11 * b0 - a01 * b1) / det, c1 = (a00 * b1 - a01 * b0) / det;
    const auto ridge = fit_linear_functional(g, ys, lambda);
    CHECK(ridge.functional.coeff(Word{}) == doctest::Approx(c0).epsilon(1e-12));
    CHECK(ridge.functional.coeff(Word{1}) == doctest::Approx(c1).epsilon(1e-12));
    CHECK_FALSE(ridge.rank_deficient);

    CHECK_THROWS_AS(fit_linear_functional(g, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear_functional(g, ys, -1.0), std::invalid_argument);
}

TEST_CASE("shuffle_square is exactly linear from level two") {
    const auto family = PathFamily::generate(small_spec(200, 5));
    SweepOptions opts;
    opts.levels = {1, 2, 3};
    const auto report = uat_sweep(family, shuffle_square_target(2), opts);
    CHECK(report.levels[0].test_sup_err > 1e-3);
    CHECK(report.levels[1].test_sup_err <= 1e-8);
    CHECK(report.levels[2].test_sup_err <= 1e-8);

    // Predictions of the fitted l coincide with those of 3 sh 3 = 2 (3,3), up to the null space.
    const auto f = build_features(family, 2);
    const auto pred = predict(f, report.levels[1].functional);
    for (std::size_t r = 0; r < f.rows; ++r) CHECK(pred[r] == doctest::Approx(2.0 * f.at(r, column(f, Word{3, 3}))).epsilon(1e-8).scale(1.0));
}

TEST_CASE("polynomial targets are recovered at level q k") {
    const auto family = PathFamily::generate(small_spec(300, 6));
    const auto target = custom_target([](const PiecewiseLinearPath& p) {
        const auto s = signature_pl(p.time_augmented(), 2, 0.0, p.horizon());
        return s.tensor().coeff(Word{2}) * s.tensor().coeff(Word{2, 3}) - 0.5 * s.tensor().coeff(Word{1, 3});
    });
    SweepOptions opts;
    opts.levels = {4};
    CHECK(uat_sweep(family, target, opts).levels[0].test_sup_err <= 1e-6);
}

TEST_CASE("single path, determinism and the decay sweep") {
    const auto one = PathFamily::generate(small_spec(1, 7));
    const auto single = uat_sweep(one, smooth_of_increment_target({1.0, 1.0, 1.0}), {});
    CHECK(single.n_test == 0);
    for (const auto& row : single.levels) {
        CHECK(row.train_sup_err <= 1e-12);
        CHECK(row.test_sup_err == 0.0);
    }

    const auto family = PathFamily::generate(small_spec(200, 8));
    SweepOptions opts;
    opts.seed = 8;
    const auto a = uat_sweep(family, smooth_of_increment_target({1.0, 1.0, 1.0}), opts);
    const auto b = uat_sweep(PathFamily::generate(small_spec(200, 8)), smooth_of_increment_target({1.0, 1.0, 1.0}), opts);
    REQUIRE(a.levels.size() == 4);
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        CHECK(a.levels[i].train_sup_err == b.levels[i].train_sup_err);
        CHECK(a.levels[i].test_sup_err == b.levels[i].test_sup_err);
        CHECK(to_json(a.levels[i].functional) == to_json(b.levels[i].functional));
        CHECK(a.levels[i].n_features == TensorShape(3, a.levels[i].level).total_size());
        if (i > 0) CHECK(a.levels[i].test_sup_err <= 1.1 * a.levels[i - 1].test_sup_err);
    }
    CHECK(a.n_train + a.n_test == 200);
    CHECK(a.n_test == 50);

    // Negative control: runs, but no decay is asserted.
    const auto control = uat_sweep(family, level_norm_target(2), opts);
    for (const auto& row : control.levels) CHECK(row.test_sup_err >= 0.0);

    // A time-free phi is accepted; a wrong length is not.
    CHECK(smooth_of_increment_target({1.0, 1.0})(family.paths()[0]) ==
          doctest::Approx(std::sin(family.paths()[0].point(4)[0] + family.paths()[0].point(4)[1])));
    CHECK_THROWS_AS(smooth_of_increment_target({1.0})(family.paths()[0]), std::invalid_argument);
}

TEST_CASE("config, CSV and JSON outputs") {
    std::istringstream in(
        "family.count = 20\nfamily.d = 1\nfamily.seed = 3\nfamily.amplitude = 0.2\n"
        "target.kind = shuffle_square\ntarget.params = 1\nsweep.levels = 1,2\nsweep.holdout = 0.5\n");
    const auto cfg = Config::parse(in);
    const auto spec = FamilySpec::from_config(cfg);
    CHECK(spec.count == 20);
    CHECK(spec.d == 1);
    CHECK_FALSE(spec.R.has_value());
    const auto opts = SweepOptions::from_config(cfg);
    CHECK(opts.levels == std::vector<int>{1, 2});
    CHECK(opts.seed == 3);
    const auto target = target_from_config(cfg, spec.d);
    CHECK(target.kind == TargetKind::shuffle_square);

    const auto report = uat_sweep(PathFamily::generate(spec), target, opts);
    std::ostringstream csv;
    write_report_csv(csv, report);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "level,train_sup_err,test_sup_err,n_features,seconds,rank,condition");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 2);

    const auto j = functional_json(report.levels[1]);
    CHECK(j.at("level") == 2);
    const auto back = functional_from_json(j.at("functional"));
    CHECK(to_json(back) == to_json(report.levels[1].functional));

    Config bad;
    bad.set("target.kind", "custom");
    CHECK_THROWS_AS(target_from_config(bad, 2), std::invalid_argument);
    bad.set("target.kind", "nonsense");
    CHECK_THROWS_AS(target_from_config(bad, 2), std::invalid_argument);
    Config bad_family;
    bad_family.set("family.amplitude", "-1");
    CHECK_THROWS_AS(FamilySpec::from_config(bad_family), std::invalid_argument);
    Config bad_sweep;
    bad_sweep.set("sweep.holdout", "1.0");
    CHECK_THROWS_AS(SweepOptions::from_config(bad_sweep), std::invalid_argument);
}
