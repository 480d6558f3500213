// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "roughpath/arens_eells.hpp"
#include "roughpath/grouplike.hpp"
#include "roughpath/norms.hpp"
#include "roughpath/random.hpp"
#include "roughpath/rough_path.hpp"
#include "roughpath/uat_lab.hpp"
#include "test_support.hpp"

using namespace rp;
using rp::testing::max_diff;
using rp::testing::random_pl_path;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome counterexample_norms() {
    const auto r = appendix_f_counterexample();
    const bool ok = r.phi_norm == 2 && r.A_norm == 1 && r.image_norm == 8;
    return {ok, "phi_norm=" + std::to_string(r.phi_norm) + " A_norm=" + std::to_string(r.A_norm) +
                    " image_norm=" + std::to_string(r.image_norm)};
}

// The 200 seeded paths shared by criteria 2 and 3: d cycles through 1..4, N through 1..5.
struct Sample {
    PiecewiseLinearPath path;
    int N;
};

std::vector<Sample> chen_samples() {
    Rng rng(2002);
    std::vector<Sample> out;
    for (int i = 0; i < 200; ++i) {
        const int d = 1 + i % 4;
        const int N = 1 + (i / 4) % 5;
        out.push_back({random_pl_path(rng, d, 2 + i % 8), N});
    }
    return out;
}

Outcome chen_identity(const std::vector<Sample>& samples) {
    Rng rng(2003);
    double worst = 0.0;
    for (const auto& s : samples) {
        const auto x = exact_pl_functional(s.path, s.N);
        auto triples = sample_triples(1.0, 32, rng);
        for (double b : x.breakpoints()) triples.push_back({0.0, b, 1.0});
        worst = std::max(worst, chen_check(x, triples));
    }
    return {worst <= 1e-10, "max chen residual " + fmt(worst) + " (tol 1e-10)"};
}

Outcome weak_geometricity(const std::vector<Sample>& samples) {
    double weak = 0.0, geng = 0.0, round = 0.0;
    for (const auto& s : samples) {
        const auto sig = signature_pl(s.path, s.N, 0.0, 1.0);
        weak = std::max(weak, weakly_grouplike_test(sig));
        geng = std::max(geng, geng_primal_test(sig));
        round = std::max(round, grouplike_roundtrip(sig));
    }
    return {weak <= 1e-10 && geng <= 1e-10 && round <= 1e-8,
            "weakly " + fmt(weak) + ", geng " + fmt(geng) + " (tol 1e-10), roundtrip " + fmt(round) + " (tol 1e-8)"};
}

Outcome lyons_lift_oracle() {
    Rng rng(2004);
    LiftOptions opts;
    opts.depths = {18};
    LiftOptions extrap;
    extrap.depths = {8, 9, 10, 11, 12};
    extrap.extrapolate = true;
    double worst = 0.0, worst_extrap = 0.0, worst_norm = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto path = random_pl_path(rng, 2, 2 + i % 4);
        const auto x2 = exact_pl_functional(path, 2);
        // The input is a genuine alpha = 0.4 rough path: record its Hoelder norm.
        worst_norm = std::max(worst_norm, hoelder_norm(x2, hoelder_params_for(x2, 0.4, 6)));
        const auto trace = lift_trace(x2, 3, 0.0, 1.0, opts);
        const auto exact = signature_pl(path, 3, 0.0, 1.0).tensor();
        worst = std::max(worst, max_diff(trace.values.back(), exact));
        worst_extrap = std::max(worst_extrap, max_diff(lift_trace(x2, 3, 0.0, 1.0, extrap).best(), exact));
    }
    const std::vector<double> A{0.0, 1.5, -0.5, -1.5, 0.0, 2.0, 0.5, -2.0, 0.0};
    LiftOptions area_opts;
    area_opts.depths = {8};
    const auto lifted = lyons_lift(pure_area_functional(3, A, 1.0), 3, area_opts);
    double area_block = 0.0;
    for (auto [s, t] : {std::pair{0.0, 1.0}, std::pair{0.2, 0.9}}) {
        const auto v = lifted(s, t);
        for (double c : v.tensor().level(3)) area_block = std::max(area_block, std::abs(c));
    }
    return {worst <= 1e-9 && area_block <= 1e-10,
            "plain product at depth 18: max error " + fmt(worst) + " (tol 1e-9; extrapolated over depths 8-12: " +
                fmt(worst_extrap) + "); pure-area level 3 " + fmt(area_block) +
                " (tol 1e-10); max 0.4-Hoelder norm of inputs " + fmt(worst_norm)};
}

Outcome projection_identity() {
    Rng rng(2005);
    LiftOptions opts;
    opts.depths = {3, 4, 5, 6};
    opts.extrapolate = true;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int d = 2 + i % 3;
        const auto x = exact_pl_functional(random_pl_path(rng, d, 2 + i % 5), 2);
        std::vector<std::vector<double>> y(3, std::vector<double>(static_cast<std::size_t>(d)));
        for (auto& row : y) {
            for (double& c : row) c = rng.uniform(-1, 1);
        }
        const auto lx = lyons_lift(x, 3, opts);
        const auto lpx = lyons_lift(project_pi_y(x, y), 3, opts);
        const TensorShape s3(3, 3);
        for (double t : {0.4, 1.0}) {
            double lhs = 0.0;
            const auto v = lx(0.0, t).tensor();
            for (const Word& w : all_words(d, 3)) {
                if (w.size() != 3) continue;
                lhs += v.coeff(w) * y[0][static_cast<std::size_t>(w[0] - 1)] * y[1][static_cast<std::size_t>(w[1] - 1)] *
                       y[2][static_cast<std::size_t>(w[2] - 1)];
            }
            const double rhs = pair(lpx(0.0, t).tensor(), LinearFunctional::word(s3, Word{1, 2, 3}));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return {worst <= 1e-8, "max |lhs - rhs| " + fmt(worst) + " (tol 1e-8)"};
}

Outcome time_extension() {
    Rng rng(2006);
    const auto path = random_pl_path(rng, 3, 7, 2.0);
    const TimeExtendedPath te(path);
    const TensorShape shape(4, 2);
    const auto time = LinearFunctional::word(shape, TimeExtendedPath::time_word());
    double pair_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double s = rng.uniform(0, 2), t = rng.uniform(0, 2);
        pair_err = std::max(pair_err, std::abs(pair(te(s, t).tensor(), time) - (t - s)));
    }
    double chen = 0.0, max_C = 0.0;
    bool ordered = true;
    for (int i = 0; i < 20; ++i) {
        const auto p = random_pl_path(rng, 1 + i % 3, 3 + i % 5);
        chen = std::max(chen, chen_check(time_extend(p).functional(), sample_triples(1.0, 32, rng)));
        const auto b = time_extension_constant(p, 0.4, 6);
        ordered = ordered && b.path_norm <= b.extended_norm && std::isfinite(b.C);
        max_C = std::max(max_C, b.C);
    }
    return {pair_err <= 1e-12 && chen <= 1e-10 && ordered,
            "time-word pairing error " + fmt(pair_err) + " (tol 1e-12), chen " + fmt(chen) +
                " (tol 1e-10), ||x|| <= ||x_hat|| on all 20 paths: " + (ordered ? "yes" : "no") + ", measured C = " + fmt(max_C)};
}

Outcome arens_eells_duality() {
    Rng rng(2007);
    std::size_t violations = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int p = 1 + trial % 3;
        const int n = 2 + trial % 6;
        std::vector<MoleculeAtom> atoms;
        std::vector<double> sum(static_cast<std::size_t>(p), 0.0);
        for (int i = 0; i < n; ++i) {
            std::vector<double> v(static_cast<std::size_t>(p));
            for (std::size_t k = 0; k < v.size(); ++k) {
                v[k] = i + 1 < n ? rng.uniform(-1, 1) : -sum[k];
                sum[k] += v[k];
            }
            atoms.push_back({(i + rng.uniform(0.1, 0.9)) / n, std::move(v)});
        }
        const Molecule m(std::move(atoms), 1e-9);
        const double alpha = rng.uniform(0.2, 1.0);
        std::vector<std::vector<double>> values;
        std::vector<double> cur(static_cast<std::size_t>(p), 0.0);
        for (std::size_t i = 0; i < m.support().size(); ++i) {
            for (double& c : cur) c += rng.uniform(-1, 1);
            values.push_back(cur);
        }
        const SampledFunction x(m.support(), values);
        const double bound = hoelder_coeff(x, alpha) * ae_norm(m, alpha).upper;
        // Relative slack of a few ulps for the rounding of the two factors.
        if (std::abs(pairing(x, m)) > bound * (1 + 1e-12)) ++violations;
    }
    double elementary = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 1 + trial % 4;
        std::vector<double> y(static_cast<std::size_t>(p));
        double nrm = 0.0;
        for (double& c : y) {
            c = rng.normal();
            nrm += c * c;
        }
        for (double& c : y) c /= std::sqrt(nrm);
        const double t = rng.uniform(0, 1), s = rng.uniform(0, 1), alpha = rng.uniform(0.2, 1.0);
        const ElementaryMolecule em(t, s, y);
        const double expected = std::pow(std::abs(t - s), alpha);
        // Explicit witness u -> |u - s|^alpha y.
        std::vector<std::vector<double>> w;
        for (double u : em.molecule().support()) {
            std::vector<double> v = y;
            for (double& c : v) c *= std::pow(std::abs(u - s), alpha);
            w.push_back(v);
        }
        const double witnessed = pairing(SampledFunction(em.molecule().support(), w), em.molecule());
        elementary = std::max({elementary, std::abs(ae_norm(em.molecule(), alpha).upper - expected), std::abs(witnessed - expected)});
    }
    return {violations == 0 && elementary <= 1e-9,
            std::to_string(violations) + " violations in 500 pairs; elementary molecule error " + fmt(elementary) + " (tol 1e-9)"};
}

Outcome weakstar_separation() {
    const int p = 64;
    std::vector<double> grid;
    for (int i = 0; i <= 16; ++i) grid.push_back(i / 16.0);
    std::vector<SampledFunction> family;
    for (int n = 0; n < p; ++n) {
        std::vector<std::vector<double>> vals;
        for (double t : grid) {
            std::vector<double> v(p, 0.0);
            v[static_cast<std::size_t>(n)] = std::sin(3 * t);
            vals.push_back(std::move(v));
        }
        family.emplace_back(grid, std::move(vals));
    }
    const SampledFunction limit(grid, std::vector<std::vector<double>>(grid.size(), std::vector<double>(p, 0.0)));
    // Fixed probes touching the first 8 coordinates: every member past index 8 is invisible to them.
    std::vector<Molecule> probes;
    for (const auto& m : elementary_probes({0.0, 0.25, 0.5, 1.0}, p)) {
        bool low = false;
        for (int k = 0; k < 8; ++k) low = low || m.atoms()[0].v[static_cast<std::size_t>(k)] != 0.0;
        if (low) probes.push_back(m);
    }
    const auto r = weakstar_convergence_check(family, limit, probes, 0.5, 10.0, p / 2);
    double tail_gap = 0.0, coeff_drift = 0.0;
    for (std::size_t n = 8; n < r.gap_trace.size(); ++n) tail_gap = std::max(tail_gap, r.gap_trace[n]);
    for (double c : r.member_coeffs) coeff_drift = std::max(coeff_drift, std::abs(c - r.member_coeffs[0]));
    return {r.bounded && tail_gap <= 1e-6 && coeff_drift <= 1e-12 && r.lower_semicontinuous && r.member_coeffs[0] > 0.1,
            "tail probe gap " + fmt(tail_gap) + " (tol 1e-6), coefficient drift " + fmt(coeff_drift) + " (tol 1e-12), member coeff " +
                fmt(r.member_coeffs[0]) + ", limit coeff " + fmt(r.limit_coeff)};
}

Outcome uat_exact() {
    FamilySpec spec;
    spec.count = 200;
    spec.seed = 2009;
    SweepOptions opts;
    opts.levels = {2};
    opts.seed = 2009;
    const auto r = uat_sweep(PathFamily::generate(spec), shuffle_square_target(1), opts);
    return {r.levels[0].test_sup_err <= 1e-8, "held-out sup error at N=2 " + fmt(r.levels[0].test_sup_err) + " (tol 1e-8)"};
}

Outcome uat_decay() {
    int good = 0;
    std::string curves;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        FamilySpec spec;
        spec.seed = seed;
        SweepOptions opts;
        opts.seed = seed;
        const auto r = uat_sweep(PathFamily::generate(spec), smooth_of_increment_target({1.0, 1.0, 1.0}), opts);
        bool ok = true;
        for (std::size_t i = 1; i < r.levels.size(); ++i) ok = ok && r.levels[i].test_sup_err <= 1.1 * r.levels[i - 1].test_sup_err;
        good += ok;
        if (seed == 0) {
            for (const auto& row : r.levels) curves += (curves.empty() ? "" : " ") + fmt(row.test_sup_err);
        }
    }
    return {good >= 9, std::to_string(good) + "/10 seeds non-increasing within 10%; seed 0 curve " + curves};
}

Outcome golden_cli() {
    const std::string data = RP_TEST_DATA_DIR;
    const std::string frozen = slurp(data + "/golden_signature_N4.json");
    bool same = !frozen.empty();
    for (int run = 0; run < 2; ++run) {
        const std::string out = std::string(RP_TEST_TMP_DIR) + "/acceptance_golden_" + std::to_string(run) + ".json";
        const std::string cmd = std::string("\"") + RP_CLI_BINARY + "\" sign \"" + data + "/golden_path.csv\" --level 4 > \"" + out + "\"";
        same = same && std::system(cmd.c_str()) == 0 && slurp(out) == frozen;
    }
    return {same, same ? "two runs byte-identical to the frozen fixture" : "output differs from the frozen fixture"};
}

}  // namespace

int main() {
    const auto samples = chen_samples();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 non-uniform norm counterexample", counterexample_norms},
        {"2 Chen identity", [&] { return chen_identity(samples); }},
        {"3 weak geometricity", [&] { return weak_geometricity(samples); }},
        {"4 Lyons lift oracle", lyons_lift_oracle},
        {"5 projection identity", projection_identity},
        {"6 time extension", time_extension},
        {"7 Arens-Eells duality", arens_eells_duality},
        {"8 weak-* vs norm separation", weakstar_separation},
        {"9 UAT exact recovery", uat_exact},
        {"10 UAT decay", uat_decay},
        {"11 golden CLI", golden_cli},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << " [" << fmt(secs) << " s]\n";
        failed += !o.pass;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
