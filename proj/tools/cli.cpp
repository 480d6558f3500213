#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roughpath/arens_eells.hpp"
#include "roughpath/config.hpp"
#include "roughpath/grouplike.hpp"
#include "roughpath/random.hpp"
#include "roughpath/rough_path.hpp"
#include "roughpath/uat_lab.hpp"

namespace rp::cli {

namespace {

using nlohmann::json;

bool is_json_file(const std::string& name) {
    return name.size() >= 5 && name.compare(name.size() - 5, 5, ".json") == 0;
}

json read_json_file(const std::string& name) {
    std::ifstream in(name);
    if (!in) throw std::runtime_error("cannot open '" + name + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("'" + name + "': " + e.what());
    }
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// Residual name -> (value, tolerance); the command passes when every value is within its tolerance.
struct Residuals {
    std::vector<std::pair<std::string, std::pair<double, double>>> items;

    void add(const std::string& name, double value, double tol) { items.push_back({name, {value, tol}}); }
    bool pass() const {
        return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.second.first <= i.second.second; });
    }
    json to_json() const {
        json r = json::object(), t = json::object();
        for (const auto& [name, vt] : items) {
            r[name] = vt.first;
            t[name] = vt.second;
        }
        return {{"residuals", r}, {"tolerances", t}, {"pass", pass()}};
    }
};

struct SignArgs {
    std::string input;
    int level = 3;
    std::optional<double> start, end;
};

int cmd_sign(const SignArgs& a, std::ostream& out) {
    const auto path = read_path_csv_file(a.input);
    const double s = a.start.value_or(0.0);
    const double t = a.end.value_or(path.horizon());
    print_json(out, to_json(signature_pl(path, a.level, s, t).tensor()));
    return exit_ok;
}

struct CheckArgs {
    std::string input;
    std::string which;
    int level = 3;
    std::optional<double> tol;
    std::uint64_t seed = 0;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
    Residuals res;
    const double strict = a.tol.value_or(1e-10);
    const double loose = a.tol.value_or(1e-8);
    if (is_json_file(a.input)) {
        const auto x = tensor_from_json(read_json_file(a.input));
        if (a.which == "chen") throw std::invalid_argument("check chen needs a path CSV, not a tensor");
        if (a.which == "lie") {
            const auto r = lie_membership(x);
            res.add("lie", *std::max_element(r.begin(), r.end()), loose);
        } else {
            const GroupElement g(x);
            if (a.which == "shuffle") {
                res.add("weakly_grouplike", weakly_grouplike_test(g), strict);
            } else {
                res.add("weakly_grouplike", weakly_grouplike_test(g), strict);
                res.add("geng_primal", geng_primal_test(g), strict);
                res.add("roundtrip", grouplike_roundtrip(g), loose);
            }
        }
    } else {
        const auto path = read_path_csv_file(a.input);
        const auto sig = signature_pl(path, a.level, 0.0, path.horizon());
        if (a.which == "chen") {
            const auto x = exact_pl_functional(path, a.level);
            Rng rng(a.seed);
            auto triples = sample_triples(path.horizon(), 64, rng);
            for (double b : x.breakpoints()) triples.push_back({0.0, b, path.horizon()});
            res.add("chen", chen_check(x, triples), strict);
        } else if (a.which == "lie") {
            res.add("lie", grouplike_roundtrip(sig), loose);
        } else if (a.which == "shuffle") {
            res.add("weakly_grouplike", weakly_grouplike_test(sig), strict);
        } else {
            res.add("weakly_grouplike", weakly_grouplike_test(sig), strict);
            res.add("geng_primal", geng_primal_test(sig), strict);
            res.add("roundtrip", grouplike_roundtrip(sig), loose);
        }
    }
    json j = res.to_json();
    j["which"] = a.which;
    print_json(out, j);
    return res.pass() ? exit_ok : exit_residual;
}

struct LiftArgs {
    std::string input;
    int level = 3;
    int from = 2;
    std::vector<int> depths{8};
    bool extrapolate = false;
    std::optional<double> start, end;
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

// The functional to lift together with its exact level-N value on [s,t].
struct LiftInput {
    MultiplicativeFunctional x;
    std::function<TruncatedTensor(int, double, double)> exact;
};

LiftInput lift_input(const LiftArgs& a) {
    if (!is_json_file(a.input)) {
        auto path = std::make_shared<PiecewiseLinearPath>(read_path_csv_file(a.input));
        return {exact_pl_functional(*path, a.from),
                [path](int N, double s, double t) { return signature_pl(*path, N, s, t).tensor(); }};
    }
    const auto j = read_json_file(a.input);
    if (j.value("kind", "") != "pure_area") throw std::invalid_argument("functional spec: only kind \"pure_area\" is supported");
    const int d = j.at("d").get<int>();
    const auto area = j.at("area").get<std::vector<double>>();
    const double horizon = j.value("horizon", 1.0);
    // exp((t-s) A) in T^(N): A (x) A already sits above level 3.
    return {pure_area_functional(d, area, horizon), [d, area](int N, double s, double t) {
                TruncatedTensor log = TruncatedTensor::zero(TensorShape(d, N));
                if (N >= 2) {
                    auto lvl = log.level(2);
                    for (std::size_t i = 0; i < area.size(); ++i) lvl[i] = (t - s) * area[i];
                }
                return tensor_exp(log).tensor();
            }};
}

double max_abs_diff(const TruncatedTensor& a, const TruncatedTensor& b) {
    double m = 0.0;
    for (int k = 0; k <= a.depth(); ++k) {
        for (std::size_t i = 0; i < a.level(k).size(); ++i) m = std::max(m, std::abs(a.level(k)[i] - b.level(k)[i]));
    }
    return m;
}

int cmd_lift(const LiftArgs& a, std::ostream& out) {
    const auto in = lift_input(a);
    const double s = a.start.value_or(0.0);
    const double t = a.end.value_or(in.x.horizon());
    LiftOptions opt;
    opt.depths = a.depths;
    opt.extrapolate = a.extrapolate;
    opt.seed = a.seed;
    // Same rejection as lyons_lift: the input must be multiplicative.
    Rng rng(a.seed);
    auto triples = sample_triples(in.x.horizon(), opt.chen_samples, rng);
    const double chen = chen_check(in.x, triples);
    if (chen > opt.chen_tolerance) throw std::invalid_argument("input is not multiplicative (Chen residual above tolerance)");

    const auto trace = lift_trace(in.x, a.level, s, t, opt);
    const auto exact = in.exact(a.level, s, t);
    out << "depth,pieces,max_change,max_error\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        out << trace.depths[i] << ',' << trace.pieces[i] << ',' << trace.change[i] << ',' << max_abs_diff(trace.values[i], exact)
            << '\n';
    }
    if (trace.extrapolated) out << "extrapolated,,," << max_abs_diff(*trace.extrapolated, exact) << '\n';
    return max_abs_diff(trace.best(), exact) <= a.tol ? exit_ok : exit_residual;
}

struct UatArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string out_prefix;
};

int cmd_uat(const UatArgs& a, std::ostream& out) {
    auto cfg = Config::load(a.config);
    cfg.require_known({"family.", "target.", "sweep."});
    if (a.seed) {
        cfg.set("family.seed", std::to_string(*a.seed));
        cfg.set("sweep.seed", std::to_string(*a.seed));
    }
    const auto spec = FamilySpec::from_config(cfg);
    const auto report = uat_sweep(PathFamily::generate(spec), target_from_config(cfg, spec.d), SweepOptions::from_config(cfg));
    write_report_csv(out, report);
    if (!a.out_prefix.empty()) {
        std::ofstream csv(a.out_prefix + ".csv");
        write_report_csv(csv, report);
        json fits = json::array();
        for (const auto& row : report.levels) fits.push_back(functional_json(row));
        std::ofstream js(a.out_prefix + ".json");
        js << json{{"R", report.R}, {"n_train", report.n_train}, {"n_test", report.n_test}, {"fits", fits}}.dump(2) << '\n';
        if (!csv || !js) throw std::runtime_error("cannot write outputs with prefix '" + a.out_prefix + "'");
    }
    if (a.tol && report.levels.back().test_sup_err > *a.tol) return exit_residual;
    return exit_ok;
}

struct AeArgs {
    std::string input;
    double alpha = 0.5;
    double tol = 1e-9;
};

int cmd_ae(const AeArgs& a, std::ostream& out) {
    const auto m = molecule_from_json(read_json_file(a.input));
    const auto r = ae_norm(m, a.alpha);
    json cert = json::array();
    for (const auto& term : r.certificate) cert.push_back({{"a", term.a}, {"t", term.t}, {"s", term.s}, {"y", term.y}});
    const double gap = r.upper - r.lower;
    print_json(out, {{"alpha", a.alpha},
                     {"upper", r.upper},
                     {"lower", r.lower},
                     {"gap", gap},
                     {"basis", r.basis},
                     {"certificate", cert},
                     {"witness", {{"direction", r.witness.direction}, {"times", r.witness.times}, {"potentials", r.witness.potentials}}}});
    return gap <= a.tol * std::max(1.0, r.upper) ? exit_ok : exit_residual;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Signatures, rough path lifts, norms and universal approximation experiments", "rpath"};
    app.require_subcommand(1);

    SignArgs sign;
    auto* sc_sign = app.add_subcommand("sign", "Signature of a path CSV over [start,end] as tensor JSON");
    sc_sign->add_option("path", sign.input, "Path CSV with header t,x1,...,xd")->required();
    sc_sign->add_option("--level", sign.level, "Truncation level")->capture_default_str()->check(CLI::Range(0, 12));
    sc_sign->add_option("--start", sign.start, "Start time (default 0)");
    sc_sign->add_option("--end", sign.end, "End time (default horizon)");

    CheckArgs check;
    auto* sc_check = app.add_subcommand("check", "Residuals of Chen, group-like, Lie or shuffle identities");
    sc_check->add_option("input", check.input, "Path CSV or tensor JSON (.json)")->required();
    sc_check->add_option("--which", check.which, "chen, grouplike, lie or shuffle")
        ->required()
        ->check(CLI::IsMember({"chen", "grouplike", "lie", "shuffle"}));
    sc_check->add_option("--level", check.level, "Truncation level for path inputs")->capture_default_str()->check(CLI::Range(1, 10));
    sc_check->add_option("--tol", check.tol, "Tolerance for every residual (default 1e-10, 1e-8 for Lie residuals)");
    sc_check->add_option("--seed", check.seed, "Seed for sampled Chen triples")->capture_default_str();

    LiftArgs lift;
    auto* sc_lift = app.add_subcommand("lift", "Convergence trace of the Lyons lift as CSV");
    sc_lift->add_option("input", lift.input, "Path CSV, or functional spec JSON {\"kind\":\"pure_area\",\"d\",\"area\",\"horizon\"}")
        ->required();
    sc_lift->add_option("--level", lift.level, "Target level")->capture_default_str()->check(CLI::Range(1, 10));
    sc_lift->add_option("--from", lift.from, "Level of the path input before lifting")->capture_default_str()->check(CLI::Range(1, 10));
    sc_lift->add_option("--depth", lift.depths, "Dyadic depths, comma separated")->delimiter(',')->capture_default_str();
    sc_lift->add_flag("--extrapolate", lift.extrapolate, "Extrapolate the per-depth values to zero mesh");
    sc_lift->add_option("--start", lift.start, "Start time (default 0)");
    sc_lift->add_option("--end", lift.end, "End time (default horizon)");
    sc_lift->add_option("--tol", lift.tol, "Tolerance on the max coordinate error of the result")->capture_default_str();
    sc_lift->add_option("--seed", lift.seed, "Seed for the Chen screening triples")->capture_default_str();

    UatArgs uat;
    auto* sc_uat = app.add_subcommand("uat", "Signature regression sweep; report CSV on standard output");
    sc_uat->add_option("--config", uat.config, "Experiment config (family.*, target.*, sweep.* keys)")->required();
    sc_uat->add_option("--seed", uat.seed, "Overrides family.seed and sweep.seed");
    sc_uat->add_option("--tol", uat.tol, "Fail when the last level's held-out sup error exceeds this");
    sc_uat->add_option("--out", uat.out_prefix, "Also write PREFIX.csv and the fitted functionals to PREFIX.json");

    AeArgs ae;
    auto* sc_ae = app.add_subcommand("ae", "Arens-Eells norm bounds and certificate of a molecule JSON");
    sc_ae->add_option("molecule", ae.input, "Molecule JSON [{\"t\":..,\"v\":[..]}, ...]")->required();
    sc_ae->add_option("--alpha", ae.alpha, "Hoelder exponent in (0,1]")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sc_ae->add_option("--tol", ae.tol, "Relative tolerance on upper - lower")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (*sc_sign) return cmd_sign(sign, out);
        if (*sc_check) return cmd_check(check, out);
        if (*sc_lift) return cmd_lift(lift, out);
        if (*sc_uat) return cmd_uat(uat, out);
        if (*sc_ae) return cmd_ae(ae, out);
    } catch (const std::exception& e) {
        err << "rpath: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}

}  // namespace rp::cli
