#include "roughpath/rough_path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rp {

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> times, std::vector<std::vector<double>> points)
    : times_(std::move(times)), points_(std::move(points)) {
    if (times_.size() < 2) throw std::invalid_argument("PiecewiseLinearPath: need at least two samples");
    if (points_.size() != times_.size()) throw std::invalid_argument("PiecewiseLinearPath: times/points length mismatch");
    if (times_.front() != 0.0) throw std::invalid_argument("PiecewiseLinearPath: first time must be 0");
    dim_ = static_cast<int>(points_.front().size());
    if (dim_ < 1) throw std::invalid_argument("PiecewiseLinearPath: points must have dimension >= 1");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (static_cast<int>(points_[i].size()) != dim_) {
            throw std::invalid_argument("PiecewiseLinearPath: sample " + std::to_string(i) + " has wrong dimension");
        }
        if (!std::isfinite(times_[i])) throw std::invalid_argument("PiecewiseLinearPath: non-finite time");
        for (double v : points_[i]) {
            if (!std::isfinite(v)) throw std::invalid_argument("PiecewiseLinearPath: non-finite value");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw std::invalid_argument("PiecewiseLinearPath: times must be strictly increasing at sample " +
                                        std::to_string(i));
        }
    }
}

std::vector<double> PiecewiseLinearPath::value_at(double t) const {
    if (t < 0.0 || t > horizon()) throw std::out_of_range("value_at: time outside [0,T]");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.end() ? times_.size() - 2 : static_cast<std::size_t>(it - times_.begin()) - 1;
    i = std::min(i, times_.size() - 2);
    const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
    std::vector<double> out(static_cast<std::size_t>(dim_));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = points_[i][j] + w * (points_[i + 1][j] - points_[i][j]);
    return out;
}

PiecewiseLinearPath PiecewiseLinearPath::time_augmented() const {
    std::vector<std::vector<double>> pts;
    pts.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        std::vector<double> p{times_[i]};
        p.insert(p.end(), points_[i].begin(), points_[i].end());
        pts.push_back(std::move(p));
    }
    return PiecewiseLinearPath(times_, std::move(pts));
}

PiecewiseLinearPath read_path_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("path CSV: empty input");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 2 || header[0] != "t") {
        throw std::runtime_error("path CSV line 1: header must be t,x1,...,xd");
    }
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j] != "x" + std::to_string(j)) {
            throw std::runtime_error("path CSV line 1: expected column x" + std::to_string(j) + ", got '" + header[j] + "'");
        }
    }
    const std::size_t d = header.size() - 1;
    std::vector<double> times;
    std::vector<std::vector<double>> points;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("path CSV line " + std::to_string(lineno) + ": cannot parse '" + cell + "'");
            }
        }
        if (row.size() != d + 1) {
            throw std::runtime_error("path CSV line " + std::to_string(lineno) + ": expected " + std::to_string(d + 1) +
                                     " fields, got " + std::to_string(row.size()));
        }
        if (times.empty() && row[0] != 0.0) {
            throw std::runtime_error("path CSV line " + std::to_string(lineno) + ": first time must be 0");
        }
        if (!times.empty() && !(row[0] > times.back())) {
            throw std::runtime_error("path CSV line " + std::to_string(lineno) + ": time not strictly increasing");
        }
        times.push_back(row[0]);
        points.emplace_back(row.begin() + 1, row.end());
    }
    if (times.size() < 2) throw std::runtime_error("path CSV: need at least two rows");
    return PiecewiseLinearPath(std::move(times), std::move(points));
}

PiecewiseLinearPath read_path_csv_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("cannot open " + filename);
    return read_path_csv(in);
}

void write_path_csv(std::ostream& out, const PiecewiseLinearPath& path) {
    out << "t";
    for (int j = 1; j <= path.dim(); ++j) out << ",x" << j;
    out << "\n";
    std::ostringstream buf;
    buf.precision(17);
    for (std::size_t i = 0; i < path.size(); ++i) {
        buf << path.times()[i];
        for (double v : path.point(i)) buf << "," << v;
        buf << "\n";
    }
    out << buf.str();
}

namespace {

void require_in_range(double s, double t, double horizon, const char* who) {
    if (s < 0.0 || t < 0.0 || s > horizon || t > horizon) {
        throw std::out_of_range(std::string(who) + ": times outside [0,T]");
    }
}

// exp of a pure level-1 element: level k is v^{(x)k} / k!.
TruncatedTensor exp_of_vector(int d, int N, std::span<const double> v) {
    TruncatedTensor out = TruncatedTensor::unit(TensorShape(d, N));
    for (int k = 1; k <= N; ++k) {
        auto prev = out.level(k - 1);
        auto cur = out.level(k);
        const double inv_k = 1.0 / k;
        for (std::size_t p = 0; p < prev.size(); ++p) {
            for (int j = 0; j < d; ++j) cur[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = prev[p] * v[static_cast<std::size_t>(j)] * inv_k;
        }
    }
    return out;
}

}  // namespace

GroupElement signature_pl(const PiecewiseLinearPath& path, int N, double s, double t) {
    require_in_range(s, t, path.horizon(), "signature_pl");
    const TensorShape shape(path.dim(), N);
    if (s == t) return GroupElement::identity(shape);
    if (s > t) return tensor_inverse(signature_pl(path, N, t, s));

    const auto& times = path.times();
    const int d = path.dim();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
    i = i == 0 ? 0 : i - 1;
    TruncatedTensor acc = TruncatedTensor::unit(shape);
    std::vector<double> delta(static_cast<std::size_t>(d));
    bool first = true;
    for (; i + 1 < times.size() && times[i] < t; ++i) {
        const double a = std::max(s, times[i]);
        const double b = std::min(t, times[i + 1]);
        if (!(b > a)) continue;
        const double frac = (b - a) / (times[i + 1] - times[i]);
        for (int j = 0; j < d; ++j) {
            delta[static_cast<std::size_t>(j)] = (path.point(i + 1)[static_cast<std::size_t>(j)] - path.point(i)[static_cast<std::size_t>(j)]) * frac;
        }
        TruncatedTensor piece = exp_of_vector(d, N, delta);
        acc = first ? std::move(piece) : tensor_mul(acc, piece);
        first = false;
    }
    acc.scalar() = 1.0;
    return GroupElement(std::move(acc));
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::exact_pl: return "exact_pl";
        case Provenance::pure_area: return "pure_area";
        case Provenance::lifted: return "lifted";
        case Provenance::custom: return "custom";
    }
    return "unknown";
}

MultiplicativeFunctional::MultiplicativeFunctional(TensorShape shape, double horizon, Evaluator eval,
                                                   Provenance provenance, std::vector<double> breakpoints)
    : shape_(shape), horizon_(horizon), eval_(std::move(eval)), provenance_(provenance),
      breakpoints_(std::move(breakpoints)) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("MultiplicativeFunctional: horizon must be positive");
    std::sort(breakpoints_.begin(), breakpoints_.end());
}

GroupElement MultiplicativeFunctional::operator()(double s, double t) const {
    require_in_range(s, t, horizon_, "MultiplicativeFunctional");
    GroupElement g = eval_(s, t);
    if (!(g.shape() == shape_)) throw std::logic_error("MultiplicativeFunctional: evaluator returned wrong shape");
    return g;
}

MultiplicativeFunctional exact_pl_functional(const PiecewiseLinearPath& path, int N) {
    const auto& times = path.times();
    std::vector<double> interior(times.begin() + 1, times.end() - 1);
    return MultiplicativeFunctional(
        TensorShape(path.dim(), N), path.horizon(), [path, N](double s, double t) { return signature_pl(path, N, s, t); },
        Provenance::exact_pl, std::move(interior));
}

MultiplicativeFunctional pure_area_functional(int d, std::vector<double> area, double horizon) {
    if (area.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
        throw std::invalid_argument("pure_area_functional: area must be d x d");
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (area[static_cast<std::size_t>(i * d + j)] != -area[static_cast<std::size_t>(j * d + i)]) {
                throw std::invalid_argument("pure_area_functional: area must be antisymmetric");
            }
        }
    }
    const TensorShape shape(d, 2);
    return MultiplicativeFunctional(
        shape, horizon,
        [shape, area](double s, double t) {
            TruncatedTensor x = TruncatedTensor::unit(shape);
            auto lvl = x.level(2);
            for (std::size_t i = 0; i < area.size(); ++i) lvl[i] = (t - s) * area[i];
            return GroupElement(std::move(x));
        },
        Provenance::pure_area);
}

MultiplicativeFunctional custom_functional(TensorShape shape, double horizon, MultiplicativeFunctional::Evaluator eval) {
    return MultiplicativeFunctional(shape, horizon, std::move(eval), Provenance::custom);
}

std::vector<TimeTriple> sample_triples(double horizon, std::size_t count, Rng& rng) {
    std::vector<TimeTriple> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::array<double, 3> v{rng.uniform(0, horizon), rng.uniform(0, horizon), rng.uniform(0, horizon)};
        std::sort(v.begin(), v.end());
        out.push_back({v[0], v[1], v[2]});
    }
    return out;
}

double chen_check(const MultiplicativeFunctional& x, std::span<const TimeTriple> triples) {
    double worst = 0.0;
    for (const auto& [s, u, t] : triples) {
        const TruncatedTensor lhs = tensor_mul(x(s, u).tensor(), x(u, t).tensor());
        worst = std::max(worst, level_sum_norm(lhs - x(s, t).tensor()));
    }
    return worst;
}

std::vector<double> lift_partition(double s, double t, std::span<const double> breakpoints, int depth) {
    if (!(s < t)) throw std::invalid_argument("lift_partition: need s < t");
    if (depth < 0) throw std::invalid_argument("lift_partition: negative depth");
    std::vector<double> base{s};
    for (double b : breakpoints) {
        if (b > s && b < t) base.push_back(b);
    }
    base.push_back(t);
    std::sort(base.begin(), base.end());
    const std::size_t nbase = base.size() - 1;
    int shift = 0;
    while ((std::size_t{1} << shift) < nbase) ++shift;
    const std::size_t per = std::size_t{1} << std::max(0, depth - shift);
    std::vector<double> pts;
    pts.reserve(nbase * per + 1);
    for (std::size_t i = 0; i < nbase; ++i) {
        const double a = base[i];
        const double b = base[i + 1];
        pts.push_back(a);
        for (std::size_t k = 1; k < per; ++k) pts.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(per));
    }
    pts.push_back(t);
    return pts;
}

namespace {

// Pieces per base interval at a depth; nested across depths once depth >= shift.
std::size_t pieces_per_base(std::size_t nbase, int depth) {
    int shift = 0;
    while ((std::size_t{1} << shift) < nbase) ++shift;
    return std::size_t{1} << std::max(0, depth - shift);
}

TruncatedTensor partition_product(const MultiplicativeFunctional& x, int target_N, const std::vector<double>& pts) {
    TruncatedTensor acc = extend_level(x(pts[0], pts[1]).tensor(), target_N);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        acc = tensor_mul(acc, extend_level(x(pts[i], pts[i + 1]).tensor(), target_N));
    }
    return acc;
}

// Neville's scheme evaluated at h = 0.
TruncatedTensor extrapolate_to_zero(const std::vector<double>& h, std::vector<TruncatedTensor> values) {
    const std::size_t n = values.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double hi = h[i];
            const double hj = h[i + level];
            // P_{i..j}(0) = (h_i P_{i+1..j} - h_j P_{i..j-1}) / (h_i - h_j)
            TruncatedTensor next = (hi / (hi - hj)) * values[i + 1];
            next -= (hj / (hi - hj)) * values[i];
            values[i] = std::move(next);
        }
    }
    return values[0];
}

}  // namespace

LiftTrace lift_trace(const MultiplicativeFunctional& x, int target_N, double s, double t, const LiftOptions& options) {
    if (target_N < x.shape().N) throw std::invalid_argument("lyons_lift: target level below input level");
    if (options.depths.empty()) throw std::invalid_argument("lyons_lift: no depths given");
    if (!(s < t)) throw std::invalid_argument("lift_trace: need s < t");
    std::vector<int> depths = options.depths;
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());

    std::size_t nbase = 1;
    for (double b : x.breakpoints()) {
        if (b > s && b < t) ++nbase;
    }

    LiftTrace trace;
    std::vector<double> h;
    std::vector<TruncatedTensor> nested;
    std::size_t last_per = 0;
    for (int depth : depths) {
        const auto pts = lift_partition(s, t, x.breakpoints(), depth);
        TruncatedTensor value = partition_product(x, target_N, pts);
        value.scalar() = 1.0;
        trace.change.push_back(trace.values.empty() ? 0.0 : (value - trace.values.back()).max_abs());
        trace.depths.push_back(depth);
        trace.pieces.push_back(pts.size() - 1);
        const std::size_t per = pieces_per_base(nbase, depth);
        if (per != last_per) {
            h.push_back(1.0 / static_cast<double>(per));
            nested.push_back(value);
            last_per = per;
        }
        trace.values.push_back(std::move(value));
    }
    if (options.extrapolate && nested.size() >= 2) {
        TruncatedTensor ex = extrapolate_to_zero(h, std::move(nested));
        // Levels up to the input level are exact at every depth.
        for (int k = 0; k <= x.shape().N; ++k) {
            auto src = trace.values.back().level(k);
            std::copy(src.begin(), src.end(), ex.level(k).begin());
        }
        trace.extrapolated = std::move(ex);
    }
    return trace;
}

MultiplicativeFunctional lyons_lift(const MultiplicativeFunctional& x, int target_N, const LiftOptions& options) {
    if (target_N < x.shape().N) throw std::invalid_argument("lyons_lift: target level below input level");
    Rng rng(options.seed);
    auto triples = sample_triples(x.horizon(), options.chen_samples, rng);
    for (double b : x.breakpoints()) triples.push_back({0.0, b, x.horizon()});
    const double residual = chen_check(x, triples);
    if (residual > options.chen_tolerance) {
        throw std::invalid_argument("lyons_lift: input is not multiplicative (Chen residual " + std::to_string(residual) + ")");
    }
    if (target_N == x.shape().N) return x;
    const TensorShape shape(x.shape().d, target_N);
    auto eval = [x, target_N, options, shape](double s, double t) -> GroupElement {
        if (s == t) return GroupElement::identity(shape);
        if (s > t) {
            TruncatedTensor v = lift_trace(x, target_N, t, s, options).best();
            v.scalar() = 1.0;
            return tensor_inverse(GroupElement(std::move(v)));
        }
        TruncatedTensor v = lift_trace(x, target_N, s, t, options).best();
        v.scalar() = 1.0;
        return GroupElement(std::move(v));
    };
    return MultiplicativeFunctional(shape, x.horizon(), eval, Provenance::lifted, x.breakpoints());
}

TimeExtensionParts time_extension_iso(std::span<const double> block, int d) {
    const std::size_t n = static_cast<std::size_t>(d) + 1;
    if (block.size() != n * n) throw std::invalid_argument("time_extension_iso: block must be (1+d)^2");
    TimeExtensionParts parts;
    parts.time = block[0];
    parts.time_then_space.assign(block.begin() + 1, block.begin() + static_cast<std::ptrdiff_t>(n));
    parts.space_then_time.resize(static_cast<std::size_t>(d));
    parts.space.resize(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    for (std::size_t i = 1; i < n; ++i) {
        parts.space_then_time[i - 1] = block[i * n];
        for (std::size_t j = 1; j < n; ++j) parts.space[(i - 1) * static_cast<std::size_t>(d) + (j - 1)] = block[i * n + j];
    }
    return parts;
}

std::vector<double> time_extension_iso_inverse(const TimeExtensionParts& parts) {
    const std::size_t d = parts.time_then_space.size();
    if (parts.space_then_time.size() != d || parts.space.size() != d * d) {
        throw std::invalid_argument("time_extension_iso_inverse: inconsistent part sizes");
    }
    const std::size_t n = d + 1;
    std::vector<double> block(n * n);
    block[0] = parts.time;
    for (std::size_t i = 1; i < n; ++i) {
        block[i] = parts.time_then_space[i - 1];
        block[i * n] = parts.space_then_time[i - 1];
        for (std::size_t j = 1; j < n; ++j) block[i * n + j] = parts.space[(i - 1) * d + (j - 1)];
    }
    return block;
}

namespace {

// Time-extended level-2 element over one linear piece of length h with increment delta.
// Young integrals on a linear piece: int (u-a) dx = int (x_u - x_a) du = delta h / 2.
TruncatedTensor time_extended_piece(double h, std::span<const double> delta) {
    const int d = static_cast<int>(delta.size());
    TruncatedTensor out = TruncatedTensor::unit(TensorShape(d + 1, 2));
    auto lvl1 = out.level(1);
    lvl1[0] = h;
    std::copy(delta.begin(), delta.end(), lvl1.begin() + 1);
    TimeExtensionParts parts;
    parts.time = 0.5 * h * h;
    parts.time_then_space.resize(static_cast<std::size_t>(d));
    parts.space_then_time.resize(static_cast<std::size_t>(d));
    parts.space.resize(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i) {
        const double young = 0.5 * h * delta[static_cast<std::size_t>(i)];
        parts.time_then_space[static_cast<std::size_t>(i)] = young;
        parts.space_then_time[static_cast<std::size_t>(i)] = young;
        for (int j = 0; j < d; ++j) {
            parts.space[static_cast<std::size_t>(i * d + j)] = 0.5 * delta[static_cast<std::size_t>(i)] * delta[static_cast<std::size_t>(j)];
        }
    }
    const auto block = time_extension_iso_inverse(parts);
    std::copy(block.begin(), block.end(), out.level(2).begin());
    return out;
}

GroupElement time_extended_value(const PiecewiseLinearPath& path, double s, double t) {
    const TensorShape shape(path.dim() + 1, 2);
    if (s == t) return GroupElement::identity(shape);
    if (s > t) return tensor_inverse(time_extended_value(path, t, s));
    const auto& times = path.times();
    const int d = path.dim();
    TruncatedTensor acc = TruncatedTensor::unit(shape);
    std::vector<double> delta(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i + 1 < times.size() && times[i] < t; ++i) {
        const double a = std::max(s, times[i]);
        const double b = std::min(t, times[i + 1]);
        if (!(b > a)) continue;
        const double frac = (b - a) / (times[i + 1] - times[i]);
        for (int j = 0; j < d; ++j) {
            delta[static_cast<std::size_t>(j)] = (path.point(i + 1)[static_cast<std::size_t>(j)] - path.point(i)[static_cast<std::size_t>(j)]) * frac;
        }
        acc = tensor_mul(acc, time_extended_piece(b - a, delta));
    }
    acc.scalar() = 1.0;
    return GroupElement(std::move(acc));
}

MultiplicativeFunctional make_time_extension(const PiecewiseLinearPath& path, int N) {
    if (N != 2) throw std::invalid_argument("time_extend: only N = 2 is supported");
    const auto& times = path.times();
    std::vector<double> interior(times.begin() + 1, times.end() - 1);
    return MultiplicativeFunctional(
        TensorShape(path.dim() + 1, 2), path.horizon(),
        [path](double s, double t) { return time_extended_value(path, s, t); }, Provenance::custom, std::move(interior));
}

}  // namespace

TimeExtendedPath::TimeExtendedPath(const PiecewiseLinearPath& path, int N) : functional_(make_time_extension(path, N)) {}

TimeExtendedPath time_extend(const PiecewiseLinearPath& path, int N) { return TimeExtendedPath(path, N); }

MultiplicativeFunctional project_pi_y(const MultiplicativeFunctional& x, const std::vector<std::vector<double>>& y) {
    const int n = x.shape().N;
    const int d = x.shape().d;
    if (static_cast<int>(y.size()) != n + 1) {
        throw std::invalid_argument("project_pi_y: need N+1 = " + std::to_string(n + 1) + " vectors");
    }
    std::vector<double> matrix;
    for (const auto& row : y) {
        if (static_cast<int>(row.size()) != d) throw std::invalid_argument("project_pi_y: vector length must equal d");
        matrix.insert(matrix.end(), row.begin(), row.end());
    }
    const int rows = n + 1;
    return MultiplicativeFunctional(
        TensorShape(rows, n), x.horizon(),
        [x, matrix, rows](double s, double t) { return GroupElement(apply_linear_map(x(s, t).tensor(), matrix, rows)); },
        Provenance::custom, x.breakpoints());
}

}  // namespace rp
