#include "roughpath/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "roughpath/words.hpp"

namespace rp {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

TensorShape::TensorShape(int dim, int level) : d(dim), N(level) {
    if (d < 1) throw std::invalid_argument("TensorShape: d must be >= 1, got " + std::to_string(d));
    if (N < 0) throw std::invalid_argument("TensorShape: N must be >= 0, got " + std::to_string(N));
}

std::size_t TensorShape::level_size(int k) const { return ipow(static_cast<std::size_t>(d), k); }

std::size_t TensorShape::total_size() const {
    std::size_t s = 0;
    for (int k = 0; k <= N; ++k) s += level_size(k);
    return s;
}

namespace {

void require_same_shape(const TensorShape& a, const TensorShape& b, const char* op) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch (d=" + std::to_string(a.d) + ",N=" +
                                    std::to_string(a.N) + " vs d=" + std::to_string(b.d) + ",N=" +
                                    std::to_string(b.N) + ")");
    }
}

}  // namespace

TruncatedTensor::TruncatedTensor(TensorShape shape) : shape_(shape), levels_(static_cast<std::size_t>(shape.N) + 1) {
    for (int k = 0; k <= shape_.N; ++k) levels_[static_cast<std::size_t>(k)].assign(shape_.level_size(k), 0.0);
}

TruncatedTensor::TruncatedTensor(TensorShape shape, std::vector<std::vector<double>> levels)
    : shape_(shape), levels_(std::move(levels)) {
    if (levels_.size() != static_cast<std::size_t>(shape_.N) + 1) {
        throw std::invalid_argument("TruncatedTensor: expected " + std::to_string(shape_.N + 1) + " levels, got " +
                                    std::to_string(levels_.size()));
    }
    for (int k = 0; k <= shape_.N; ++k) {
        const auto& block = levels_[static_cast<std::size_t>(k)];
        if (block.size() != shape_.level_size(k)) {
            throw std::invalid_argument("TruncatedTensor: level " + std::to_string(k) + " has " +
                                        std::to_string(block.size()) + " entries, expected " +
                                        std::to_string(shape_.level_size(k)));
        }
        for (double v : block) {
            if (!std::isfinite(v)) throw std::invalid_argument("TruncatedTensor: non-finite coefficient");
        }
    }
}

TruncatedTensor TruncatedTensor::zero(TensorShape shape) { return TruncatedTensor(shape); }

TruncatedTensor TruncatedTensor::unit(TensorShape shape) {
    TruncatedTensor t(shape);
    t.scalar() = 1.0;
    return t;
}

TruncatedTensor TruncatedTensor::from_vector(TensorShape shape, std::span<const double> v) {
    if (v.size() != static_cast<std::size_t>(shape.d)) throw std::invalid_argument("from_vector: length must equal d");
    if (shape.N < 1) throw std::invalid_argument("from_vector: need N >= 1");
    TruncatedTensor t(shape);
    std::copy(v.begin(), v.end(), t.levels_[1].begin());
    return t;
}

std::span<const double> TruncatedTensor::level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
std::span<double> TruncatedTensor::level(int k) { return levels_.at(static_cast<std::size_t>(k)); }

double TruncatedTensor::coeff(const Word& w) const {
    if (!w.fits(shape_)) throw std::out_of_range("coeff: word does not fit tensor shape");
    return levels_[static_cast<std::size_t>(w.size())][w.flat_index(shape_.d)];
}

double& TruncatedTensor::coeff(const Word& w) {
    if (!w.fits(shape_)) throw std::out_of_range("coeff: word does not fit tensor shape");
    return levels_[static_cast<std::size_t>(w.size())][w.flat_index(shape_.d)];
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& other) {
    require_same_shape(shape_, other.shape_, "tensor_add");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        for (std::size_t i = 0; i < levels_[k].size(); ++i) levels_[k][i] += other.levels_[k][i];
    }
    return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& other) {
    require_same_shape(shape_, other.shape_, "tensor_sub");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        for (std::size_t i = 0; i < levels_[k].size(); ++i) levels_[k][i] -= other.levels_[k][i];
    }
    return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double c) {
    for (auto& block : levels_) {
        for (double& v : block) v *= c;
    }
    return *this;
}

double TruncatedTensor::max_abs() const {
    double m = 0.0;
    for (const auto& block : levels_) {
        for (double v : block) m = std::max(m, std::abs(v));
    }
    return m;
}

TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
TruncatedTensor operator*(double c, TruncatedTensor a) { return a *= c; }

TruncatedTensor tensor_add(const TruncatedTensor& a, const TruncatedTensor& b) { return a + b; }

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b) {
    require_same_shape(a.shape(), b.shape(), "tensor_mul");
    const TensorShape shape = a.shape();
    TruncatedTensor c(shape);
    for (int k = 0; k <= shape.N; ++k) {
        auto out = c.level(k);
        for (int i = 0; i <= k; ++i) {
            auto left = a.level(i);
            auto right = b.level(k - i);
            const std::size_t stride = right.size();
            for (std::size_t p = 0; p < left.size(); ++p) {
                const double lv = left[p];
                if (lv == 0.0) continue;
                double* dst = out.data() + p * stride;
                for (std::size_t q = 0; q < stride; ++q) dst[q] += lv * right[q];
            }
        }
    }
    return c;
}

GroupElement::GroupElement(TruncatedTensor t) : t_(std::move(t)) {
    if (t_.scalar() != 1.0) {
        throw std::invalid_argument("GroupElement: scalar part must equal 1, got " + std::to_string(t_.scalar()));
    }
}

GroupElement GroupElement::identity(TensorShape shape) { return GroupElement(TruncatedTensor::unit(shape)); }

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    TruncatedTensor c = tensor_mul(a.tensor(), b.tensor());
    c.scalar() = 1.0;
    return GroupElement(std::move(c));
}

GroupElement tensor_inverse(const GroupElement& a) {
    const TensorShape shape = a.shape();
    const TruncatedTensor one = TruncatedTensor::unit(shape);
    const TruncatedTensor b = one - a.tensor();
    // (1 - a)^i vanishes below level i, so N+1 terms are exact.
    TruncatedTensor h = one;
    for (int i = 0; i < shape.N; ++i) h = one + tensor_mul(b, h);
    h.scalar() = 1.0;
    return GroupElement(std::move(h));
}

GroupElement tensor_exp(const TruncatedTensor& a) {
    if (a.scalar() != 0.0) throw std::invalid_argument("tensor_exp: scalar part must be 0");
    const TensorShape shape = a.shape();
    const TruncatedTensor one = TruncatedTensor::unit(shape);
    TruncatedTensor h = one;
    for (int k = shape.N; k >= 1; --k) h = one + (1.0 / k) * tensor_mul(a, h);
    h.scalar() = 1.0;
    return GroupElement(std::move(h));
}

TruncatedTensor tensor_log(const GroupElement& a) {
    const TensorShape shape = a.shape();
    if (shape.N == 0) return TruncatedTensor::zero(shape);
    const TruncatedTensor one = TruncatedTensor::unit(shape);
    const TruncatedTensor u = a.tensor() - one;
    TruncatedTensor h = (1.0 / shape.N) * one;
    for (int n = shape.N - 1; n >= 1; --n) h = (1.0 / n) * one - tensor_mul(u, h);
    TruncatedTensor r = tensor_mul(u, h);
    r.scalar() = 0.0;
    return r;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
        if (v < 0 || static_cast<std::size_t>(v) >= images_.size() || seen[static_cast<std::size_t>(v)]) {
            throw std::invalid_argument("Permutation: not a bijection");
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
}

Permutation Permutation::identity(int k) {
    std::vector<int> v(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = i;
    return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (other.size() != size()) throw std::invalid_argument("Permutation::compose: size mismatch");
    std::vector<int> out(images_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = images_[static_cast<std::size_t>(other.images_[i])];
    return Permutation(std::move(out));
}

TruncatedTensor permute(const TruncatedTensor& a, int k, const Permutation& sigma) {
    if (k < 0 || k > a.depth()) throw std::out_of_range("permute: level out of range");
    if (sigma.size() != k) throw std::invalid_argument("permute: permutation size must equal the level");
    TruncatedTensor out = a;
    const int d = a.dim();
    auto src = a.level(k);
    auto dst = out.level(k);
    // Basis word w maps to the word u with u_j = w_sigma(j).
    std::vector<std::size_t> weight(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) weight[static_cast<std::size_t>(j)] = ipow(static_cast<std::size_t>(d), k - 1 - j);
    std::vector<int> digits(static_cast<std::size_t>(k), 0);
    for (std::size_t idx = 0; idx < src.size(); ++idx) {
        std::size_t rem = idx;
        for (int j = 0; j < k; ++j) {
            digits[static_cast<std::size_t>(j)] = static_cast<int>(rem / weight[static_cast<std::size_t>(j)]);
            rem %= weight[static_cast<std::size_t>(j)];
        }
        std::size_t target = 0;
        for (int j = 0; j < k; ++j) {
            target += static_cast<std::size_t>(digits[static_cast<std::size_t>(sigma(j))]) * weight[static_cast<std::size_t>(j)];
        }
        dst[target] = src[idx];
    }
    return out;
}

TruncatedTensor project_level(const TruncatedTensor& a, int m) {
    if (m < 0 || m > a.depth()) throw std::out_of_range("project_level: level " + std::to_string(m) + " exceeds N");
    std::vector<std::vector<double>> levels(a.levels().begin(), a.levels().begin() + m + 1);
    return TruncatedTensor(TensorShape(a.dim(), m), std::move(levels));
}

TruncatedTensor extend_level(const TruncatedTensor& a, int new_N) {
    if (new_N < a.depth()) throw std::invalid_argument("extend_level: new level below current level");
    TruncatedTensor out(TensorShape(a.dim(), new_N));
    for (int k = 0; k <= a.depth(); ++k) {
        auto src = a.level(k);
        std::copy(src.begin(), src.end(), out.level(k).begin());
    }
    return out;
}

TruncatedTensor apply_linear_map(const TruncatedTensor& a, std::span<const double> matrix, int rows) {
    const int d = a.dim();
    if (rows < 1 || matrix.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(d)) {
        throw std::invalid_argument("apply_linear_map: matrix must be rows x d");
    }
    TruncatedTensor out(TensorShape(rows, a.depth()));
    out.scalar() = a.scalar();
    for (int k = 1; k <= a.depth(); ++k) {
        // Contract one tensor slot at a time; the block is viewed as [left][slot][right].
        std::vector<double> cur(a.level(k).begin(), a.level(k).end());
        for (int slot = 0; slot < k; ++slot) {
            const std::size_t left = ipow(static_cast<std::size_t>(rows), slot);
            const std::size_t right = ipow(static_cast<std::size_t>(d), k - 1 - slot);
            std::vector<double> next(left * static_cast<std::size_t>(rows) * right, 0.0);
            for (std::size_t l = 0; l < left; ++l) {
                for (int r = 0; r < rows; ++r) {
                    double* dst = next.data() + (l * static_cast<std::size_t>(rows) + static_cast<std::size_t>(r)) * right;
                    for (int c = 0; c < d; ++c) {
                        const double m = matrix[static_cast<std::size_t>(r) * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
                        if (m == 0.0) continue;
                        const double* src = cur.data() + (l * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)) * right;
                        for (std::size_t q = 0; q < right; ++q) dst[q] += m * src[q];
                    }
                }
            }
            cur = std::move(next);
        }
        std::copy(cur.begin(), cur.end(), out.level(k).begin());
    }
    return out;
}

double level_sum_norm(const TruncatedTensor& a) {
    double total = 0.0;
    for (const auto& block : a.levels()) {
        double s = 0.0;
        for (double v : block) s += v * v;
        total += std::sqrt(s);
    }
    return total;
}

nlohmann::json to_json(const TruncatedTensor& a) {
    nlohmann::json j;
    j["d"] = a.dim();
    j["N"] = a.depth();
    j["levels"] = a.levels();
    return j;
}

TruncatedTensor tensor_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("N") || !j.contains("levels")) {
        throw std::invalid_argument("tensor JSON: expected object with keys d, N, levels");
    }
    const TensorShape shape(j.at("d").get<int>(), j.at("N").get<int>());
    return TruncatedTensor(shape, j.at("levels").get<std::vector<std::vector<double>>>());
}

}  // namespace rp
