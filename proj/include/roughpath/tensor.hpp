#ifndef ROUGHPATH_TENSOR_HPP
#define ROUGHPATH_TENSOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

namespace rp {

class Word;

/// Letter-space dimension d and truncation level N of T^(N)(R^d).
struct TensorShape {
    int d = 1;
    int N = 0;

    TensorShape() = default;
    TensorShape(int dim, int level);

    /// Number of coefficients at level k, i.e. d^k.
    std::size_t level_size(int k) const;
    /// Total number of coefficients over levels 0..N.
    std::size_t total_size() const;

    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

/// Integer power d^k for index arithmetic.
std::size_t ipow(std::size_t base, int exp);

/// Element of the truncated tensor algebra, stored densely per level.
///
/// Level k holds d^k coefficients in lexicographic word order: the word
/// (i_1, ..., i_k) with letters in 1..d sits at flat index
/// sum_j (i_j - 1) d^(k-j).
class TruncatedTensor {
public:
    TruncatedTensor() = default;
    explicit TruncatedTensor(TensorShape shape);
    TruncatedTensor(TensorShape shape, std::vector<std::vector<double>> levels);

    static TruncatedTensor zero(TensorShape shape);
    static TruncatedTensor unit(TensorShape shape);
    /// (0, v, 0, ..., 0) for a vector v of length d.
    static TruncatedTensor from_vector(TensorShape shape, std::span<const double> v);

    const TensorShape& shape() const { return shape_; }
    int dim() const { return shape_.d; }
    int depth() const { return shape_.N; }

    std::span<const double> level(int k) const;
    std::span<double> level(int k);

    double scalar() const { return levels_[0][0]; }
    double& scalar() { return levels_[0][0]; }

    /// Coefficient at a word; the empty word addresses level 0.
    double coeff(const Word& w) const;
    double& coeff(const Word& w);

    const std::vector<std::vector<double>>& levels() const { return levels_; }

    TruncatedTensor& operator+=(const TruncatedTensor& other);
    TruncatedTensor& operator-=(const TruncatedTensor& other);
    TruncatedTensor& operator*=(double c);

    /// Largest absolute coefficient over all levels.
    double max_abs() const;

    friend bool operator==(const TruncatedTensor&, const TruncatedTensor&) = default;

private:
    TensorShape shape_;
    std::vector<std::vector<double>> levels_;
};

TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b);
TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b);
TruncatedTensor operator*(double c, TruncatedTensor a);

/// Entrywise sum; throws std::invalid_argument on shape mismatch.
TruncatedTensor tensor_add(const TruncatedTensor& a, const TruncatedTensor& b);

/// Truncated Cauchy product: level k of the result is sum_{i+j=k} a^(i) (x) b^(j).
TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b);

/// A tensor with scalar part exactly 1, i.e. an element of T_1^(N).
class GroupElement {
public:
    explicit GroupElement(TruncatedTensor t);
    static GroupElement identity(TensorShape shape);

    const TruncatedTensor& tensor() const { return t_; }
    const TensorShape& shape() const { return t_.shape(); }

    friend bool operator==(const GroupElement&, const GroupElement&) = default;

private:
    TruncatedTensor t_;
};

GroupElement operator*(const GroupElement& a, const GroupElement& b);

/// Inverse via the finite geometric series sum_i (1 - a)^i.
GroupElement tensor_inverse(const GroupElement& a);

/// exp of an element with zero scalar part, evaluated by Horner's scheme.
GroupElement tensor_exp(const TruncatedTensor& a);

/// log(a) = sum_{n>=1} (-1)^(n+1) (a - 1)^n / n, evaluated by Horner's scheme.
TruncatedTensor tensor_log(const GroupElement& a);

/// A permutation of {1..k}, stored 0-based: sigma[i] is the image of i.
class Permutation {
public:
    explicit Permutation(std::vector<int> images);
    static Permutation identity(int k);

    int size() const { return static_cast<int>(images_.size()); }
    int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& images() const { return images_; }

    Permutation inverse() const;
    /// (this o other)(i) = this(other(i)).
    Permutation compose(const Permutation& other) const;

private:
    std::vector<int> images_;
};

/// P_sigma on level k: P_sigma(v_1 (x) ... (x) v_k) = v_sigma(1) (x) ... (x) v_sigma(k).
/// Other levels are returned unchanged.
TruncatedTensor permute(const TruncatedTensor& a, int k, const Permutation& sigma);

/// Natural projection T^(N) -> T^(m).
TruncatedTensor project_level(const TruncatedTensor& a, int m);

/// Zero-pad a tensor up to a higher truncation level.
TruncatedTensor extend_level(const TruncatedTensor& a, int new_N);

/// Applies the algebra homomorphism induced by a linear map L: R^d -> R^p,
/// given row-major as p x d; level k is transformed by L^{(x)k}.
TruncatedTensor apply_linear_map(const TruncatedTensor& a, std::span<const double> matrix, int rows);

/// Sum over levels of the Euclidean norm of each level block.
double level_sum_norm(const TruncatedTensor& a);

nlohmann::json to_json(const TruncatedTensor& a);
TruncatedTensor tensor_from_json(const nlohmann::json& j);

}  // namespace rp

#endif  // ROUGHPATH_TENSOR_HPP
