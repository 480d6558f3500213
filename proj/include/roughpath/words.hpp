#ifndef ROUGHPATH_WORDS_HPP
#define ROUGHPATH_WORDS_HPP

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <vector>

#include <json.hpp>

#include "roughpath/tensor.hpp"

namespace rp {

/// A multi-index over letters 1..d. The empty word labels the scalar level.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<int> letters) : letters_(letters) {}
    explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

    /// Inverse of flat_index: the k-letter word at a lexicographic position.
    static Word from_index(std::size_t index, int k, int d);

    int size() const { return static_cast<int>(letters_.size()); }
    bool empty() const { return letters_.empty(); }
    int operator[](int i) const { return letters_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& letters() const { return letters_; }

    /// Lexicographic position within the level-size() block for alphabet size d.
    std::size_t flat_index(int d) const;
    bool fits(const TensorShape& shape) const;

    Word concat(const Word& other) const;
    Word prefix(int n) const;
    Word suffix_from(int n) const;

    /// Length-first, then lexicographic: matches the flat coordinate order of tensors.
    std::strong_ordering operator<=>(const Word& other) const;
    bool operator==(const Word& other) const = default;

private:
    std::vector<int> letters_;
};

/// All words of length 0..N over d letters, in coordinate order.
std::vector<Word> all_words(int d, int N);

/// Sparse word -> coefficient map acting on truncated tensors by coordinate pairing.
class LinearFunctional {
public:
    LinearFunctional() = default;
    explicit LinearFunctional(TensorShape shape) : shape_(shape) {}
    static LinearFunctional word(TensorShape shape, const Word& w, double c = 1.0);
    static LinearFunctional one(TensorShape shape) { return word(shape, Word{}); }

    const TensorShape& shape() const { return shape_; }
    const std::map<Word, double>& terms() const { return terms_; }

    /// Adds c to the coefficient of w; throws if w does not fit the shape.
    void add(const Word& w, double c);
    double coeff(const Word& w) const;
    /// Highest word length with a nonzero coefficient, -1 for the zero functional.
    int degree() const;

    LinearFunctional& operator+=(const LinearFunctional& other);
    LinearFunctional& operator*=(double c);

private:
    TensorShape shape_;
    std::map<Word, double> terms_;
};

LinearFunctional operator+(LinearFunctional a, const LinearFunctional& b);
LinearFunctional operator*(double c, LinearFunctional a);

/// Shuffle of two single words, with multiplicities, untruncated.
std::map<Word, double> word_shuffle(const Word& u, const Word& v);

struct ShuffleProduct {
    LinearFunctional value;
    /// True when terms longer than N were dropped.
    bool truncated = false;
};

/// Bilinear shuffle product, truncated at the shared level N.
ShuffleProduct shuffle(const LinearFunctional& y, const LinearFunctional& y2);

/// <x, l> = sum over terms of coeff * (coordinate of x at the word).
double pair(const TruncatedTensor& x, const LinearFunctional& l);

/// |<x,y><x,y2> - <x, y shuffle y2>|. Requires deg(y) + deg(y2) <= N.
double shuffle_closure_check(const GroupElement& x, const LinearFunctional& y, const LinearFunctional& y2);

nlohmann::json to_json(const LinearFunctional& l);
LinearFunctional functional_from_json(const nlohmann::json& j);

}  // namespace rp

#endif  // ROUGHPATH_WORDS_HPP
