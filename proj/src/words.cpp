#include "roughpath/words.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rp {

Word Word::from_index(std::size_t index, int k, int d) {
    std::vector<int> letters(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
        letters[static_cast<std::size_t>(j)] = static_cast<int>(index % static_cast<std::size_t>(d)) + 1;
        index /= static_cast<std::size_t>(d);
    }
    return Word(std::move(letters));
}

std::size_t Word::flat_index(int d) const {
    std::size_t idx = 0;
    for (int l : letters_) idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(l - 1);
    return idx;
}

bool Word::fits(const TensorShape& shape) const {
    if (size() > shape.N) return false;
    for (int l : letters_) {
        if (l < 1 || l > shape.d) return false;
    }
    return true;
}

Word Word::concat(const Word& other) const {
    std::vector<int> out = letters_;
    out.insert(out.end(), other.letters_.begin(), other.letters_.end());
    return Word(std::move(out));
}

Word Word::prefix(int n) const { return Word(std::vector<int>(letters_.begin(), letters_.begin() + n)); }

Word Word::suffix_from(int n) const { return Word(std::vector<int>(letters_.begin() + n, letters_.end())); }

std::strong_ordering Word::operator<=>(const Word& other) const {
    if (auto c = letters_.size() <=> other.letters_.size(); c != 0) return c;
    return letters_ <=> other.letters_;
}

std::vector<Word> all_words(int d, int N) {
    std::vector<Word> out;
    for (int k = 0; k <= N; ++k) {
        const std::size_t n = ipow(static_cast<std::size_t>(d), k);
        for (std::size_t i = 0; i < n; ++i) out.push_back(Word::from_index(i, k, d));
    }
    return out;
}

LinearFunctional LinearFunctional::word(TensorShape shape, const Word& w, double c) {
    LinearFunctional l(shape);
    l.add(w, c);
    return l;
}

void LinearFunctional::add(const Word& w, double c) {
    if (!w.fits(shape_)) throw std::invalid_argument("LinearFunctional: word does not fit shape");
    terms_[w] += c;
}

double LinearFunctional::coeff(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? 0.0 : it->second;
}

int LinearFunctional::degree() const {
    int deg = -1;
    for (const auto& [w, c] : terms_) {
        if (c != 0.0) deg = std::max(deg, w.size());
    }
    return deg;
}

LinearFunctional& LinearFunctional::operator+=(const LinearFunctional& other) {
    if (!(shape_ == other.shape_)) throw std::invalid_argument("LinearFunctional: shape mismatch");
    for (const auto& [w, c] : other.terms_) terms_[w] += c;
    return *this;
}

LinearFunctional& LinearFunctional::operator*=(double c) {
    for (auto& [w, v] : terms_) v *= c;
    return *this;
}

LinearFunctional operator+(LinearFunctional a, const LinearFunctional& b) { return a += b; }
LinearFunctional operator*(double c, LinearFunctional a) { return a *= c; }

std::map<Word, double> word_shuffle(const Word& u, const Word& v) {
    // memo[i][j] holds prefix(u, i) shuffled with prefix(v, j), built by
    // (u'a) sh (v'b) = ((u'a) sh v') b + (u' sh (v'b)) a.
    const int n = u.size();
    const int m = v.size();
    std::vector<std::vector<std::map<Word, double>>> memo(
        static_cast<std::size_t>(n) + 1, std::vector<std::map<Word, double>>(static_cast<std::size_t>(m) + 1));
    for (int i = 0; i <= n; ++i) memo[static_cast<std::size_t>(i)][0][u.prefix(i)] = 1.0;
    for (int j = 0; j <= m; ++j) memo[0][static_cast<std::size_t>(j)][v.prefix(j)] = 1.0;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= m; ++j) {
            auto& cell = memo[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const Word last_v{v[j - 1]};
            const Word last_u{u[i - 1]};
            for (const auto& [w, c] : memo[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)]) {
                cell[w.concat(last_v)] += c;
            }
            for (const auto& [w, c] : memo[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)]) {
                cell[w.concat(last_u)] += c;
            }
        }
    }
    return memo[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
}

ShuffleProduct shuffle(const LinearFunctional& y, const LinearFunctional& y2) {
    if (!(y.shape() == y2.shape())) throw std::invalid_argument("shuffle: shape mismatch");
    ShuffleProduct out{LinearFunctional(y.shape()), false};
    const int N = y.shape().N;
    for (const auto& [u, cu] : y.terms()) {
        for (const auto& [v, cv] : y2.terms()) {
            if (u.size() + v.size() > N) {
                if (cu != 0.0 && cv != 0.0) out.truncated = true;
                continue;
            }
            for (const auto& [w, c] : word_shuffle(u, v)) out.value.add(w, cu * cv * c);
        }
    }
    return out;
}

double pair(const TruncatedTensor& x, const LinearFunctional& l) {
    if (!(x.shape() == l.shape())) throw std::invalid_argument("pair: shape mismatch");
    double s = 0.0;
    for (const auto& [w, c] : l.terms()) s += c * x.coeff(w);
    return s;
}

double shuffle_closure_check(const GroupElement& x, const LinearFunctional& y, const LinearFunctional& y2) {
    const int deg = std::max(y.degree(), 0) + std::max(y2.degree(), 0);
    if (deg > x.shape().N) {
        throw std::invalid_argument("shuffle_closure_check: deg(y) + deg(y2) = " + std::to_string(deg) +
                                    " exceeds N = " + std::to_string(x.shape().N));
    }
    const double lhs = pair(x.tensor(), y) * pair(x.tensor(), y2);
    const double rhs = pair(x.tensor(), shuffle(y, y2).value);
    return std::abs(lhs - rhs);
}

nlohmann::json to_json(const LinearFunctional& l) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [w, c] : l.terms()) terms.push_back({{"word", w.letters()}, {"coeff", c}});
    return {{"d", l.shape().d}, {"N", l.shape().N}, {"terms", terms}};
}

LinearFunctional functional_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("N") || !j.contains("terms")) {
        throw std::invalid_argument("functional JSON: expected object with keys d, N, terms");
    }
    LinearFunctional l(TensorShape(j.at("d").get<int>(), j.at("N").get<int>()));
    for (const auto& t : j.at("terms")) l.add(Word(t.at("word").get<std::vector<int>>()), t.at("coeff").get<double>());
    return l;
}

}  // namespace rp
