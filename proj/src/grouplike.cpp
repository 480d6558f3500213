#include "roughpath/grouplike.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace rp {

namespace {

// For each unordered pair of words (u, v) with |u| + |v| <= N, the expansion of u sh v
// as (offset into the flattened tensor, count).
struct ShuffleEntry {
    std::size_t u, v;
    std::vector<std::pair<std::size_t, double>> terms;
};

std::size_t flat_offset(const Word& w, int d) {
    std::size_t off = 0;
    for (int k = 0; k < w.size(); ++k) off += ipow(static_cast<std::size_t>(d), k);
    return off + w.flat_index(d);
}

const std::vector<ShuffleEntry>& shuffle_table(int d, int N) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<std::vector<ShuffleEntry>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{d, N}];
    if (!slot) {
        slot = std::make_unique<std::vector<ShuffleEntry>>();
        const auto words = all_words(d, N);
        for (std::size_t i = 0; i < words.size(); ++i) {
            for (std::size_t j = i; j < words.size(); ++j) {
                if (words[i].size() + words[j].size() > N) continue;
                ShuffleEntry e{i, j, {}};
                for (const auto& [w, c] : word_shuffle(words[i], words[j])) e.terms.emplace_back(flat_offset(w, d), c);
                slot->push_back(std::move(e));
            }
        }
    }
    return *slot;
}

std::vector<double> flatten(const TruncatedTensor& x) {
    std::vector<double> flat;
    flat.reserve(x.shape().total_size());
    for (int k = 0; k <= x.shape().N; ++k) {
        auto lvl = x.level(k);
        flat.insert(flat.end(), lvl.begin(), lvl.end());
    }
    return flat;
}

double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double weakly_grouplike_test(const GroupElement& x) {
    const auto& table = shuffle_table(x.shape().d, x.shape().N);
    const auto flat = flatten(x.tensor());
    double worst = 0.0;
    for (const auto& e : table) {
        double rhs = 0.0;
        for (const auto& [off, c] : e.terms) rhs += c * flat[off];
        worst = std::max(worst, std::abs(flat[e.u] * flat[e.v] - rhs));
    }
    return worst;
}

std::vector<Permutation> shuffle_permutations(int m, int l) {
    // Choose which output slots receive the first block; both blocks keep their order.
    std::vector<Permutation> out;
    const int n = m + l;
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + m, true);
    do {
        std::vector<int> images(static_cast<std::size_t>(n));
        int a = 0;
        int b = m;
        for (int slot = 0; slot < n; ++slot) {
            images[static_cast<std::size_t>(pick[static_cast<std::size_t>(slot)] ? a++ : b++)] = slot;
        }
        out.emplace_back(std::move(images));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
}

double geng_primal_test(const GroupElement& x) {
    const int N = x.shape().N;
    double worst = 0.0;
    for (int m = 1; m < N; ++m) {
        for (int l = 1; m + l <= N; ++l) {
            auto a = x.tensor().level(m);
            auto b = x.tensor().level(l);
            std::vector<double> diff(a.size() * b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                for (std::size_t j = 0; j < b.size(); ++j) diff[i * b.size() + j] = a[i] * b[j];
            }
            for (const auto& sigma : shuffle_permutations(m, l)) {
                const auto p = permute(x.tensor(), m + l, sigma);
                auto lvl = p.level(m + l);
                for (std::size_t q = 0; q < diff.size(); ++q) diff[q] -= lvl[q];
            }
            worst = std::max(worst, euclid(diff));
        }
    }
    return worst;
}

std::vector<double> dynkin_map(std::span<const double> block, int d, int m) {
    if (m < 1) throw std::invalid_argument("dynkin_map: level must be >= 1");
    const std::size_t D = static_cast<std::size_t>(d);
    if (block.size() != ipow(D, m)) throw std::invalid_argument("dynkin_map: block size is not d^m");
    if (m == 1) return std::vector<double>(block.begin(), block.end());
    // block = sum_a e_a (x) B_a, and D(e_a (x) B_a) = e_a (x) D(B_a) - D(B_a) (x) e_a.
    const std::size_t tail = ipow(D, m - 1);
    std::vector<double> out(block.size(), 0.0);
    for (std::size_t a = 0; a < D; ++a) {
        const auto inner = dynkin_map(block.subspan(a * tail, tail), d, m - 1);
        for (std::size_t r = 0; r < tail; ++r) {
            out[a * tail + r] += inner[r];
            out[r * D + a] -= inner[r];
        }
    }
    return out;
}

std::vector<double> lie_membership(const TruncatedTensor& x) {
    std::vector<double> res(static_cast<std::size_t>(x.shape().N) + 1);
    res[0] = std::abs(x.scalar());
    for (int m = 1; m <= x.shape().N; ++m) {
        auto lvl = x.level(m);
        auto dm = dynkin_map(lvl, x.shape().d, m);
        for (std::size_t q = 0; q < dm.size(); ++q) dm[q] -= m * lvl[q];
        res[static_cast<std::size_t>(m)] = euclid(dm);
    }
    return res;
}

double grouplike_roundtrip(const GroupElement& x) {
    const auto res = lie_membership(tensor_log(x));
    return *std::max_element(res.begin(), res.end());
}

}  // namespace rp
