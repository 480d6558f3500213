#include <doctest.h>

#include <cmath>

#include "roughpath/grouplike.hpp"
#include "roughpath/rough_path.hpp"
#include "test_support.hpp"

using namespace rp;
using rp::testing::random_group;

namespace {

TruncatedTensor letter(TensorShape shape, int a) {
    TruncatedTensor t(shape);
    t.coeff(Word{a}) = 1.0;
    return t;
}

TruncatedTensor bracket(const TruncatedTensor& a, const TruncatedTensor& b) {
    return tensor_mul(a, b) - tensor_mul(b, a);
}

// Random Lie polynomial: random combinations of letters and nested brackets of random letters.
TruncatedTensor random_lie(Rng& rng, TensorShape shape, double scale) {
    TruncatedTensor out(shape);
    for (int k = 1; k <= shape.N; ++k) {
        for (int term = 0; term < 3; ++term) {
            TruncatedTensor b = letter(shape, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(shape.d))));
            for (int j = 1; j < k; ++j) {
                b = bracket(letter(shape, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(shape.d)))), b);
            }
            out += rng.uniform(-scale, scale) * b;
        }
    }
    return out;
}

// Dynkin map oracle: expand the right-nested bracket of each word with tensor products.
std::vector<double> dynkin_oracle(std::span<const double> block, int d, int m) {
    const TensorShape shape(d, m);
    TruncatedTensor acc(shape);
    for (std::size_t idx = 0; idx < block.size(); ++idx) {
        if (block[idx] == 0.0) continue;
        const Word w = Word::from_index(idx, m, d);
        TruncatedTensor b = letter(shape, w[m - 1]);
        for (int j = m - 2; j >= 0; --j) b = bracket(letter(shape, w[j]), b);
        acc += block[idx] * b;
    }
    auto lvl = acc.level(m);
    return {lvl.begin(), lvl.end()};
}

}  // namespace

TEST_CASE("weakly_grouplike_test examples") {
    const TensorShape shape(3, 4);
    CHECK(weakly_grouplike_test(GroupElement::identity(shape)) == 0.0);
    for (int a = 1; a <= 3; ++a) CHECK(weakly_grouplike_test(tensor_exp(letter(shape, a))) <= 1e-12);

    // The pair (e1, e1) sees <x, e1 sh e1> = 2 eps against <x,e1>^2 = 0.
    const double eps = 0.125;
    TruncatedTensor p = TruncatedTensor::unit(shape);
    p.coeff(Word{1, 1}) = eps;
    CHECK(weakly_grouplike_test(GroupElement(p)) == doctest::Approx(2 * eps).epsilon(1e-15));
}

TEST_CASE("shuffle permutations") {
    for (auto [m, l, count] : {std::tuple{1, 1, 2}, std::tuple{2, 1, 3}, std::tuple{2, 2, 6}, std::tuple{3, 2, 10}}) {
        const auto perms = shuffle_permutations(m, l);
        CHECK(static_cast<int>(perms.size()) == count);
        for (const auto& s : perms) {
            for (int i = 0; i + 1 < m; ++i) CHECK(s(i) < s(i + 1));
            for (int i = m; i + 1 < m + l; ++i) CHECK(s(i) < s(i + 1));
        }
    }
}

TEST_CASE("geng_primal_test examples") {
    Rng rng(41);
    const TensorShape shape(3, 4);
    CHECK(geng_primal_test(GroupElement::identity(shape)) == 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = tensor_exp(random_lie(rng, shape, 0.8));
        CHECK(geng_primal_test(g) <= 1e-12);
        CHECK(weakly_grouplike_test(g) <= 1e-12);
        CHECK(grouplike_roundtrip(g) <= 1e-12);
    }
}

TEST_CASE("lie_membership examples") {
    const TensorShape shape(2, 3);
    auto single = lie_membership(letter(shape, 2));
    for (double r : single) CHECK(r == 0.0);

    const auto commutator = bracket(letter(shape, 1), letter(shape, 2));
    CHECK(commutator.coeff(Word{1, 2}) == 1.0);
    CHECK(commutator.coeff(Word{2, 1}) == -1.0);
    CHECK(lie_membership(commutator)[2] == 0.0);

    TruncatedTensor sym(shape);
    sym.coeff(Word{1, 2}) = 1.0;
    sym.coeff(Word{2, 1}) = 1.0;
    CHECK(lie_membership(sym)[2] == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(lie_membership(TruncatedTensor::unit(shape))[0] == 1.0);
}

TEST_CASE("dynkin_map matches the bracket expansion") {
    Rng rng(42);
    for (int m = 1; m <= 4; ++m) {
        std::vector<double> block(ipow(std::size_t{3}, m));
        for (double& v : block) v = rng.uniform(-1, 1);
        const auto fast = dynkin_map(block, 3, m);
        const auto oracle = dynkin_oracle(block, 3, m);
        for (std::size_t i = 0; i < block.size(); ++i) CHECK(fast[i] == doctest::Approx(oracle[i]).epsilon(1e-13));
    }
}

TEST_CASE("three-way agreement on group-like and generic inputs") {
    Rng rng(43);
    for (int d = 1; d <= 3; ++d) {
        for (int N = 2; N <= 4; ++N) {
            const TensorShape shape(d, N);
            for (int trial = 0; trial < 4; ++trial) {
                const auto g = tensor_exp(random_lie(rng, shape, 1.0));
                CHECK(weakly_grouplike_test(g) <= 1e-10);
                CHECK(geng_primal_test(g) <= 1e-10);
                CHECK(grouplike_roundtrip(g) <= 1e-8);

                const auto generic = random_group(rng, shape);
                const bool w = weakly_grouplike_test(generic) <= 1e-10;
                const bool p = geng_primal_test(generic) <= 1e-10;
                const bool r = grouplike_roundtrip(generic) <= 1e-8;
                CHECK(w == p);
                CHECK(p == r);
                CHECK_FALSE(w);
            }
        }
    }
}

TEST_CASE("products of group-like elements and path signatures are group-like") {
    Rng rng(44);
    const TensorShape shape(2, 5);
    const auto a = tensor_exp(random_lie(rng, shape, 0.7));
    const auto b = tensor_exp(random_lie(rng, shape, 0.7));
    const auto ab = a * b;
    CHECK(weakly_grouplike_test(ab) <= 1e-10);
    CHECK(geng_primal_test(ab) <= 1e-10);
    CHECK(grouplike_roundtrip(ab) <= 1e-8);

    const auto path = rp::testing::random_pl_path(rng, 3, 5);
    const auto sig = signature_pl(path, 4, 0.0, 1.0);
    CHECK(weakly_grouplike_test(sig) <= 1e-10);
    CHECK(geng_primal_test(sig) <= 1e-10);
    CHECK(grouplike_roundtrip(sig) <= 1e-8);
}
