#ifndef ROUGHPATH_GROUPLIKE_HPP
#define ROUGHPATH_GROUPLIKE_HPP

#include <span>
#include <vector>

#include "roughpath/tensor.hpp"
#include "roughpath/words.hpp"

namespace rp {

/// Largest |<x,u><x,v> - <x, u sh v>| over basis words with |u| + |v| <= N.
double weakly_grouplike_test(const GroupElement& x);

/// (m,l)-shuffles: permutations increasing on {0..m-1} and on {m..m+l-1}.
std::vector<Permutation> shuffle_permutations(int m, int l);

/// Largest Euclidean norm of x^(m) (x) x^(l) - sum_{sigma in Sh(m,l)} P_sigma(x^(m+l)) over m, l >= 1, m + l <= N.
double geng_primal_test(const GroupElement& x);

/// Right-nested bracketing e_{w1...wm} -> [e_w1, [e_w2, ... e_wm]] on a level-m block.
std::vector<double> dynkin_map(std::span<const double> block, int d, int m);

/// Entry m >= 1 is ||D(x^(m)) - m x^(m)||; entry 0 is |x^(0)|, since Lie series have no scalar part.
std::vector<double> lie_membership(const TruncatedTensor& x);

/// Largest entry of lie_membership(tensor_log(x)).
double grouplike_roundtrip(const GroupElement& x);

}  // namespace rp

#endif  // ROUGHPATH_GROUPLIKE_HPP
