#ifndef ROUGHPATH_TRANSPORT_HPP
#define ROUGHPATH_TRANSPORT_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace rp {

struct TransportFlow {
    std::size_t from;  // supply index
    std::size_t to;    // demand index
    double amount;
};

struct TransportResult {
    double cost = 0.0;
    std::vector<TransportFlow> flows;
    /// Dual potentials with u_i - v_j <= cost(i, j), tight on every flow.
    std::vector<double> supply_potential;
    std::vector<double> demand_potential;
};

/// Balanced min-cost transportation by successive shortest paths.
/// Supplies and demands must be non-negative with equal totals (up to rounding); costs non-negative.
TransportResult solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                const std::function<double(std::size_t, std::size_t)>& cost);

}  // namespace rp

#endif  // ROUGHPATH_TRANSPORT_HPP
