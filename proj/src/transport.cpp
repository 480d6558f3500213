#include "roughpath/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rp {

namespace {

constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
constexpr double inf = std::numeric_limits<double>::infinity();

// Shortest distances in the residual graph from the supplies marked as sources.
// Forward arcs i -> j always exist with cost c_ij; reverse arcs j -> i exist while flow_ij > eps.
struct Residual {
    std::size_t P, Q;
    const std::vector<double>& C;
    const std::vector<double>& flow;
    double eps;

    void shortest(const std::vector<bool>& source, std::vector<double>& ds, std::vector<double>& dd,
                  std::vector<std::size_t>& pred_s, std::vector<std::size_t>& pred_d) const {
        ds.assign(P, inf);
        dd.assign(Q, inf);
        pred_s.assign(P, none);
        pred_d.assign(Q, none);
        for (std::size_t i = 0; i < P; ++i) {
            if (source[i]) ds[i] = 0.0;
        }
        // Bellman-Ford rounds; the residual graph of an optimal partial flow has no negative cycle.
        for (std::size_t round = 0; round < P + Q; ++round) {
            bool changed = false;
            for (std::size_t i = 0; i < P; ++i) {
                if (ds[i] == inf) continue;
                for (std::size_t j = 0; j < Q; ++j) {
                    const double nd = ds[i] + C[i * Q + j];
                    if (nd < dd[j] - 1e-15 * std::max(1.0, std::abs(nd))) {
                        dd[j] = nd;
                        pred_d[j] = i;
                        changed = true;
                    }
                }
            }
            for (std::size_t j = 0; j < Q; ++j) {
                if (dd[j] == inf) continue;
                for (std::size_t i = 0; i < P; ++i) {
                    if (flow[i * Q + j] <= eps) continue;
                    const double nd = dd[j] - C[i * Q + j];
                    if (nd < ds[i] - 1e-15 * std::max(1.0, std::abs(nd))) {
                        ds[i] = nd;
                        pred_s[i] = j;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
    }
};

}  // namespace

TransportResult solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                const std::function<double(std::size_t, std::size_t)>& cost) {
    const std::size_t P = supply.size();
    const std::size_t Q = demand.size();
    for (double s : supply) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("solve_transport: supplies must be finite and >= 0");
    }
    for (double d : demand) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("solve_transport: demands must be finite and >= 0");
    }
    const double total_s = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double total_d = std::accumulate(demand.begin(), demand.end(), 0.0);
    const double scale = std::max({total_s, total_d, std::numeric_limits<double>::min()});
    if (std::abs(total_s - total_d) > 1e-9 * scale) throw std::invalid_argument("solve_transport: unbalanced problem");

    std::vector<double> C(P * Q);
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < Q; ++j) {
            C[i * Q + j] = cost(i, j);
            if (!(C[i * Q + j] >= 0.0)) throw std::invalid_argument("solve_transport: costs must be >= 0");
        }
    }

    const double eps = 1e-15 * scale;
    std::vector<double> rem_s = supply;
    std::vector<double> rem_d = demand;
    std::vector<double> flow(P * Q, 0.0);
    Residual g{P, Q, C, flow, eps};
    std::vector<double> ds, dd;
    std::vector<std::size_t> pred_s, pred_d;

    for (;;) {
        std::vector<bool> source(P);
        bool any = false;
        for (std::size_t i = 0; i < P; ++i) any |= (source[i] = rem_s[i] > eps);
        if (!any) break;
        g.shortest(source, ds, dd, pred_s, pred_d);
        std::size_t target = none;
        for (std::size_t j = 0; j < Q; ++j) {
            if (rem_d[j] > eps && dd[j] < inf && (target == none || dd[j] < dd[target])) target = j;
        }
        if (target == none) break;

        // Walk back to a source supply, collecting the bottleneck.
        double delta = rem_d[target];
        std::size_t j = target;
        std::size_t i = pred_d[j];
        for (;;) {
            if (pred_s[i] == none) {
                delta = std::min(delta, rem_s[i]);
                break;
            }
            const std::size_t jp = pred_s[i];
            delta = std::min(delta, flow[i * Q + jp]);
            j = jp;
            i = pred_d[j];
        }
        j = target;
        i = pred_d[j];
        rem_d[target] -= delta;
        for (;;) {
            flow[i * Q + j] += delta;
            if (pred_s[i] == none) {
                rem_s[i] -= delta;
                break;
            }
            const std::size_t jp = pred_s[i];
            flow[i * Q + jp] -= delta;
            j = jp;
            i = pred_d[j];
        }
    }

    TransportResult out;
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j < Q; ++j) {
            if (flow[i * Q + j] > eps) {
                out.flows.push_back({i, j, flow[i * Q + j]});
                out.cost += flow[i * Q + j] * C[i * Q + j];
            }
        }
    }
    g.shortest(std::vector<bool>(P, true), ds, dd, pred_s, pred_d);
    out.supply_potential.resize(P);
    out.demand_potential.resize(Q);
    for (std::size_t i = 0; i < P; ++i) out.supply_potential[i] = -ds[i];
    for (std::size_t j = 0; j < Q; ++j) out.demand_potential[j] = dd[j] == inf ? 0.0 : -dd[j];
    return out;
}

}  // namespace rp
