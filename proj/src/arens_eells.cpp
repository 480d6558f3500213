#include "roughpath/arens_eells.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "roughpath/transport.hpp"

namespace rp {

namespace {

double euclid(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

Molecule::Molecule(std::vector<MoleculeAtom> atoms, double tol) {
    std::map<double, std::vector<double>> merged;
    for (auto& a : atoms) {
        if (!std::isfinite(a.t)) throw std::invalid_argument("Molecule: non-finite time");
        if (dim_ == 0) dim_ = static_cast<int>(a.v.size());
        if (static_cast<int>(a.v.size()) != dim_ || dim_ == 0) throw std::invalid_argument("Molecule: inconsistent value dimension");
        for (double x : a.v) {
            if (!std::isfinite(x)) throw std::invalid_argument("Molecule: non-finite value");
        }
        auto& slot = merged[a.t];
        if (slot.empty()) {
            slot = std::move(a.v);
        } else {
            for (std::size_t k = 0; k < slot.size(); ++k) slot[k] += a.v[k];
        }
    }
    for (auto& [t, v] : merged) atoms_.push_back({t, std::move(v)});
    for (int k = 0; k < dim_; ++k) {
        double s = 0.0;
        for (const auto& a : atoms_) s += a.v[static_cast<std::size_t>(k)];
        if (std::abs(s) > tol) {
            throw std::invalid_argument("Molecule: values must sum to zero (coordinate " + std::to_string(k) +
                                        " sums to " + std::to_string(s) + ")");
        }
    }
}

std::vector<double> Molecule::support() const {
    std::vector<double> out;
    for (const auto& a : atoms_) out.push_back(a.t);
    return out;
}

Molecule Molecule::operator+(const Molecule& other) const {
    if (dim_ != 0 && other.dim_ != 0 && dim_ != other.dim_) throw std::invalid_argument("Molecule: dimension mismatch");
    std::vector<MoleculeAtom> all = atoms_;
    all.insert(all.end(), other.atoms_.begin(), other.atoms_.end());
    return Molecule(std::move(all), std::numeric_limits<double>::infinity());
}

Molecule Molecule::operator*(double c) const {
    std::vector<MoleculeAtom> all = atoms_;
    for (auto& a : all) {
        for (double& x : a.v) x *= c;
    }
    return Molecule(std::move(all), std::numeric_limits<double>::infinity());
}

ElementaryMolecule::ElementaryMolecule(double t_, double s_, std::vector<double> y_) : t(t_), s(s_), y(std::move(y_)) {
    if (std::abs(euclid(y) - 1.0) > 1e-12) throw std::invalid_argument("ElementaryMolecule: y must be a unit vector");
}

Molecule ElementaryMolecule::molecule() const {
    std::vector<double> neg = y;
    for (double& x : neg) x = -x;
    return Molecule({{t, y}, {s, neg}});
}

nlohmann::json to_json(const Molecule& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& a : m.atoms()) out.push_back({{"t", a.t}, {"v", a.v}});
    return out;
}

Molecule molecule_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("molecule JSON: expected an array of {t, v}");
    std::vector<MoleculeAtom> atoms;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_object() || !e.contains("t") || !e.contains("v") || !e["t"].is_number() || !e["v"].is_array()) {
            throw std::invalid_argument("molecule JSON entry " + std::to_string(i) + ": expected {t: number, v: [numbers]}");
        }
        atoms.push_back({e["t"].get<double>(), e["v"].get<std::vector<double>>()});
    }
    return Molecule(std::move(atoms));
}

double AeWitness::operator()(double u) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) best = std::max(best, potentials[i] - std::pow(std::abs(u - times[i]), alpha));
    return times.empty() ? 0.0 : best;
}

namespace {

struct DirectionSolve {
    double cost = 0.0;
    double lower = 0.0;
    std::vector<AeTerm> terms;
    AeWitness witness;
};

// Scalar Arens-Eells problem for the projection of m onto the unit direction b.
DirectionSolve solve_direction(const Molecule& m, const std::vector<double>& b, double alpha, double noise) {
    std::vector<double> c;
    for (const auto& a : m.atoms()) {
        double s = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) s += a.v[k] * b[k];
        c.push_back(s);
    }
    std::vector<double> sup_t, sup_m, dem_t, dem_m;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] > noise) {
            sup_t.push_back(m.atoms()[i].t);
            sup_m.push_back(c[i]);
        } else if (c[i] < -noise) {
            dem_t.push_back(m.atoms()[i].t);
            dem_m.push_back(-c[i]);
        }
    }
    DirectionSolve out;
    out.witness.alpha = alpha;
    out.witness.direction = b;
    if (sup_t.empty() || dem_t.empty()) return out;

    const auto tr = solve_transport(sup_m, dem_m, [&](std::size_t i, std::size_t j) {
        return std::pow(std::abs(sup_t[i] - dem_t[j]), alpha);
    });
    out.cost = tr.cost;
    for (const auto& f : tr.flows) out.terms.push_back({f.amount, sup_t[f.from], dem_t[f.to], b});
    out.witness.times = sup_t;
    out.witness.potentials = tr.supply_potential;
    for (std::size_t i = 0; i < c.size(); ++i) out.lower += c[i] * out.witness(m.atoms()[i].t);
    return out;
}

}  // namespace

AeNormResult ae_norm(const Molecule& m, double alpha, const std::optional<std::vector<double>>& candidate_times) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ae_norm: alpha must lie in (0,1]");
    if (candidate_times) {
        for (double t : m.support()) {
            const bool found = std::any_of(candidate_times->begin(), candidate_times->end(),
                                           [t](double c) { return same_time(c, t); });
            if (!found) throw std::invalid_argument("ae_norm: candidate times must contain the support");
        }
    }
    AeNormResult out;
    out.basis = "coordinate";
    out.witness.alpha = alpha;
    const int p = m.dim();
    double scale = 0.0;
    for (const auto& a : m.atoms()) scale = std::max(scale, euclid(a.v));
    if (p == 0 || scale == 0.0) return out;
    const double noise = 1e-14 * scale;

    std::vector<std::pair<std::string, std::vector<std::vector<double>>>> bases;
    std::vector<std::vector<double>> coord(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p), 0.0));
    for (int k = 0; k < p; ++k) coord[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1.0;
    bases.emplace_back("coordinate", std::move(coord));
    if (p > 1) {
        Eigen::MatrixXd V(p, static_cast<Eigen::Index>(m.atoms().size()));
        for (std::size_t i = 0; i < m.atoms().size(); ++i) {
            for (int k = 0; k < p; ++k) V(k, static_cast<Eigen::Index>(i)) = m.atoms()[i].v[static_cast<std::size_t>(k)];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeFullU);
        std::vector<std::vector<double>> dirs;
        for (int r = 0; r < p; ++r) {
            std::vector<double> b(static_cast<std::size_t>(p));
            for (int k = 0; k < p; ++k) b[static_cast<std::size_t>(k)] = svd.matrixU()(k, r);
            dirs.push_back(std::move(b));
        }
        bases.emplace_back("svd", std::move(dirs));
    }

    bool first = true;
    out.lower = -std::numeric_limits<double>::infinity();
    for (const auto& [name, dirs] : bases) {
        double total = 0.0;
        std::vector<AeTerm> terms;
        for (const auto& b : dirs) {
            DirectionSolve s = solve_direction(m, b, alpha, noise);
            total += s.cost;
            terms.insert(terms.end(), s.terms.begin(), s.terms.end());
            if (s.lower > out.lower) {
                out.lower = s.lower;
                out.witness = std::move(s.witness);
            }
        }
        if (first || total < out.upper) {
            out.upper = total;
            out.certificate = std::move(terms);
            out.basis = name;
            first = false;
        }
    }
    out.lower = std::max(out.lower, 0.0);
    return out;
}

SampledFunction::SampledFunction(std::vector<double> times, std::vector<std::vector<double>> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty() || times_.size() != values_.size()) throw std::invalid_argument("SampledFunction: need matching non-empty samples");
    dim_ = static_cast<int>(values_.front().size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (static_cast<int>(values_[i].size()) != dim_) throw std::invalid_argument("SampledFunction: inconsistent dimension");
        if (i > 0 && !(times_[i] > times_[i - 1])) throw std::invalid_argument("SampledFunction: times must be strictly increasing");
    }
}

const std::vector<double>& SampledFunction::at(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && same_time(*it, t)) return values_[static_cast<std::size_t>(it - times_.begin())];
    if (it != times_.begin() && same_time(*(it - 1), t)) return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
    throw std::out_of_range("SampledFunction: no sample at t = " + std::to_string(t));
}

double hoelder_coeff(const SampledFunction& x, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("hoelder_coeff: alpha must lie in (0,1]");
    double best = 0.0;
    const auto& t = x.times();
    const auto& v = x.values();
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < v[i].size(); ++k) s += (v[j][k] - v[i][k]) * (v[j][k] - v[i][k]);
            best = std::max(best, std::sqrt(s) / std::pow(t[j] - t[i], alpha));
        }
    }
    return best;
}

double pairing(const SampledFunction& x, const Molecule& m) {
    if (!m.empty() && m.dim() != x.dim()) throw std::invalid_argument("pairing: dimension mismatch");
    double s = 0.0;
    for (const auto& a : m.atoms()) {
        const auto& xv = x.at(a.t);
        for (std::size_t k = 0; k < a.v.size(); ++k) s += xv[k] * a.v[k];
    }
    return s;
}

std::vector<Molecule> elementary_probes(const std::vector<double>& times, int p) {
    std::vector<Molecule> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = i + 1; j < times.size(); ++j) {
            for (int k = 0; k < p; ++k) {
                std::vector<double> y(static_cast<std::size_t>(p), 0.0);
                y[static_cast<std::size_t>(k)] = 1.0;
                out.push_back(ElementaryMolecule(times[j], times[i], std::move(y)).molecule());
            }
        }
    }
    return out;
}

DualNormResult dual_norm_via_molecules(const SampledFunction& x, const std::vector<Molecule>& probes, double alpha) {
    DualNormResult out;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double n = ae_norm(probes[i], alpha).upper;
        if (n <= 0.0) continue;
        const double r = std::abs(pairing(x, probes[i])) / n;
        if (r > out.lower) {
            out.lower = r;
            out.best_probe = i;
        }
    }
    return out;
}

WeakStarReport weakstar_convergence_check(const std::vector<SampledFunction>& family, const SampledFunction& limit,
                                          const std::vector<Molecule>& probes, double alpha, std::optional<double> bound,
                                          std::size_t tail_start) {
    if (family.empty()) throw std::invalid_argument("weakstar_convergence_check: empty family");
    if (tail_start >= family.size()) throw std::invalid_argument("weakstar_convergence_check: tail starts past the family");
    WeakStarReport r;
    std::vector<double> limit_pairings;
    for (const auto& m : probes) limit_pairings.push_back(pairing(limit, m));
    for (const auto& x : family) {
        const double c = hoelder_coeff(x, alpha);
        r.member_coeffs.push_back(c);
        if (!std::isfinite(c) || (bound && c > *bound)) r.bounded = false;
        r.norm_bound = std::max(r.norm_bound, c);
        double gap = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) gap = std::max(gap, std::abs(pairing(x, probes[i]) - limit_pairings[i]));
        r.gap_trace.push_back(gap);
    }
    r.limit_coeff = hoelder_coeff(limit, alpha);
    const double tail_min = *std::min_element(r.member_coeffs.begin() + static_cast<std::ptrdiff_t>(tail_start), r.member_coeffs.end());
    r.lower_semicontinuous = r.limit_coeff <= tail_min + 1e-9;
    return r;
}

}  // namespace rp
