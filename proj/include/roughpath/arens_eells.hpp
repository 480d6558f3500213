#ifndef ROUGHPATH_ARENS_EELLS_HPP
#define ROUGHPATH_ARENS_EELLS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rp {

struct MoleculeAtom {
    double t;
    std::vector<double> v;
};

/// Finitely supported R^p-valued function on [0,T] with zero total sum.
/// Atoms at equal times are merged; the support is kept sorted.
class Molecule {
public:
    /// Throws std::invalid_argument when the values do not sum to zero within tol (absolute, per coordinate).
    explicit Molecule(std::vector<MoleculeAtom> atoms, double tol = 1e-12);

    int dim() const { return dim_; }
    const std::vector<MoleculeAtom>& atoms() const { return atoms_; }
    std::vector<double> support() const;
    bool empty() const { return atoms_.empty(); }

    Molecule operator+(const Molecule& other) const;
    Molecule operator*(double c) const;

private:
    std::vector<MoleculeAtom> atoms_;
    int dim_ = 0;
};

/// (1_{t} - 1_{s}) y; y must have unit Euclidean norm.
struct ElementaryMolecule {
    double t, s;
    std::vector<double> y;

    ElementaryMolecule(double t, double s, std::vector<double> y);
    Molecule molecule() const;
};

nlohmann::json to_json(const Molecule& m);
/// Reads [{"t": real, "v": [reals]}, ...] and validates the zero sum.
Molecule molecule_from_json(const nlohmann::json& j);

/// One term a (1_t - 1_s) y of a decomposition.
struct AeTerm {
    double a, t, s;
    std::vector<double> y;
};

/// A scalar function g with Hoelder-alpha coefficient at most 1, extended from the
/// transport potentials: g(u) = max_i (phi_i - |u - t_i|^alpha).
struct AeWitness {
    double alpha = 1.0;
    std::vector<double> direction;
    std::vector<double> times;
    std::vector<double> potentials;

    double operator()(double u) const;
};

struct AeNormResult {
    /// Cost of the certificate decomposition.
    double upper = 0.0;
    /// Pairing of the molecule with the witness; a certified lower bound.
    double lower = 0.0;
    std::vector<AeTerm> certificate;
    AeWitness witness;
    /// "coordinate" or "svd": which orthonormal basis produced the upper bound.
    std::string basis;
};

/// Arens-Eells norm for the Euclidean norm on R^p and cost |t - s|^alpha, alpha in (0,1].
/// In each direction of an orthonormal basis the scalar problem is a min-cost transportation
/// problem, exact because the cost is a metric. The upper bound is the best of the coordinate and
/// SVD bases; the lower bound is the best single-direction dual witness. Both agree for p = 1
/// and for molecules whose values are all parallel.
/// candidate_times, when given, must contain the support.
AeNormResult ae_norm(const Molecule& m, double alpha, const std::optional<std::vector<double>>& candidate_times = {});

/// A function [0,T] -> (R^p)^* known on a finite set of sample times.
class SampledFunction {
public:
    SampledFunction(std::vector<double> times, std::vector<std::vector<double>> values);

    int dim() const { return dim_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<std::vector<double>>& values() const { return values_; }
    /// Throws std::out_of_range when t is not a sample time.
    const std::vector<double>& at(double t) const;

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;
    int dim_ = 0;
};

/// sup over sample pairs of |x(u) - x(v)| / |u - v|^alpha (Euclidean norm).
double hoelder_coeff(const SampledFunction& x, double alpha);

/// sum over the support of <x(t), m(t)>.
double pairing(const SampledFunction& x, const Molecule& m);

/// All m^{e_k}_{t_j, t_i} for sample times t_i < t_j and coordinates k.
std::vector<Molecule> elementary_probes(const std::vector<double>& times, int p);

struct DualNormResult {
    double lower = 0.0;
    std::size_t best_probe = 0;
};

/// max over probes of |pairing(x, m)| / ae_norm(m).upper.
DualNormResult dual_norm_via_molecules(const SampledFunction& x, const std::vector<Molecule>& probes, double alpha);

struct WeakStarReport {
    double norm_bound = 0.0;
    bool bounded = true;
    std::vector<double> member_coeffs;
    /// Per member: max over probes of |<x_n - x, m>|.
    std::vector<double> gap_trace;
    double limit_coeff = 0.0;
    /// limit_coeff <= min over the tail of member_coeffs + 1e-9.
    bool lower_semicontinuous = true;
};

/// Bounded pointwise-weak convergence check of a sequence against a limit.
/// The family is flagged unbounded when a coefficient is non-finite or exceeds bound (if given).
/// tail_start indexes the first member counted as tail for lower semicontinuity.
WeakStarReport weakstar_convergence_check(const std::vector<SampledFunction>& family, const SampledFunction& limit,
                                          const std::vector<Molecule>& probes, double alpha,
                                          std::optional<double> bound = {}, std::size_t tail_start = 0);

}  // namespace rp

#endif  // ROUGHPATH_ARENS_EELLS_HPP
