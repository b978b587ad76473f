// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_MEASURE_HPP
#define MTN_MEASURE_HPP

#include <functional>
#include <vector>

namespace mtn {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

struct Atom {
  double position = 0.0;
  double mass = 0.0;
};

enum class Endpoint { open, closed };

// Atoms closer than this are merged into one (mass-weighted position).
inline constexpr double kAtomMergeTol = 1e-12;

/// Finite positive measure on a closed interval: a finite list of point
/// masses plus a piecewise-constant density. Atoms model microscopic
/// entities, the density the macroscopic phase. Values are immutable after
/// construction; all operations return new measures.
class HybridMeasure {
 public:
  HybridMeasure() = default;

  // Validates and normalizes: positions inside the domain, masses > 0,
  // density values >= 0, breakpoints strictly increasing; atoms sorted and
  // merged; zero-value and zero-width density pieces dropped; adjacent
  // pieces with identical values coalesced.
  HybridMeasure(Interval domain, std::vector<Atom> atoms,
                std::vector<double> density_breakpoints,
                std::vector<double> density_values);

  static HybridMeasure zero(Interval domain);
  static HybridMeasure dirac(Interval domain, double position, double mass = 1.0);
  static HybridMeasure from_atoms(Interval domain, std::vector<Atom> atoms);
  static HybridMeasure from_density(Interval domain, std::vector<double> breakpoints,
                                    std::vector<double> values);
  static HybridMeasure uniform_density(Interval domain, double value);

  const Interval& domain() const { return domain_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& density_breakpoints() const { return density_bp_; }
  const std::vector<double>& density_values() const { return density_val_; }

  bool has_density() const { return !density_val_.empty(); }
  bool is_zero() const { return atoms_.empty() && density_val_.empty(); }

  double atom_mass() const;
  double density_mass() const;
  double total_mass() const { return atom_mass() + density_mass(); }

  // Density value at x; pieces are right-open, 0 outside every piece.
  double density_at(double x) const;

 private:
  Interval domain_;
  std::vector<Atom> atoms_;
  std::vector<double> density_bp_;   // empty or size >= 2, strictly increasing
  std::vector<double> density_val_;  // size = density_bp_.size() - 1
};

/// Piecewise-constant function of time, right-open pieces with the last piece
/// closed at the right end. Used for distribution-fraction weights.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  static StepFunction constant(Interval domain, double value);

  double operator()(double t) const;  // throws std::domain_error outside
  Interval domain() const { return {bp_.front(), bp_.back()}; }
  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& values() const { return val_; }
  bool empty() const { return bp_.empty(); }

 private:
  std::vector<double> bp_;
  std::vector<double> val_;
};

/// Continuous piecewise-linear test function with its exact bounded-Lipschitz
/// norm ||phi||_inf + |phi|_L computed from the node representation.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> values);

  static PiecewiseLinear constant(Interval domain, double value);

  double operator()(double x) const;  // clamped evaluation at the ends
  Interval domain() const { return {bp_.front(), bp_.back()}; }
  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& values() const { return val_; }

  double sup_norm() const { return sup_; }
  double lip_seminorm() const { return lip_; }
  double bl_norm() const { return sup_ + lip_; }

 private:
  std::vector<double> bp_;
  std::vector<double> val_;
  double sup_ = 0.0;
  double lip_ = 0.0;
};

// Duality pairing <mu, phi>. Exact for piecewise-linear phi; for a general
// callable the density part is integrated by adaptive quadrature with
// absolute tolerance `tol`.
double pair(const HybridMeasure& mu, const PiecewiseLinear& phi);
double pair(const HybridMeasure& mu, const std::function<double(double)>& phi,
            double tol = 1e-10);

// Positive-cone algebra.
HybridMeasure scale(const HybridMeasure& mu, double c);
HybridMeasure add(const HybridMeasure& a, const HybridMeasure& b);

// mu restricted to [cut.lo, cut.hi]; the ambient domain is kept. Endpoint
// flags choose whether atoms sitting exactly on a cut point are kept.
HybridMeasure restrict_to(const HybridMeasure& mu, Interval cut,
                          Endpoint left = Endpoint::closed,
                          Endpoint right = Endpoint::closed);

// Time translation onto a new domain: atom at t maps to t + offset, density
// pieces shift rigidly; mass outside the new domain is dropped.
HybridMeasure shift(const HybridMeasure& mu, double offset, Interval new_domain);

// Measure with density w(t) relative to mu (distribution fractions): atoms
// are scaled by w at their position, density pieces are multiplied piecewise.
// w must take values in [0, 1] and cover mu's domain.
HybridMeasure weight_by(const HybridMeasure& mu, const StepFunction& w);

}  // namespace mtn

#endif  // MTN_MEASURE_HPP
