// SPDX-License-Identifier: Apache-2.0
#include "mtn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mtn/detail/density_builder.hpp"
#include "mtn/detail/quadrature.hpp"

namespace mtn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite(double x) { return std::isfinite(x); }

// Index of the piece containing x under the right-open convention (last piece
// closed), or -1 outside.
int piece_index(const std::vector<double>& bp, double x) {
  if (bp.size() < 2 || x < bp.front() || x > bp.back()) return -1;
  if (x == bp.back()) return static_cast<int>(bp.size()) - 2;
  auto it = std::upper_bound(bp.begin(), bp.end(), x);
  return static_cast<int>(it - bp.begin()) - 1;
}

}  // namespace

HybridMeasure::HybridMeasure(Interval domain, std::vector<Atom> atoms,
                             std::vector<double> density_bp,
                             std::vector<double> density_val)
    : domain_(domain),
      atoms_(std::move(atoms)),
      density_bp_(std::move(density_bp)),
      density_val_(std::move(density_val)) {
  require(finite(domain_.lo) && finite(domain_.hi) && domain_.hi >= domain_.lo,
          "measure domain must be a finite interval");
  for (const Atom& a : atoms_) {
    require(finite(a.position) && domain_.contains(a.position),
            "atom position outside measure domain");
    require(finite(a.mass) && a.mass > 0.0, "atom mass must be > 0");
  }
  if (!density_bp_.empty() || !density_val_.empty()) {
    require(density_bp_.size() >= 2 &&
                density_val_.size() + 1 == density_bp_.size(),
            "density needs n+1 breakpoints for n values");
    for (size_t i = 0; i + 1 < density_bp_.size(); ++i) {
      require(density_bp_[i] < density_bp_[i + 1],
              "density breakpoints must be strictly increasing");
    }
    require(density_bp_.front() >= domain_.lo &&
                density_bp_.back() <= domain_.hi,
            "density support outside measure domain");
    for (double v : density_val_) {
      require(finite(v) && v >= 0.0, "density values must be >= 0");
    }
  }

  // Canonical atoms: sorted, near-coincident positions merged.
  std::stable_sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) {
    return a.position < b.position;
  });
  std::vector<Atom> merged;
  merged.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    if (!merged.empty() && a.position - merged.back().position <= kAtomMergeTol) {
      Atom& m = merged.back();
      const double w = m.mass + a.mass;
      m.position = (m.position * m.mass + a.position * a.mass) / w;
      m.mass = w;
    } else {
      merged.push_back(a);
    }
  }
  atoms_ = std::move(merged);

  // Canonical density: adjacent equal values merged, outer zero pieces
  // stripped, all-zero chain dropped.
  if (!density_val_.empty()) {
    size_t first = 0, last = density_val_.size();
    while (first < last && density_val_[first] == 0.0) ++first;
    while (last > first && density_val_[last - 1] == 0.0) --last;
    std::vector<double> bp, val;
    for (size_t i = first; i < last; ++i) {
      if (!val.empty() && val.back() == density_val_[i]) {
        bp.back() = density_bp_[i + 1];
      } else {
        if (val.empty()) bp.push_back(density_bp_[i]);
        bp.push_back(density_bp_[i + 1]);
        val.push_back(density_val_[i]);
      }
    }
    density_bp_ = std::move(bp);
    density_val_ = std::move(val);
  } else {
    density_bp_.clear();
  }
}

HybridMeasure HybridMeasure::zero(Interval domain) {
  return HybridMeasure(domain, {}, {}, {});
}

HybridMeasure HybridMeasure::dirac(Interval domain, double position, double mass) {
  return HybridMeasure(domain, {{position, mass}}, {}, {});
}

HybridMeasure HybridMeasure::from_atoms(Interval domain, std::vector<Atom> atoms) {
  return HybridMeasure(domain, std::move(atoms), {}, {});
}

HybridMeasure HybridMeasure::from_density(Interval domain,
                                          std::vector<double> breakpoints,
                                          std::vector<double> values) {
  return HybridMeasure(domain, {}, std::move(breakpoints), std::move(values));
}

HybridMeasure HybridMeasure::uniform_density(Interval domain, double value) {
  if (value == 0.0 || domain.length() == 0.0) return zero(domain);
  return HybridMeasure(domain, {}, {domain.lo, domain.hi}, {value});
}

double HybridMeasure::atom_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.mass;
  return s;
}

double HybridMeasure::density_mass() const {
  double s = 0.0;
  for (size_t i = 0; i < density_val_.size(); ++i) {
    s += density_val_[i] * (density_bp_[i + 1] - density_bp_[i]);
  }
  return s;
}

double HybridMeasure::density_at(double x) const {
  const int i = piece_index(density_bp_, x);
  return i < 0 ? 0.0 : density_val_[i];
}

StepFunction::StepFunction(std::vector<double> breakpoints,
                           std::vector<double> values)
    : bp_(std::move(breakpoints)), val_(std::move(values)) {
  require(bp_.size() >= 2 && val_.size() + 1 == bp_.size(),
          "step function needs n+1 breakpoints for n values");
  for (size_t i = 0; i + 1 < bp_.size(); ++i) {
    require(bp_[i] < bp_[i + 1],
            "step function breakpoints must be strictly increasing");
  }
  for (double v : val_) require(finite(v), "step function values must be finite");
}

StepFunction StepFunction::constant(Interval domain, double value) {
  return StepFunction({domain.lo, domain.hi}, {value});
}

double StepFunction::operator()(double t) const {
  const int i = piece_index(bp_, t);
  if (i < 0) throw std::domain_error("step function evaluated outside its domain");
  return val_[i];
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints,
                                 std::vector<double> values)
    : bp_(std::move(breakpoints)), val_(std::move(values)) {
  require(bp_.size() >= 2 && bp_.size() == val_.size(),
          "piecewise-linear function needs matching breakpoints and values");
  for (size_t i = 0; i + 1 < bp_.size(); ++i) {
    require(bp_[i] < bp_[i + 1], "breakpoints must be strictly increasing");
  }
  for (size_t i = 0; i < val_.size(); ++i) {
    require(finite(val_[i]), "values must be finite");
    sup_ = std::max(sup_, std::abs(val_[i]));
    if (i + 1 < val_.size()) {
      lip_ = std::max(lip_,
                      std::abs(val_[i + 1] - val_[i]) / (bp_[i + 1] - bp_[i]));
    }
  }
}

PiecewiseLinear PiecewiseLinear::constant(Interval domain, double value) {
  return PiecewiseLinear({domain.lo, domain.hi}, {value, value});
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= bp_.front()) return val_.front();
  if (x >= bp_.back()) return val_.back();
  auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
  const size_t i = static_cast<size_t>(it - bp_.begin()) - 1;
  const double w = (x - bp_[i]) / (bp_[i + 1] - bp_[i]);
  return val_[i] + w * (val_[i + 1] - val_[i]);
}

double pair(const HybridMeasure& mu, const PiecewiseLinear& phi) {
  require(phi.domain().lo <= mu.domain().lo && phi.domain().hi >= mu.domain().hi,
          "pair: test function does not cover the measure domain");
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.mass * phi(a.position);
  // Exact trapezoid per overlap of a constant piece with a linear segment.
  const auto& dbp = mu.density_breakpoints();
  const auto& dval = mu.density_values();
  const auto& fbp = phi.breakpoints();
  for (size_t i = 0; i < dval.size(); ++i) {
    if (dval[i] == 0.0) continue;
    double a = dbp[i];
    const double hi = dbp[i + 1];
    while (a < hi) {
      double b = hi;
      auto it = std::upper_bound(fbp.begin(), fbp.end(), a);
      if (it != fbp.end()) b = std::min(b, *it);
      if (!(b > a)) break;
      s += dval[i] * (b - a) * 0.5 * (phi(a) + phi(b));
      a = b;
    }
  }
  return s;
}

double pair(const HybridMeasure& mu, const std::function<double(double)>& phi,
            double tol) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.mass * phi(a.position);
  const auto& dbp = mu.density_breakpoints();
  const auto& dval = mu.density_values();
  const double support = dbp.empty() ? 0.0 : dbp.back() - dbp.front();
  for (size_t i = 0; i < dval.size(); ++i) {
    if (dval[i] == 0.0) continue;
    const double lo = dbp[i], hi = dbp[i + 1];
    const double share = (hi - lo) / std::max(support, 1e-300);
    const double piece_tol =
        std::max(1e-15, tol * share / std::max(dval[i], 1.0));
    s += dval[i] * detail::adaptive_simpson(phi, lo, hi, piece_tol);
  }
  return s;
}

HybridMeasure scale(const HybridMeasure& mu, double c) {
  require(std::isfinite(c) && c >= 0.0, "scale factor must be >= 0 (positive cone)");
  if (c == 0.0) return HybridMeasure::zero(mu.domain());
  std::vector<Atom> atoms = mu.atoms();
  for (Atom& a : atoms) a.mass *= c;
  std::vector<double> val = mu.density_values();
  for (double& v : val) v *= c;
  return HybridMeasure(mu.domain(), std::move(atoms), mu.density_breakpoints(),
                       std::move(val));
}

HybridMeasure add(const HybridMeasure& a, const HybridMeasure& b) {
  require(a.domain() == b.domain(), "add: measures live on different domains");
  std::vector<Atom> atoms = a.atoms();
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());

  std::vector<double> bp, val;
  if (a.has_density() || b.has_density()) {
    bp.insert(bp.end(), a.density_breakpoints().begin(), a.density_breakpoints().end());
    bp.insert(bp.end(), b.density_breakpoints().begin(), b.density_breakpoints().end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    for (size_t i = 0; i + 1 < bp.size(); ++i) {
      const double mid = 0.5 * (bp[i] + bp[i + 1]);
      val.push_back(a.density_at(mid) + b.density_at(mid));
    }
  }
  return HybridMeasure(a.domain(), std::move(atoms), std::move(bp), std::move(val));
}

HybridMeasure restrict_to(const HybridMeasure& mu, Interval cut, Endpoint left,
                          Endpoint right) {
  require(cut.hi >= cut.lo, "restriction interval is empty");
  require(cut.lo >= mu.domain().lo && cut.hi <= mu.domain().hi,
          "restriction interval outside the measure domain");
  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms()) {
    const bool in_left = left == Endpoint::closed ? a.position >= cut.lo
                                                  : a.position > cut.lo;
    const bool in_right = right == Endpoint::closed ? a.position <= cut.hi
                                                    : a.position < cut.hi;
    if (in_left && in_right) atoms.push_back(a);
  }
  detail::DensityBuilder db;
  const auto& dbp = mu.density_breakpoints();
  const auto& dval = mu.density_values();
  for (size_t i = 0; i < dval.size(); ++i) {
    db.push(std::max(dbp[i], cut.lo), std::min(dbp[i + 1], cut.hi), dval[i]);
  }
  return HybridMeasure(mu.domain(), std::move(atoms), std::move(db.breakpoints()),
                       std::move(db.values()));
}

HybridMeasure shift(const HybridMeasure& mu, double offset, Interval new_domain) {
  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms()) {
    const double p = a.position + offset;
    if (new_domain.contains(p)) atoms.push_back({p, a.mass});
  }
  detail::DensityBuilder db;
  const auto& dbp = mu.density_breakpoints();
  const auto& dval = mu.density_values();
  for (size_t i = 0; i < dval.size(); ++i) {
    db.push(std::max(dbp[i] + offset, new_domain.lo),
            std::min(dbp[i + 1] + offset, new_domain.hi), dval[i]);
  }
  return HybridMeasure(new_domain, std::move(atoms), std::move(db.breakpoints()),
                       std::move(db.values()));
}

HybridMeasure weight_by(const HybridMeasure& mu, const StepFunction& w) {
  for (double v : w.values()) {
    require(v >= 0.0 && v <= 1.0, "weight function values must lie in [0, 1]");
  }
  require(w.domain().lo <= mu.domain().lo && w.domain().hi >= mu.domain().hi,
          "weight function does not cover the measure domain");
  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms()) {
    const double m = a.mass * w(a.position);
    if (m > 0.0) atoms.push_back({a.position, m});
  }
  detail::DensityBuilder db;
  const auto& dbp = mu.density_breakpoints();
  const auto& dval = mu.density_values();
  const auto& wbp = w.breakpoints();
  for (size_t i = 0; i < dval.size(); ++i) {
    if (dval[i] == 0.0) continue;
    double a = dbp[i];
    const double hi = dbp[i + 1];
    while (a < hi) {
      double b = hi;
      auto it = std::upper_bound(wbp.begin(), wbp.end(), a);
      if (it != wbp.end()) b = std::min(b, *it);
      if (!(b > a)) break;
      db.push(a, b, dval[i] * w(0.5 * (a + b)));
      a = b;
    }
  }
  return HybridMeasure(mu.domain(), std::move(atoms), std::move(db.breakpoints()),
                       std::move(db.values()));
}

}  // namespace mtn
