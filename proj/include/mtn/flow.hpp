// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_FLOW_HPP
#define MTN_FLOW_HPP

#include <vector>

namespace mtn {

/// Strictly positive, bounded, Lipschitz velocity on the unit parametrization
/// [0, 1] of an arc. Three closed forms are supported; positivity is checked
/// at construction (analytically for constant/affine, at the sample nodes for
/// the piecewise-linear kind).
class VelocityField {
 public:
  enum class Kind { constant, affine, sampled };

  static VelocityField constant(double c);
  static VelocityField affine(double intercept, double slope);  // v(x) = a + b x
  static VelocityField sampled(std::vector<double> xs, std::vector<double> vs);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double min_value() const { return vmin_; }
  double max_value() const { return vmax_; }
  double lipschitz() const { return lip_; }

  double affine_intercept() const { return a_; }
  double affine_slope() const { return b_; }
  const std::vector<double>& sample_positions() const { return xs_; }
  const std::vector<double>& sample_values() const { return vs_; }

 private:
  VelocityField() = default;
  Kind kind_ = Kind::constant;
  double a_ = 1.0, b_ = 0.0;  // constant/affine coefficients
  std::vector<double> xs_, vs_;
  double vmin_ = 1.0, vmax_ = 1.0, lip_ = 0.0;
};

/// Cumulative travel time theta(x) = int_0^x dz / v(z) and its inverse. For
/// the supported velocity kinds theta has a closed form per segment, so flow
/// maps and exit times reduce to evaluating and inverting theta: no ODE
/// stepping and no boundary event detection.
class ArcClock {
 public:
  explicit ArcClock(VelocityField v);

  const VelocityField& velocity() const { return v_; }

  double theta(double x) const;      // [0,1] -> [0, total]
  double theta_inv(double u) const;  // [0, total] -> [0,1], clamped outside
  double total() const { return total_; }  // = theta(1) = tau(0)

  double tau(double x) const { return total_ - theta(x); }
  double sigma(double s) const { return s + total_; }
  // tau^{-1}(T); -infinity when T > tau(0) so that max{0, tau^{-1}(T)}
  // selects the empty initial-data branch.
  double tau_inv(double T) const;
  double sigma_inv(double T) const { return T - total_; }

 private:
  VelocityField v_;
  std::vector<double> cum_;  // cumulative theta at sample nodes (sampled kind)
  double total_ = 0.0;
};

/// Position of a characteristic at time t, or the exit time if it has left
/// through x = 1 strictly before t. Reaching x = 1 exactly at t reports the
/// boundary position, not an exit.
struct FlowResult {
  bool exited = false;
  double position = 0.0;   // valid when !exited
  double exit_time = 0.0;  // valid when exited
};

// Phi_t(x, 0): characteristic from the interior point x at time 0.
FlowResult flow_from_interior(const ArcClock& clock, double x, double t);

// Phi_t(0, s): characteristic entering at x = 0 at time s (requires t >= s).
FlowResult flow_from_boundary(const ArcClock& clock, double s, double t);

}  // namespace mtn

#endif  // MTN_FLOW_HPP
