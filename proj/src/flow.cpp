// SPDX-License-Identifier: Apache-2.0
#include "mtn/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// int_0^dx dz / (v0 + m z), stable for small m.
double segment_time(double v0, double m, double dx) {
  if (dx == 0.0) return 0.0;
  if (m == 0.0) return dx / v0;
  return std::log1p(m * dx / v0) / m;
}

// Inverse of segment_time: dx such that the travel time from the segment
// start equals u.
double segment_advance(double v0, double m, double u) {
  if (u == 0.0) return 0.0;
  if (m == 0.0) return v0 * u;
  return v0 * std::expm1(m * u) / m;
}

}  // namespace

VelocityField VelocityField::constant(double c) {
  require(std::isfinite(c) && c > 0.0, "constant velocity must be > 0");
  VelocityField v;
  v.kind_ = Kind::constant;
  v.a_ = c;
  v.b_ = 0.0;
  v.vmin_ = v.vmax_ = c;
  v.lip_ = 0.0;
  return v;
}

VelocityField VelocityField::affine(double intercept, double slope) {
  require(std::isfinite(intercept) && std::isfinite(slope),
          "affine velocity coefficients must be finite");
  require(intercept > 0.0 && intercept + slope > 0.0,
          "affine velocity must be strictly positive on [0, 1]");
  if (slope == 0.0) return constant(intercept);
  VelocityField v;
  v.kind_ = Kind::affine;
  v.a_ = intercept;
  v.b_ = slope;
  v.vmin_ = std::min(intercept, intercept + slope);
  v.vmax_ = std::max(intercept, intercept + slope);
  v.lip_ = std::abs(slope);
  return v;
}

VelocityField VelocityField::sampled(std::vector<double> xs, std::vector<double> vs) {
  require(xs.size() >= 2 && xs.size() == vs.size(),
          "sampled velocity needs at least two matching samples");
  require(xs.front() == 0.0 && xs.back() == 1.0,
          "sampled velocity must span [0, 1]");
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    require(xs[i] < xs[i + 1], "sample positions must be strictly increasing");
  }
  VelocityField v;
  v.kind_ = Kind::sampled;
  v.vmin_ = std::numeric_limits<double>::infinity();
  v.vmax_ = 0.0;
  for (size_t i = 0; i < vs.size(); ++i) {
    require(std::isfinite(vs[i]) && vs[i] > 0.0,
            "sampled velocity values must be > 0");
    v.vmin_ = std::min(v.vmin_, vs[i]);
    v.vmax_ = std::max(v.vmax_, vs[i]);
    if (i + 1 < vs.size()) {
      v.lip_ = std::max(v.lip_, std::abs(vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]));
    }
  }
  v.xs_ = std::move(xs);
  v.vs_ = std::move(vs);
  return v;
}

double VelocityField::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::affine:
      return a_ + b_ * x;
    case Kind::sampled: {
      if (x <= xs_.front()) return vs_.front();
      if (x >= xs_.back()) return vs_.back();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const size_t i = static_cast<size_t>(it - xs_.begin()) - 1;
      const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return vs_[i] + w * (vs_[i + 1] - vs_[i]);
    }
  }
  return a_;
}

ArcClock::ArcClock(VelocityField v) : v_(std::move(v)) {
  switch (v_.kind()) {
    case VelocityField::Kind::constant:
      total_ = 1.0 / v_.affine_intercept();
      break;
    case VelocityField::Kind::affine:
      total_ = segment_time(v_.affine_intercept(), v_.affine_slope(), 1.0);
      break;
    case VelocityField::Kind::sampled: {
      const auto& xs = v_.sample_positions();
      const auto& vs = v_.sample_values();
      cum_.resize(xs.size());
      cum_[0] = 0.0;
      for (size_t i = 0; i + 1 < xs.size(); ++i) {
        const double dx = xs[i + 1] - xs[i];
        const double m = (vs[i + 1] - vs[i]) / dx;
        cum_[i + 1] = cum_[i] + segment_time(vs[i], m, dx);
      }
      total_ = cum_.back();
      break;
    }
  }
}

double ArcClock::theta(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return total_;
  switch (v_.kind()) {
    case VelocityField::Kind::constant:
      return x / v_.affine_intercept();
    case VelocityField::Kind::affine:
      return segment_time(v_.affine_intercept(), v_.affine_slope(), x);
    case VelocityField::Kind::sampled: {
      const auto& xs = v_.sample_positions();
      const auto& vs = v_.sample_values();
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const size_t i = static_cast<size_t>(it - xs.begin()) - 1;
      const double dx = xs[i + 1] - xs[i];
      const double m = (vs[i + 1] - vs[i]) / dx;
      return cum_[i] + segment_time(vs[i], m, x - xs[i]);
    }
  }
  return 0.0;
}

double ArcClock::theta_inv(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= total_) return 1.0;
  switch (v_.kind()) {
    case VelocityField::Kind::constant:
      return u * v_.affine_intercept();
    case VelocityField::Kind::affine:
      return segment_advance(v_.affine_intercept(), v_.affine_slope(), u);
    case VelocityField::Kind::sampled: {
      const auto& xs = v_.sample_positions();
      const auto& vs = v_.sample_values();
      auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
      size_t i = static_cast<size_t>(it - cum_.begin());
      i = i == 0 ? 0 : i - 1;
      if (i + 1 >= xs.size()) i = xs.size() - 2;
      const double dx = xs[i + 1] - xs[i];
      const double m = (vs[i + 1] - vs[i]) / dx;
      const double x = xs[i] + segment_advance(vs[i], m, u - cum_[i]);
      return std::clamp(x, xs[i], xs[i + 1]);
    }
  }
  return 0.0;
}

double ArcClock::tau_inv(double T) const {
  if (T < 0.0) throw std::domain_error("tau_inv: negative time");
  if (T > total_) return -std::numeric_limits<double>::infinity();
  return theta_inv(total_ - T);
}

FlowResult flow_from_interior(const ArcClock& clock, double x, double t) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("flow_from_interior: x outside [0, 1]");
  }
  if (!(t >= 0.0)) throw std::domain_error("flow_from_interior: t must be >= 0");
  // Compare against tau(x) rather than accumulating theta(x) + t, so that
  // t = tau(x) lands exactly on the boundary.
  const double tau = clock.tau(x);
  if (t > tau) return {true, 0.0, tau};
  if (t == tau) return {false, 1.0, 0.0};
  return {false, clock.theta_inv(clock.theta(x) + t), 0.0};
}

FlowResult flow_from_boundary(const ArcClock& clock, double s, double t) {
  if (!(s >= 0.0)) throw std::domain_error("flow_from_boundary: s must be >= 0");
  if (!(t >= s)) throw std::domain_error("flow_from_boundary: t must be >= s");
  const double sigma = clock.sigma(s);
  if (t > sigma) return {true, 0.0, sigma};
  if (t == sigma) return {false, 1.0, 0.0};
  return {false, clock.theta_inv(t - s), 0.0};
}

}  // namespace mtn
