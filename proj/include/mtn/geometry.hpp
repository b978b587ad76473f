// SPDX-License-Identifier: Apache-2.0
#ifndef MTN_GEOMETRY_HPP
#define MTN_GEOMETRY_HPP

#include <map>
#include <string>
#include <vector>

#include "mtn/flow.hpp"
#include "mtn/measure.hpp"

namespace mtn {

enum class VertexRole { internal, source, well };

const char* to_string(VertexRole role);

/// Oriented arc with unit parametrization: tail = pi(0), head = pi(1).
/// Physical length is absorbed into the velocity (an arc of length L with
/// speed w(x) is modeled as v(y) = w(L y) / L on [0, 1]). Self-loops are
/// allowed; they are solvable only by the time-stepping algorithm.
struct NetworkArc {
  std::string id;
  std::string tail;
  std::string head;
  VelocityField velocity = VelocityField::constant(1.0);
};

/// Small row-major matrix for distribution-matrix pieces.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

// Row sums of distribution pieces must equal 1 within this tolerance.
inline constexpr double kRowSumTol = 1e-12;

/// Matrix-valued step function of time: one row-stochastic matrix per piece,
/// pieces right-open with the last closed at the horizon. Rows index the
/// incoming arcs of a vertex (source vertexes have a single row), columns its
/// outgoing arcs, both in lexicographic arc-id order.
class DistributionSchedule {
 public:
  DistributionSchedule() = default;
  DistributionSchedule(std::vector<double> breakpoints, std::vector<Matrix> pieces);

  static DistributionSchedule constant(Interval domain, Matrix piece);

  const Matrix& at(double t) const;  // throws std::domain_error outside
  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<Matrix>& pieces() const { return pieces_; }
  int rows() const { return pieces_.empty() ? 0 : pieces_.front().rows; }
  int cols() const { return pieces_.empty() ? 0 : pieces_.front().cols; }

  // The (row, col) entry as a step function of time, for measure weighting.
  StepFunction entry(int row, int col) const;

 private:
  std::vector<double> bp_;
  std::vector<Matrix> pieces_;
};

/// Oriented network with per-arc velocities, vertex roles derived from the
/// in/out degrees, and distribution schedules at internal and source
/// vertexes. Immutable after construction; all queries are thread-safe.
class Network {
 public:
  // Empty placeholder; every query requires a validated network built with
  // the full constructor.
  Network() = default;

  Network(std::vector<std::string> vertex_ids, std::vector<NetworkArc> arcs,
          std::map<std::string, DistributionSchedule> schedules, double horizon);

  double horizon() const { return horizon_; }
  const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
  const std::vector<NetworkArc>& arcs() const { return arcs_; }
  const std::map<std::string, DistributionSchedule>& schedules() const {
    return schedules_;
  }

  VertexRole role(const std::string& vertex_id) const;
  // Incoming/outgoing arc indices of a vertex, sorted by arc id (this is the
  // row/column order of its distribution schedule).
  const std::vector<int>& incoming(const std::string& vertex_id) const;
  const std::vector<int>& outgoing(const std::string& vertex_id) const;

  int arc_index(const std::string& arc_id) const;  // -1 when absent
  const NetworkArc& arc(int index) const { return arcs_[static_cast<size_t>(index)]; }

  // The distribution matrix (or 1-row vector for a source) in force at time t.
  Matrix schedule_at(const std::string& vertex_id, double t) const;

  // Schedule entry routing arc `from` (ignored for sources) into arc `to`,
  // as a step function on [0, T]. Vertexes with a single outgoing arc may
  // omit their schedule; the implied entry is identically 1.
  StepFunction routing_weight(const std::string& vertex_id, int from_arc,
                              int to_arc) const;

  bool has_source() const;

 private:
  std::vector<std::string> vertex_ids_;
  std::vector<NetworkArc> arcs_;
  std::map<std::string, DistributionSchedule> schedules_;
  double horizon_ = 0.0;
  std::map<std::string, VertexRole> roles_;
  std::map<std::string, std::vector<int>> incoming_;
  std::map<std::string, std::vector<int>> outgoing_;
  std::map<std::string, int> arc_index_;
};

// Role per vertex, recomputed from degrees (idempotent; equals the cached
// roles of a valid network).
std::map<std::string, VertexRole> classify_vertexes(const Network& net);

/// Arcs grouped by distance from the source set: level 0 holds arcs leaving
/// a source, level m arcs whose every upstream arc sits in an earlier level.
/// Arcs on or downstream of a directed cycle never become ready and are
/// reported in `flagged` (they require the time-stepping algorithm).
struct LevelPartition {
  std::vector<std::vector<int>> levels;  // arc indices
  std::vector<int> flagged;
};

// Throws UnsupportedScenario("no sources") when the source set is empty.
LevelPartition source_distance_partition(const Network& net);

}  // namespace mtn

#endif  // MTN_GEOMETRY_HPP
