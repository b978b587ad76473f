// SPDX-License-Identifier: Apache-2.0
#include "mtn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>

#include "mtn/errors.hpp"

namespace mtn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_row_stochastic(const Matrix& m, const std::string& where) {
  for (int r = 0; r < m.rows; ++r) {
    double sum = 0.0;
    for (int c = 0; c < m.cols; ++c) {
      const double p = m.at(r, c);
      require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
              where + ": entries must lie in [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw std::invalid_argument(where + ": row " + std::to_string(r + 1) +
                                  " sums to " + std::to_string(sum));
    }
  }
}

}  // namespace

const char* to_string(VertexRole role) {
  switch (role) {
    case VertexRole::internal:
      return "internal";
    case VertexRole::source:
      return "source";
    case VertexRole::well:
      return "well";
  }
  return "?";
}

DistributionSchedule::DistributionSchedule(std::vector<double> breakpoints,
                                           std::vector<Matrix> pieces)
    : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  require(bp_.size() >= 2 && pieces_.size() + 1 == bp_.size(),
          "schedule needs n+1 breakpoints for n pieces");
  for (size_t i = 0; i + 1 < bp_.size(); ++i) {
    require(bp_[i] < bp_[i + 1], "schedule breakpoints must be strictly increasing");
  }
  for (size_t i = 0; i < pieces_.size(); ++i) {
    require(pieces_[i].rows == pieces_.front().rows &&
                pieces_[i].cols == pieces_.front().cols,
            "schedule pieces must share dimensions");
    validate_row_stochastic(pieces_[i], "schedule piece " + std::to_string(i + 1));
  }
}

DistributionSchedule DistributionSchedule::constant(Interval domain, Matrix piece) {
  std::vector<Matrix> pieces{std::move(piece)};
  return DistributionSchedule({domain.lo, domain.hi}, std::move(pieces));
}

const Matrix& DistributionSchedule::at(double t) const {
  if (bp_.empty() || t < bp_.front() || t > bp_.back()) {
    throw std::domain_error("schedule evaluated outside [0, T]");
  }
  if (t == bp_.back()) return pieces_.back();
  auto it = std::upper_bound(bp_.begin(), bp_.end(), t);
  return pieces_[static_cast<size_t>(it - bp_.begin()) - 1];
}

StepFunction DistributionSchedule::entry(int row, int col) const {
  std::vector<double> vals;
  vals.reserve(pieces_.size());
  for (const Matrix& m : pieces_) vals.push_back(m.at(row, col));
  return StepFunction(bp_, std::move(vals));
}

Network::Network(std::vector<std::string> vertex_ids, std::vector<NetworkArc> arcs,
                 std::map<std::string, DistributionSchedule> schedules,
                 double horizon)
    : vertex_ids_(std::move(vertex_ids)),
      arcs_(std::move(arcs)),
      schedules_(std::move(schedules)),
      horizon_(horizon) {
  require(std::isfinite(horizon_) && horizon_ > 0.0, "horizon must be > 0");
  require(!vertex_ids_.empty(), "network needs at least one vertex");
  std::sort(vertex_ids_.begin(), vertex_ids_.end());
  require(std::adjacent_find(vertex_ids_.begin(), vertex_ids_.end()) ==
              vertex_ids_.end(),
          "duplicate vertex id");
  std::sort(arcs_.begin(), arcs_.end(),
            [](const NetworkArc& a, const NetworkArc& b) { return a.id < b.id; });

  const std::set<std::string> vset(vertex_ids_.begin(), vertex_ids_.end());
  for (const auto& v : vertex_ids_) {
    incoming_[v] = {};
    outgoing_[v] = {};
  }
  for (size_t i = 0; i < arcs_.size(); ++i) {
    const NetworkArc& a = arcs_[i];
    require(!a.id.empty(), "arc id must be nonempty");
    require(arc_index_.emplace(a.id, static_cast<int>(i)).second,
            "duplicate arc id '" + a.id + "'");
    require(vset.count(a.tail) == 1,
            "arc '" + a.id + "' tail '" + a.tail + "' is not a vertex");
    require(vset.count(a.head) == 1,
            "arc '" + a.id + "' head '" + a.head + "' is not a vertex");
    outgoing_[a.tail].push_back(static_cast<int>(i));
    incoming_[a.head].push_back(static_cast<int>(i));
  }

  // Roles from degrees; every vertex must touch at least one arc.
  for (const auto& v : vertex_ids_) {
    const size_t din = incoming_[v].size();
    const size_t dout = outgoing_[v].size();
    if (din + dout == 0) {
      throw std::invalid_argument("vertex '" + v + "' is isolated (degree 0)");
    }
    roles_[v] = din == 0   ? VertexRole::source
                : dout == 0 ? VertexRole::well
                            : VertexRole::internal;
  }

  // Connectivity of the underlying undirected graph.
  {
    std::set<std::string> seen;
    std::queue<std::string> q;
    q.push(vertex_ids_.front());
    seen.insert(vertex_ids_.front());
    while (!q.empty()) {
      const std::string v = q.front();
      q.pop();
      auto touch = [&](const std::string& u) {
        if (seen.insert(u).second) q.push(u);
      };
      for (int i : outgoing_[v]) touch(arcs_[static_cast<size_t>(i)].head);
      for (int i : incoming_[v]) touch(arcs_[static_cast<size_t>(i)].tail);
    }
    require(seen.size() == vertex_ids_.size(), "network is not connected");
  }

  // Schedule shapes: internal vertexes need d_I x d_O, sources 1 x d_O;
  // both may be omitted when there is a single outgoing arc (implied ones).
  for (const auto& [v, sched] : schedules_) {
    require(vset.count(v) == 1, "schedule given for unknown vertex '" + v + "'");
    const VertexRole role = roles_[v];
    require(role != VertexRole::well, "well vertex '" + v + "' cannot route mass");
    const int want_rows =
        role == VertexRole::source ? 1 : static_cast<int>(incoming_[v].size());
    const int want_cols = static_cast<int>(outgoing_[v].size());
    require(sched.rows() == want_rows && sched.cols() == want_cols,
            "schedule at '" + v + "' must be " + std::to_string(want_rows) + "x" +
                std::to_string(want_cols));
    require(sched.breakpoints().front() == 0.0 &&
                sched.breakpoints().back() == horizon_,
            "schedule at '" + v + "' must cover [0, T]");
  }
  for (const auto& v : vertex_ids_) {
    if (roles_[v] == VertexRole::well) continue;
    if (outgoing_[v].size() > 1 && schedules_.count(v) == 0) {
      throw std::invalid_argument("vertex '" + v +
                                  "' has several outgoing arcs but no schedule");
    }
  }
}

VertexRole Network::role(const std::string& vertex_id) const {
  auto it = roles_.find(vertex_id);
  require(it != roles_.end(), "unknown vertex '" + vertex_id + "'");
  return it->second;
}

const std::vector<int>& Network::incoming(const std::string& vertex_id) const {
  auto it = incoming_.find(vertex_id);
  require(it != incoming_.end(), "unknown vertex '" + vertex_id + "'");
  return it->second;
}

const std::vector<int>& Network::outgoing(const std::string& vertex_id) const {
  auto it = outgoing_.find(vertex_id);
  require(it != outgoing_.end(), "unknown vertex '" + vertex_id + "'");
  return it->second;
}

int Network::arc_index(const std::string& arc_id) const {
  auto it = arc_index_.find(arc_id);
  return it == arc_index_.end() ? -1 : it->second;
}

Matrix Network::schedule_at(const std::string& vertex_id, double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw std::domain_error("schedule_at: t outside [0, T]");
  }
  auto it = schedules_.find(vertex_id);
  if (it != schedules_.end()) return it->second.at(t);
  const VertexRole r = role(vertex_id);
  require(r != VertexRole::well, "well vertex '" + vertex_id + "' has no schedule");
  const int rows = r == VertexRole::source
                       ? 1
                       : static_cast<int>(incoming(vertex_id).size());
  require(outgoing(vertex_id).size() == 1,
          "vertex '" + vertex_id + "' has no schedule");
  Matrix m(rows, 1);
  for (int k = 0; k < rows; ++k) m.at(k, 0) = 1.0;
  return m;
}

StepFunction Network::routing_weight(const std::string& vertex_id, int from_arc,
                                     int to_arc) const {
  const VertexRole r = role(vertex_id);
  require(r != VertexRole::well, "well vertex cannot route");
  const auto& out = outgoing(vertex_id);
  auto cit = std::find(out.begin(), out.end(), to_arc);
  require(cit != out.end(), "arc is not outgoing from vertex");
  const int col = static_cast<int>(cit - out.begin());
  int row = 0;
  if (r == VertexRole::internal) {
    const auto& in = incoming(vertex_id);
    auto rit = std::find(in.begin(), in.end(), from_arc);
    require(rit != in.end(), "arc is not incoming at vertex");
    row = static_cast<int>(rit - in.begin());
  }
  auto sit = schedules_.find(vertex_id);
  if (sit != schedules_.end()) return sit->second.entry(row, col);
  return StepFunction::constant({0.0, horizon_}, 1.0);
}

bool Network::has_source() const {
  for (const auto& [v, r] : roles_) {
    if (r == VertexRole::source) return true;
  }
  return false;
}

std::map<std::string, VertexRole> classify_vertexes(const Network& net) {
  std::map<std::string, VertexRole> roles;
  for (const auto& v : net.vertex_ids()) {
    const size_t din = net.incoming(v).size();
    const size_t dout = net.outgoing(v).size();
    if (din + dout == 0) {
      throw std::invalid_argument("vertex '" + v + "' is isolated (degree 0)");
    }
    roles[v] = din == 0   ? VertexRole::source
               : dout == 0 ? VertexRole::well
                           : VertexRole::internal;
  }
  return roles;
}

LevelPartition source_distance_partition(const Network& net) {
  if (!net.has_source()) {
    throw UnsupportedScenario(
        "no sources: the level construction needs a nonempty source set; use "
        "the time-stepping algorithm");
  }
  const size_t n = net.arcs().size();
  // Arc j becomes ready once every arc feeding its tail is placed; its level
  // is one past the deepest upstream level.
  std::vector<int> pending(n, 0);
  std::vector<int> level(n, -1);
  for (size_t j = 0; j < n; ++j) {
    pending[j] = static_cast<int>(net.incoming(net.arcs()[j].tail).size());
  }
  std::queue<int> ready;
  for (size_t j = 0; j < n; ++j) {
    if (pending[j] == 0) {
      level[j] = 0;
      ready.push(static_cast<int>(j));
    }
  }
  LevelPartition part;
  while (!ready.empty()) {
    const int j = ready.front();
    ready.pop();
    if (static_cast<size_t>(level[j]) >= part.levels.size()) {
      part.levels.resize(static_cast<size_t>(level[j]) + 1);
    }
    part.levels[static_cast<size_t>(level[j])].push_back(j);
    const std::string& head = net.arcs()[static_cast<size_t>(j)].head;
    for (int k : net.outgoing(head)) {
      level[k] = std::max(level[k], level[j] + 1);
      if (--pending[k] == 0) ready.push(k);
    }
  }
  for (size_t j = 0; j < n; ++j) {
    if (level[j] < 0 || pending[j] > 0) {
      // pending > 0 with level >= 0 cannot happen; keep the check symmetric.
      part.flagged.push_back(static_cast<int>(j));
    }
  }
  return part;
}

}  // namespace mtn
