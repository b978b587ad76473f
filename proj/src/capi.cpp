// SPDX-License-Identifier: Apache-2.0
#include "mtn/mtn.h"

#include <cstring>
#include <new>
#include <string>

#include "mtn/errors.hpp"
#include "mtn/scenario_io.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mtn_status set_error(mtn_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
mtn_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MTN_OK;
  } catch (const mtn::ParseError& e) {
    return set_error(MTN_ERR_PARSE, e.what());
  } catch (const mtn::UnsupportedScenario& e) {
    return set_error(MTN_ERR_UNSUPPORTED, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MTN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MTN_ERR_INTERNAL, e.what());
  }
}

mtn::SolveOptions to_solve_options(const mtn_run_options* opts) {
  mtn::SolveOptions s;
  if (opts == nullptr) return s;
  switch (opts->algorithm) {
    case MTN_ALG_LEVELWISE:
      s.algorithm = mtn::Algorithm::levelwise;
      break;
    case MTN_ALG_TIMESTEPPED:
      s.algorithm = mtn::Algorithm::timestepped;
      break;
    default:
      s.algorithm = mtn::Algorithm::automatic;
  }
  if (opts->time_step > 0.0) s.time_step = opts->time_step;
  s.max_workers = opts->max_workers;
  return s;
}

}  // namespace

struct mtn_scenario {
  mtn::ScenarioFile file;
};

struct mtn_solution {
  mtn::ScenarioFile file;
  mtn::NetworkSolution solution;
  int lp_grid = 0;
};

namespace {

mtn::ReportOptions report_options(const mtn_solution* sol,
                                  const double* extra_trace_times, int n,
                                  int check_balance) {
  mtn::ReportOptions ro;
  for (int i = 0; i < n; ++i) ro.extra_trace_times.push_back(extra_trace_times[i]);
  if (check_balance == 0 || check_balance == 1) {
    ro.check_balance = check_balance == 1;
  }
  if (sol->lp_grid > 0) ro.bl.grid = sol->lp_grid;
  return ro;
}

}  // namespace

extern "C" {

void mtn_run_options_init(mtn_run_options* opts) {
  if (opts == nullptr) return;
  opts->algorithm = MTN_ALG_AUTO;
  opts->time_step = 0.0;
  opts->lp_grid = 0;
  opts->max_workers = 0;
}

const char* mtn_version(void) { return "0.1.0"; }

const char* mtn_last_error(void) { return g_last_error.c_str(); }

mtn_status mtn_scenario_load(const char* path, mtn_scenario** out) {
  if (path == nullptr || out == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&]() {
    *out = new mtn_scenario{mtn::parse_scenario_file(path)};
  });
}

mtn_status mtn_scenario_parse(const char* json_text, mtn_scenario** out) {
  if (json_text == nullptr || out == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&]() {
    *out = new mtn_scenario{mtn::parse_scenario_text(json_text)};
  });
}

mtn_status mtn_scenario_emit(const mtn_scenario* sc, char** json_out) {
  if (sc == nullptr || json_out == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() { *json_out = dup_string(mtn::emit_scenario(sc->file)); });
}

void mtn_scenario_free(mtn_scenario* sc) { delete sc; }

mtn_status mtn_solve(const mtn_scenario* sc, const mtn_run_options* opts,
                     mtn_solution** out) {
  if (sc == nullptr || out == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&]() {
    mtn::SolveOptions so = to_solve_options(opts);
    mtn::NetworkSolution sol = mtn::solve(sc->file.scenario, so);
    auto* h = new mtn_solution{sc->file, std::move(sol),
                               opts != nullptr ? opts->lp_grid : 0};
    *out = h;
  });
}

void mtn_solution_free(mtn_solution* sol) { delete sol; }

mtn_status mtn_solution_report_json(const mtn_solution* sol,
                                    const double* extra_trace_times, int n,
                                    int check_balance, char** json_out,
                                    int* checks_passed) {
  if (sol == nullptr || json_out == nullptr || (n > 0 && extra_trace_times == nullptr)) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() {
    const mtn::Report rep = mtn::build_report(
        sol->file, sol->solution,
        report_options(sol, extra_trace_times, n, check_balance));
    *json_out = dup_string(rep.json);
    if (checks_passed != nullptr) *checks_passed = rep.checks_passed ? 1 : 0;
  });
}

mtn_status mtn_solution_write_report(const mtn_solution* sol,
                                     const double* extra_trace_times, int n,
                                     int check_balance, const char* out_dir,
                                     int* checks_passed) {
  if (sol == nullptr || out_dir == nullptr || (n > 0 && extra_trace_times == nullptr)) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() {
    const mtn::Report rep = mtn::build_report(
        sol->file, sol->solution,
        report_options(sol, extra_trace_times, n, check_balance));
    mtn::write_report(rep, out_dir);
    if (checks_passed != nullptr) *checks_passed = rep.checks_passed ? 1 : 0;
  });
}

mtn_status mtn_solution_balance_defect(const mtn_solution* sol, double* defect) {
  if (sol == nullptr || defect == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() { *defect = sol->solution.ledger().defect(); });
}

mtn_status mtn_solution_weak_residual(const mtn_solution* sol, double* residual) {
  if (sol == nullptr || residual == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() { *residual = mtn::weak_residual(sol->solution); });
}

mtn_status mtn_continuity(const mtn_solution* a, const mtn_solution* b,
                          double* lhs, double* rhs) {
  if (a == nullptr || b == nullptr || lhs == nullptr || rhs == nullptr) {
    return set_error(MTN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() {
    mtn::BlOptions bl;
    if (a->lp_grid > 0) bl.grid = a->lp_grid;
    const mtn::ContinuityEstimate e =
        mtn::network_continuity(a->solution, b->solution, bl);
    *lhs = e.lhs;
    *rhs = e.rhs;
  });
}

void mtn_string_free(char* s) { delete[] s; }

}  // extern "C"
