#include "skorohod/skorohod.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "skorohod/checks.hpp"
#include "skorohod/errors.hpp"
#include "skorohod/experiment.hpp"
#include "skorohod/problem.hpp"

struct skh_problem {
  skorohod::problem::Problem p;
};

struct skh_report {
  skorohod::experiment::ErrorReport r;
};

struct skh_validation {
  std::vector<skorohod::checks::GroupResult> groups;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
skh_status guarded(Fn fn) {
  g_last_error.clear();
  try {
    fn();
    return SKH_OK;
  } catch (const skorohod::DomainError& e) {
    g_last_error = e.what();
    return SKH_ERR_DOMAIN;
  } catch (const skorohod::CapacityError& e) {
    g_last_error = e.what();
    return SKH_ERR_CAPACITY;
  } catch (const skorohod::ParseError& e) {
    g_last_error = e.what();
    return SKH_ERR_PARSE;
  } catch (const skorohod::ConsistencyError& e) {
    g_last_error = e.what();
    return SKH_ERR_CONSISTENCY;
  } catch (const skorohod::UnsupportedError& e) {
    g_last_error = e.what();
    return SKH_ERR_UNSUPPORTED;
  } catch (const skorohod::IoError& e) {
    g_last_error = e.what();
    return SKH_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SKH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SKH_ERR_INTERNAL;
  }
}

skh_status invalid(const char* what) {
  g_last_error = what;
  return SKH_ERR_INVALID_ARGUMENT;
}

int truncation_or_default(int m) { return m == 0 ? skorohod::problem::kDefaultTruncation : m; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* skh_version(void) { return "0.1.0"; }

const char* skh_last_error(void) { return g_last_error.c_str(); }

const char* skh_status_name(skh_status status) {
  switch (status) {
    case SKH_OK:
      return "ok";
    case SKH_ERR_DOMAIN:
      return "domain error";
    case SKH_ERR_CAPACITY:
      return "capacity error";
    case SKH_ERR_PARSE:
      return "parse error";
    case SKH_ERR_CONSISTENCY:
      return "consistency error";
    case SKH_ERR_UNSUPPORTED:
      return "unsupported";
    case SKH_ERR_IO:
      return "i/o error";
    case SKH_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case SKH_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

size_t skh_builtin_count(void) { return skorohod::problem::builtin_names().size(); }

const char* skh_builtin_name(size_t index) {
  const auto& names = skorohod::problem::builtin_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

skh_status skh_problem_from_builtin(const char* name, int truncation, skh_problem** out) {
  if (!name || !out) return invalid("null argument");
  return guarded([&] { *out = new skh_problem{skorohod::problem::builtin(name, truncation_or_default(truncation))}; });
}

skh_status skh_problem_from_file(const char* path, int truncation, skh_problem** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] { *out = new skh_problem{skorohod::problem::load_file(path, truncation_or_default(truncation))}; });
}

skh_status skh_problem_from_text(const char* text, int truncation, skh_problem** out) {
  if (!text || !out) return invalid("null argument");
  return guarded([&] { *out = new skh_problem{skorohod::problem::parse(text, truncation_or_default(truncation))}; });
}

void skh_problem_free(skh_problem* problem) { delete problem; }

skh_status skh_problem_describe(const skh_problem* problem, skh_problem_info* out) {
  if (!problem || !out) return invalid("null argument");
  return guarded([&] {
    const auto& u = problem->p.expansion;
    out->slots = u.slots();
    out->terms = u.terms().size();
    out->max_degree = u.max_degree();
    out->truncated = problem->p.drift_tail_bound.has_value() ? 1 : 0;
    out->drift_tail_bound = problem->p.drift_tail_bound.value_or(0.0);
    out->constant_tail = skorohod::problem::constant_tail(problem->p);
  });
}

skh_status skh_problem_serialize(const skh_problem* problem, char** out) {
  if (!problem || !out) return invalid("null argument");
  return guarded([&] { *out = dup_string(skorohod::problem::serialize(problem->p.expansion)); });
}

void skh_string_free(char* s) { std::free(s); }

int skh_problem_equal(const skh_problem* a, const skh_problem* b) {
  if (!a || !b) return 0;
  return a->p.expansion == b->p.expansion ? 1 : 0;
}

skh_status skh_constant(const skh_problem* problem, double* c, double* drift_energy) {
  if (!problem) return invalid("null argument");
  return guarded([&] {
    const auto r = skorohod::experiment::constant_C(problem->p.expansion);
    if (c) *c = r.C;
    if (drift_energy) *drift_energy = r.drift_energy;
  });
}

skh_status skh_analytic_fn2(const skh_problem* problem, int n, double* x1, double* x2) {
  if (!problem) return invalid("null argument");
  return guarded([&] {
    const auto r = skorohod::experiment::analytic_fn2(problem->p.expansion, n);
    if (x1) *x1 = r.x1;
    if (x2) *x2 = r.x2;
  });
}

skh_status skh_analytic_en2(const skh_problem* problem, int n, double* en2) {
  if (!problem || !en2) return invalid("null argument");
  return guarded([&] { *en2 = skorohod::experiment::analytic_en2(problem->p.expansion, n); });
}

skh_status skh_mc_error(const skh_problem* problem, int n, int64_t paths, uint64_t seed, int fine_factor, int workers,
                        skh_mc_result* out) {
  if (!problem || !out) return invalid("null argument");
  return guarded([&] {
    const auto r = skorohod::experiment::mc_error(
        problem->p.expansion, {n, fine_factor, skorohod::integrator::Quadrature::Trapezoid}, paths, seed, workers);
    *out = {r.paths, r.e2_hat, r.e2_stderr, r.e_hat, r.e_stderr};
  });
}

skh_status skh_nested_oracle(const skh_problem* problem, int n, int64_t outer, int64_t inner, uint64_t seed,
                             int fine_factor, int workers, skh_oracle_result* out) {
  if (!problem || !out) return invalid("null argument");
  return guarded([&] {
    const auto r = skorohod::experiment::nested_mc_oracle(problem->p.expansion, n, outer, inner, seed, fine_factor,
                                                          workers);
    *out = {r.rms_gap, r.inner_noise, r.excess, r.excess_stderr, r.z};
  });
}

skh_status skh_rate_study(const skh_problem* problem, const skh_rate_config* config, skh_report** out) {
  if (!problem || !config || !out || (!config->n_list && config->n_count > 0)) return invalid("null argument");
  return guarded([&] {
    skorohod::experiment::RateStudyConfig cfg;
    cfg.n_list.assign(config->n_list, config->n_list + config->n_count);
    cfg.paths = config->paths;
    cfg.seed = config->seed;
    cfg.fine_factor = config->fine_factor;
    cfg.quadrature = config->quadrature == SKH_SIMPSON ? skorohod::integrator::Quadrature::Simpson
                                                       : skorohod::integrator::Quadrature::Trapezoid;
    cfg.workers = config->workers;
    *out = new skh_report{skorohod::experiment::rate_study(problem->p.expansion, cfg)};
  });
}

size_t skh_report_row_count(const skh_report* report) { return report ? report->r.rows.size() : 0; }

skh_status skh_report_row_at(const skh_report* report, size_t index, skh_report_row* out) {
  if (!report || !out) return invalid("null argument");
  if (index >= report->r.rows.size()) return invalid("row index out of range");
  const auto& row = report->r.rows[index];
  *out = {row.n,           row.mc.paths,  row.mc.e_hat, row.mc.e_stderr,   row.mc.e2_hat,
          row.mc.e2_stderr, row.n_times_e, row.f_n,      row.slope_running};
  return SKH_OK;
}

skh_status skh_report_summary(const skh_report* report, double* c, double* slope, int* slope_fitted) {
  if (!report) return invalid("null argument");
  if (c) *c = report->r.C;
  if (slope) *slope = report->r.slope;
  if (slope_fitted) *slope_fitted = report->r.slope_fitted ? 1 : 0;
  return SKH_OK;
}

skh_status skh_report_csv(const skh_report* report, char** out) {
  if (!report || !out) return invalid("null argument");
  return guarded([&] {
    std::ostringstream ss;
    skorohod::experiment::write_csv(report->r, ss);
    *out = dup_string(ss.str());
  });
}

skh_status skh_report_write_csv(const skh_report* report, const char* path) {
  if (!report || !path) return invalid("null argument");
  return guarded([&] {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw skorohod::IoError(std::string("cannot open '") + path + "' for writing");
    skorohod::experiment::write_csv(report->r, f);
    f.flush();
    if (!f) throw skorohod::IoError(std::string("failed writing '") + path + "'");
  });
}

void skh_report_free(skh_report* report) { delete report; }

skh_status skh_exact_check(const skh_problem* problem, uint64_t seed, skh_exact_verdict* out) {
  if (!problem || !out) return invalid("null argument");
  return guarded([&] {
    const auto v = skorohod::checks::exact_check(problem->p.expansion, seed);
    *out = {v.constant_coefficients, v.drift_vanishes, v.mc_exact, v.e4_hat, v.agree()};
  });
}

skh_status skh_validate(uint64_t seed, unsigned flags, skh_validation** out) {
  if (!out) return invalid("null argument");
  return guarded([&] {
    skorohod::checks::ValidateOptions opt;
    opt.seed = seed;
    opt.corrupt_cov_lin = (flags & SKH_VALIDATE_CORRUPT_COV_LIN) != 0;
    *out = new skh_validation{skorohod::checks::validate(opt)};
  });
}

size_t skh_validation_group_count(const skh_validation* v) { return v ? v->groups.size() : 0; }

skh_status skh_validation_group(const skh_validation* v, size_t index, const char** name, int* passed,
                                const char** detail) {
  if (!v) return invalid("null argument");
  if (index >= v->groups.size()) return invalid("group index out of range");
  const auto& g = v->groups[index];
  if (name) *name = g.name.c_str();
  if (passed) *passed = g.passed ? 1 : 0;
  if (detail) *detail = g.detail.c_str();
  return SKH_OK;
}

int skh_validation_passed(const skh_validation* v) {
  if (!v) return 0;
  for (const auto& g : v->groups) {
    if (!g.passed) return 0;
  }
  return 1;
}

void skh_validation_free(skh_validation* v) { delete v; }

}  // extern "C"
