// Command-line front end over the C interface.
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skorohod/skorohod.h"

namespace {

enum Exit { kOk = 0, kOther = 1, kParse = 2, kCapacity = 3, kValidation = 4 };

int exit_for(skh_status s) {
  switch (s) {
    case SKH_OK:
      return kOk;
    case SKH_ERR_PARSE:
      return kParse;
    case SKH_ERR_CAPACITY:
      return kCapacity;
    default:
      return kOther;
  }
}

int fail(skh_status s) {
  std::fprintf(stderr, "error (%s): %s\n", skh_status_name(s), skh_last_error());
  return exit_for(s);
}

struct Source {
  std::string spec;
  std::string builtin;
  int truncation = 0;
};

void add_source(CLI::App* cmd, Source& src) {
  auto* spec = cmd->add_option("--spec", src.spec, "problem file");
  auto* builtin = cmd->add_option("--builtin", src.builtin, "bundled integrand")
                      ->check(CLI::IsMember({"square", "linear_drift", "wick_square_terminal", "sine", "tau_linear"}));
  spec->excludes(builtin);
  cmd->add_option("--truncation", src.truncation, "truncation degree M for truncated expansions (default 9)")
      ->check(CLI::Range(1, 12));
}

// Owns a problem handle for the duration of a command.
class Problem {
 public:
  ~Problem() { skh_problem_free(p_); }
  skh_status load(const Source& src) {
    if (src.spec.empty() && src.builtin.empty()) {
      std::fprintf(stderr, "error: one of --spec or --builtin is required\n");
      return SKH_ERR_PARSE;
    }
    return src.spec.empty() ? skh_problem_from_builtin(src.builtin.c_str(), src.truncation, &p_)
                            : skh_problem_from_file(src.spec.c_str(), src.truncation, &p_);
  }
  const skh_problem* get() const { return p_; }

 private:
  skh_problem* p_ = nullptr;
};

int load_or_fail(Problem& p, const Source& src) {
  const skh_status s = p.load(src);
  if (s == SKH_OK) return kOk;
  if (src.spec.empty() && src.builtin.empty()) return kParse;
  return fail(s);
}

void print_tail(const skh_problem* p) {
  skh_problem_info info{};
  if (skh_problem_describe(p, &info) == SKH_OK && info.truncated) {
    std::printf("truncation degree %d, drift tail bound %.3e, bound on |C - C_M| %.3e\n", info.max_degree,
                info.drift_tail_bound, info.constant_tail);
  }
}

int cmd_constant(const Source& src) {
  Problem p;
  if (int rc = load_or_fail(p, src)) return rc;
  double c = 0.0;
  double energy = 0.0;
  if (skh_status s = skh_constant(p.get(), &c, &energy); s != SKH_OK) return fail(s);
  std::printf("C = %.9g\n", c);
  std::printf("int E[(L f)^2] ds = %.9g\n", energy);
  print_tail(p.get());
  return kOk;
}

int cmd_rate(const Source& src, const std::vector<int>& ns, std::int64_t paths, std::uint64_t seed, int fine,
             int workers, const std::string& out) {
  Problem p;
  if (int rc = load_or_fail(p, src)) return rc;
  skh_rate_config cfg{ns.data(), ns.size(), paths, seed, fine, SKH_TRAPEZOID, workers};
  skh_report* report = nullptr;
  if (skh_status s = skh_rate_study(p.get(), &cfg, &report); s != SKH_OK) return fail(s);
  skh_status s = SKH_OK;
  if (out.empty() || out == "-") {
    char* csv = nullptr;
    s = skh_report_csv(report, &csv);
    if (s == SKH_OK) std::fputs(csv, stdout);
    skh_string_free(csv);
  } else {
    s = skh_report_write_csv(report, out.c_str());
    if (s == SKH_OK) {
      double c = 0.0;
      double slope = 0.0;
      int fitted = 0;
      skh_report_summary(report, &c, &slope, &fitted);
      std::printf("wrote %zu rows to %s; C = %.9g", skh_report_row_count(report), out.c_str(), c);
      if (fitted) {
        std::printf(", slope = %.4f\n", slope);
      } else {
        std::printf(", no slope (exact integrand)\n");
      }
      print_tail(p.get());
    }
  }
  skh_report_free(report);
  return s == SKH_OK ? kOk : fail(s);
}

int cmd_exact(const Source& src, std::uint64_t seed) {
  Problem p;
  if (int rc = load_or_fail(p, src)) return rc;
  skh_exact_verdict v{};
  if (skh_status s = skh_exact_check(p.get(), seed, &v); s != SKH_OK) return fail(s);
  auto yn = [](int b) { return b ? "yes" : "no"; };
  std::printf("constant coefficients: %s\n", yn(v.constant_coefficients));
  std::printf("L f vanishes:          %s\n", yn(v.drift_vanishes));
  std::printf("Monte Carlo e_4 = %.3e: %s\n", v.e4_hat, yn(v.mc_exact));
  std::printf("exact: %s/%s/%s\n", yn(v.constant_coefficients), yn(v.drift_vanishes), yn(v.mc_exact));
  if (!v.agree) {
    std::fprintf(stderr, "error: the three verdicts disagree\n");
    return kValidation;
  }
  return kOk;
}

int cmd_validate(std::uint64_t seed, bool fault) {
  skh_validation* v = nullptr;
  if (skh_status s = skh_validate(seed, fault ? SKH_VALIDATE_CORRUPT_COV_LIN : 0u, &v); s != SKH_OK) return fail(s);
  for (size_t i = 0; i < skh_validation_group_count(v); ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    skh_validation_group(v, i, &name, &passed, &detail);
    std::printf("%s %-14s %s\n", passed ? "PASS" : "FAIL", name, detail);
  }
  const int ok = skh_validation_passed(v);
  skh_validation_free(v);
  return ok ? kOk : kValidation;
}

int cmd_export(const Source& src, const std::string& out) {
  Problem p;
  if (int rc = load_or_fail(p, src)) return rc;
  char* text = nullptr;
  if (skh_status s = skh_problem_serialize(p.get(), &text); s != SKH_OK) return fail(s);
  int rc = kOk;
  if (out.empty() || out == "-") {
    std::fputs(text, stdout);
  } else if (std::FILE* f = std::fopen(out.c_str(), "wb")) {
    std::fputs(text, f);
    std::fclose(f);
  } else {
    std::fprintf(stderr, "error: cannot write '%s'\n", out.c_str());
    rc = kOther;
  }
  skh_string_free(text);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skorohod integrals from chaos expansions: rate constants, Monte Carlo error studies, checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(skh_version()));

  Source src;
  std::vector<int> ns{4, 8, 16, 32};
  std::int64_t paths = 100000;
  std::uint64_t seed = 1;
  int fine = 64;
  int workers = 1;
  std::string out;
  bool fault = false;

  auto* constant = app.add_subcommand("constant", "print the rate constant C");
  add_source(constant, src);

  auto* rate = app.add_subcommand("rate", "Monte Carlo rate study, CSV output");
  add_source(rate, src);
  rate->add_option("--n", ns, "coarse resolutions, ascending")->delimiter(',')->check(CLI::PositiveNumber);
  rate->add_option("--paths", paths, "paths per n")->check(CLI::Range(std::int64_t{100}, std::int64_t{1} << 40));
  rate->add_option("--seed", seed, "base seed");
  rate->add_option("--fine-factor", fine, "fine cells per coarse cell")->check(CLI::Range(2, 1 << 16));
  rate->add_option("--workers", workers, "worker threads (does not change results)")->check(CLI::Range(1, 1024));
  rate->add_option("--out", out, "CSV file (default stdout)");

  auto* exact = app.add_subcommand("exact-check", "exact-simulation verdicts");
  add_source(exact, src);
  exact->add_option("--seed", seed, "seed for the Monte Carlo verdict");

  auto* validate = app.add_subcommand("validate", "run the self-validation suite");
  validate->add_option("--seed", seed, "seed");
  validate->add_flag("--inject-fault", fault, "corrupt cov_lin to exercise the suite")->group("");

  auto* exp = app.add_subcommand("export", "write the canonical problem document");
  add_source(exp, src);
  exp->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  if (*constant) return cmd_constant(src);
  if (*rate) return cmd_rate(src, ns, paths, seed, fine, workers, out);
  if (*exact) return cmd_exact(src, seed);
  if (*validate) return cmd_validate(seed, fault);
  if (*exp) return cmd_export(src, out);
  return kOther;
}
