#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsgas/fluctuations.hpp"
#include "nlsgas/rhsolver.hpp"
#include "nlsgas/soliton.hpp"

namespace nlsgas {

// ---------------------------------------------------------------------------
// Experiment configuration: one JSON document, validated up front,
// round-tripping losslessly through to_json()/from_json().
// ---------------------------------------------------------------------------

struct DomainSpec {
  std::string kind = "disk";  // disk | rectangle
  cdouble center{0.0, 1.0};
  double radius = 0.5;
  double x1 = -1, x2 = 1, y1 = 0.5, y2 = 1.5;
  int quad1 = 24;  // radial (disk) or x (rectangle) count
  int quad2 = 64;  // angular (disk) or y (rectangle) count
  double d_min = 0.05;
};

struct InterpolantSpec {
  std::string preset = "constant";  // constant | affine | exponential
  cdouble c0{1.0, 0.0};
  cdouble c1{0.0, 0.0};
};

struct ContourSpec {
  int nodes = 128;          // per circle, power of two
  double clearance = 0.25;  // gap between domain circumradius and gamma+
};

struct MembershipSpec {
  double delta = 0.5;
  double alpha = 0.75;
};

struct ExperimentConfig {
  DomainSpec domain;
  InterpolantSpec interpolant;
  ContourSpec contour;
  MembershipSpec membership;
  std::vector<int> n_values{8, 16, 32, 64, 128};
  int trials = 2000;
  std::uint64_t base_seed = 20240901;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<SpacetimePoint> points{{0.0, 0.0}, {0.5, 0.2}};

  static ExperimentConfig defaults() { return {}; }
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;

  EigenvalueDomain build_domain() const;
  InterpolantR build_interpolant() const;
  ContourGrid build_contour() const;
  bool degenerate_interpolant() const;  // r identically zero

  // git-style SHA-1 of the canonical JSON serialization.
  std::string content_hash() const;
};

// ---------------------------------------------------------------------------
// Ensemble summaries. CSV payloads are bit-reproducible for a fixed config;
// wall-clock timings are reported separately.
// ---------------------------------------------------------------------------

struct LlnRow {
  int N = 0;
  double x = 0, t = 0;
  int trials = 0, failures = 0;
  double mean_abs_dpsi = 0, se_abs_dpsi = 0;
  double mean_abs_dmod = 0, se_abs_dmod = 0;
};

struct LlnSummary {
  std::vector<LlnRow> rows;
  std::vector<double> slope_dpsi;  // per point, log-log fit vs N
  std::vector<double> slope_dmod;
  std::vector<SpacetimePoint> points;
  bool valid = true;  // false when any (N, point) exceeds 1% failures
  double wallclock_sec = 0;
  nlohmann::json config_echo;
  std::string config_hash;
};

struct CltRow {
  int N = 0;
  double x = 0, t = 0;
  int trials = 0, failures = 0;
  // samples S1 = sqrt(N)(psi_N - psi_inf), S2 = sqrt(N)(|psi_N|^2 - |psi_inf|^2)
  cdouble emp_mean_g1{0, 0};                    // E[S1]
  double emp_mean_g2 = 0;                       // E[S2]
  double emp_var_g1_re = 0, emp_var_g1_im = 0;  // marginal variances of S1
  double emp_var_g1 = 0;                        // total: E|S1|^2 - |E S1|^2
  cdouble emp_E_sq_g1{0, 0};                    // centered E[S1^2]
  double pred_var_g1 = 0;
  cdouble pred_cov_g1{0, 0};
  double emp_var_g2 = 0, pred_var_g2 = 0;
  double se_var_g1 = 0, se_E_sq_g1_re = 0, se_E_sq_g1_im = 0, se_var_g2 = 0;
  // normality diagnostics of standardized marginals
  bool degenerate = false;
  double skew_re = 0, exkurt_re = 0, skew_im = 0, exkurt_im = 0;
  double skew_g2 = 0, exkurt_g2 = 0;
  double ks_re = 0, ks_im = 0, ks_g2 = 0, ks_critical = 0;
  // remainder U = X^{G1} - N (psi_N - psi_inf), scaled
  double mean_absU_scaled = 0, se_absU_scaled = 0;  // E|U|/sqrt(N)
  // membership frequency for B_delta^alpha
  double member_frac = 0;
};

struct CltSummary {
  std::vector<CltRow> rows;
  bool valid = true;
  double wallclock_sec = 0;
  nlohmann::json config_echo;
  std::string config_hash;
};

struct CorrSummary {
  SpacetimePoint p1, p2;
  int N = 0, trials = 0, failures = 0;
  cdouble empirical{0, 0};  // N E[(psi_N-psi_inf)(p1) conj(...)(p2)]
  double se_re = 0, se_im = 0;
  cdouble predicted{0, 0};   // correlation_limit quadrature
  double identity_gap = 0;   // |correlation_limit(p,p) - clt variance|
  bool valid = true;
  double wallclock_sec = 0;
  nlohmann::json config_echo;
  std::string config_hash;
};

struct MembershipRow {
  int N = 0;
  int trials = 0;
  int outside = 0;
  double p_out = 0, se_p = 0;
};

struct MembershipSweep {
  std::vector<MembershipRow> rows;
  double delta = 0, alpha = 0;
  double fit_c1 = 0, fit_c2 = 0;  // least squares against the 4.3-type decay
  int fit_p = 2;
};

struct CheckResult {
  std::string name;
  double value = 0;
  double tol = 0;
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// ---------------------------------------------------------------------------
// Runners.
// ---------------------------------------------------------------------------

LlnSummary run_lln(const ExperimentConfig& cfg);
CltSummary run_clt(const ExperimentConfig& cfg);
CorrSummary run_corr(const ExperimentConfig& cfg);               // uses first two points
MembershipSweep run_membership_sweep(const ExperimentConfig& cfg);
VerifyReport run_verify(const ExperimentConfig& cfg);

// CSV/JSON writers (fixed column orders documented in the README).
void write_lln(const LlnSummary& s, const std::string& out_dir);
void write_clt(const CltSummary& s, const std::string& out_dir);
void write_corr(const CorrSummary& s, const std::string& out_dir);
void write_verify(const VerifyReport& rep, const ExperimentConfig& cfg,
                  const std::string& out_dir);

// Statistics helpers shared by runners and tests.
double fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& y);
double ks_statistic(std::vector<double> standardized);
double ks_critical_001(int n);

}  // namespace nlsgas
