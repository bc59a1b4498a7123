#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace liesim::bounds {

// Upper bounds beta_j on the norm of length-j nested commutators of the split
// generators applied to the evolved state.
//
//   finite_dim:     beta_j = beta^(j-1) y   (row-sum bound beta, generator scale y)
//   weyl:           beta_j = 2^(3(j-1)/2) (m' + d)^(d/2), d = (q-2)(j+1)/2 + 2,
//                   the kinetic-plus-x^q profile on states supported below m'
//   user_supplied:  explicit map; absent beta_j are zero (compactly supported
//                   profiles arise from nilpotent algebras)
class CommutatorNormProfile {
 public:
  enum class Source { finite_dim, weyl, user_supplied };

  static CommutatorNormProfile finite_dim(double beta, double y);
  static CommutatorNormProfile weyl(int q, double m_prime);  // rejects q outside [2, 6]
  static CommutatorNormProfile user_supplied(std::map<int, double> beta_j);

  double beta_j(int j) const;
  double log_beta_j(int j) const;  // -inf where beta_j = 0
  Source source() const { return source_; }
  // Compact CSV-safe tag, e.g. "finite_dim(beta=4;y=32)".
  std::string source_label() const;

  double finite_dim_beta() const { return beta_; }
  double finite_dim_y() const { return y_; }

 private:
  CommutatorNormProfile() = default;
  Source source_ = Source::user_supplied;
  double beta_ = 0.0, y_ = 0.0;  // finite_dim
  int q_ = 0;
  double m_prime_ = 0.0;         // weyl
  std::map<int, double> table_;  // user_supplied
};

// Tail-summed series bound on the order-2p error of one segment of length
// lambda:
//   2 N_p^2 sum_{j>=2p} lambda^(j+1) (f_j N_p)^j beta_{j+1},
//   f_j = 2 for 2p <= j < N_p,  f_j = 6 N_p / j for j >= N_p.
// Terms accumulate until j >= N_p and the consecutive-term ratio drops below
// 1/2, then a geometric tail last*ratio/(1-ratio) closes the sum. If the
// ratio condition is not met by j = 50 N_p the series is reported divergent
// (nullopt). Values saturate near DBL_MAX instead of overflowing.
std::optional<double> series_error(int p, int L, double lambda,
                                   const CommutatorNormProfile& profile);

enum class BudgetStatus { ok, divergent, invalid };

struct ErrorBudget {
  int p = 1;
  int L = 1;
  double t = 0.0;
  double epsilon = 0.0;
  std::int64_t segments = 0;        // r
  std::int64_t exponentials = 0;    // N = r * N_p, unmerged count
  double predicted_error = 0.0;     // r * series bound at lambda = t/r
  BudgetStatus status = BudgetStatus::invalid;
  std::string profile_source;
  std::string message;
};

// Smallest r >= 1 with r * series_error(p, L, t/r) <= epsilon, found by
// doubling then bisection (the certified bound is strictly decreasing in r).
// Divergence at every probed r up to the cap reports BudgetStatus::divergent.
ErrorBudget solve_segments(double t, double epsilon, int p, int L,
                           const CommutatorNormProfile& profile);

// Closed-form segment count for the finite-dimensional profile:
//   r = ceil(5^(p+2) L^(1+1/p) beta y^(1/2p) t^(1+1/2p) / epsilon^(1/2p)),
// valid when y t >= epsilon and beta > 0; the reported predicted_error is the
// geometric-series value r (N_p y / beta)(6 lambda N_p beta)^(2p+1)/(1 - 6 lambda N_p beta).
ErrorBudget closed_form_segments(double t, double epsilon, int p, int L,
                                 double beta, double y);

// Exhaustive scan over p in [1, p_max]; minimal N wins, ties break toward
// smaller p. Returns the winning budget (status divergent if no p converges).
ErrorBudget optimal_p(double t, double epsilon, int L,
                      const CommutatorNormProfile& profile, int p_max);

// Grid-free estimate sqrt(log(m' t / epsilon) / log 5), reported alongside
// the scan for comparison.
double optimal_p_heuristic(double m_prime, double t, double epsilon);

// Support cutoff heuristic m' = c m^(q/2) for the x^q oscillator started in
// Fock level m; q must be even. Flagged as a heuristic: callers should check
// reported leakage rather than trust the constant.
std::int64_t qho_support_heuristic(int q, int m, int c = 10);

// Ladder (row/column sum) bound on || A phi || over states supported below
// m' for A in {x^2, p^2, {x,p}}: every restricted column sum stays below
// 2 m', so y = 2 m' certifies the harmonic-oscillator profile.
double qho_y_bound(double m_prime);
// Same construction per mode for the coupled chain; the cross anticommutator
// {x_l, p_l'} doubles the single-mode product bound: y = 4 m'.
double coupled_qho_y_bound(double m_prime);

CommutatorNormProfile qho_profile(double m_prime);        // finite_dim(4, 2 m')
CommutatorNormProfile weyl_profile(int q, double m_prime);
// Worst-case profile that ignores algebraic structure: every generator is
// treated as a bounded operator of effective norm m'^(q/2), so nested
// commutators pick up 2^j times the product of norms.
CommutatorNormProfile naive_profile(int q, double m_prime);

void write_budget_csv_header(std::ostream& os, bool with_hash);
void write_budget_csv_row(std::ostream& os, const ErrorBudget& b,
                          std::int64_t merged_exponentials,
                          const std::string& config_hash);

}  // namespace liesim::bounds
