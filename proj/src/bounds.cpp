#include "liesim/bounds.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "liesim/suzuki.hpp"
#include "liesim/util.hpp"

namespace liesim::bounds {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kSegmentCap = std::int64_t{1} << 50;

double saturate(double v) { return std::min(v, DBL_MAX); }

// exp with saturation instead of overflow to inf
double exp_sat(double log_v) {
  if (log_v >= 709.0) return DBL_MAX;
  return std::exp(log_v);
}

std::int64_t checked_total(std::int64_t r, std::int64_t per_segment) {
  if (r > std::numeric_limits<std::int64_t>::max() / per_segment)
    return std::numeric_limits<std::int64_t>::max();
  return r * per_segment;
}

}  // namespace

CommutatorNormProfile CommutatorNormProfile::finite_dim(double beta, double y) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("finite_dim profile: beta must be finite and nonnegative");
  if (!(y >= 0.0) || !std::isfinite(y))
    throw std::invalid_argument("finite_dim profile: y must be finite and nonnegative");
  CommutatorNormProfile p;
  p.source_ = Source::finite_dim;
  p.beta_ = beta;
  p.y_ = y;
  return p;
}

CommutatorNormProfile CommutatorNormProfile::weyl(int q, double m_prime) {
  if (q < 2 || q > 6) throw std::invalid_argument("weyl profile: q must lie in [2, 6]");
  if (!(m_prime > 0.0) || !std::isfinite(m_prime))
    throw std::invalid_argument("weyl profile: support cutoff must be positive");
  CommutatorNormProfile p;
  p.source_ = Source::weyl;
  p.q_ = q;
  p.m_prime_ = m_prime;
  return p;
}

CommutatorNormProfile CommutatorNormProfile::user_supplied(std::map<int, double> beta_j) {
  for (const auto& [j, v] : beta_j) {
    if (j < 1) throw std::invalid_argument("user profile: indices start at 1");
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("user profile: entries must be finite and nonnegative");
  }
  CommutatorNormProfile p;
  p.source_ = Source::user_supplied;
  p.table_ = std::move(beta_j);
  return p;
}

double CommutatorNormProfile::log_beta_j(int j) const {
  if (j < 1) throw std::invalid_argument("beta_j: index starts at 1");
  switch (source_) {
    case Source::finite_dim: {
      if (y_ == 0.0) return kNegInf;
      if (beta_ == 0.0) return j == 1 ? std::log(y_) : kNegInf;
      return (j - 1) * std::log(beta_) + std::log(y_);
    }
    case Source::weyl: {
      const double d = (q_ - 2) * (j + 1) / 2.0 + 2.0;
      return 1.5 * (j - 1) * std::numbers::ln2 + 0.5 * d * std::log(m_prime_ + d);
    }
    case Source::user_supplied: {
      auto it = table_.find(j);
      if (it == table_.end() || it->second == 0.0) return kNegInf;
      return std::log(it->second);
    }
  }
  return kNegInf;
}

double CommutatorNormProfile::beta_j(int j) const { return exp_sat(log_beta_j(j)); }

std::string CommutatorNormProfile::source_label() const {
  std::string s;
  switch (source_) {
    case Source::finite_dim:
      s = "finite_dim(beta=" + format_double(beta_) + ";y=" + format_double(y_) + ")";
      break;
    case Source::weyl:
      s = "weyl(q=" + std::to_string(q_) + ";m_prime=" + format_double(m_prime_) + ")";
      break;
    case Source::user_supplied:
      s = "user_supplied(" + std::to_string(table_.size()) + " entries)";
      break;
  }
  return s;
}

std::optional<double> series_error(int p, int L, double lambda,
                                   const CommutatorNormProfile& profile) {
  const std::int64_t np = suzuki::exponentials_per_segment(p, L);
  lambda = std::fabs(lambda);
  if (lambda == 0.0) return 0.0;

  const double log_lambda = std::log(lambda);
  const double log_np = std::log(static_cast<double>(np));
  const double log_prefactor = std::numbers::ln2 + 2.0 * log_np;
  const std::int64_t j_cap = 50 * np;

  double sum = 0.0;
  double prev_log_term = kNegInf;
  for (std::int64_t j = 2 * p; j <= j_cap; ++j) {
    const double log_fj =
        j < np ? std::numbers::ln2 : std::log(6.0 * static_cast<double>(np) / static_cast<double>(j));
    // j_cap = 100 L 5^(p-1) stays far below INT_MAX for every admissible p, L
    const double log_term = log_prefactor + (j + 1) * log_lambda + j * (log_fj + log_np) +
                            profile.log_beta_j(static_cast<int>(j + 1));
    sum = saturate(sum + exp_sat(log_term));

    if (j > 2 * p && j >= np) {
      if (log_term == kNegInf) return sum;  // vanished tail, geometric closure is zero
      const double log_ratio = log_term - prev_log_term;
      if (log_ratio < -std::numbers::ln2) {
        const double ratio = std::exp(log_ratio);
        const double tail = exp_sat(log_term) / (1.0 - ratio) * ratio;
        return saturate(sum + tail);
      }
    }
    prev_log_term = log_term;
  }
  return std::nullopt;
}

namespace {

ErrorBudget make_invalid(int p, int L, double t, double epsilon, std::string message,
                         const std::string& source) {
  ErrorBudget b;
  b.p = p;
  b.L = L;
  b.t = t;
  b.epsilon = epsilon;
  b.status = BudgetStatus::invalid;
  b.message = std::move(message);
  b.profile_source = source;
  return b;
}

std::string check_common(double t, double epsilon, int p, int L) {
  if (!std::isfinite(t) || t < 0.0) return "time must be finite and nonnegative";
  if (!std::isfinite(epsilon) || epsilon <= 0.0) return "error budget must be positive";
  if (p < 1 || p > 8) return "half order p must lie in [1, 8]";
  if (L < 1) return "need at least one generator";
  return {};
}

}  // namespace

ErrorBudget solve_segments(double t, double epsilon, int p, int L,
                           const CommutatorNormProfile& profile) {
  if (auto msg = check_common(t, epsilon, p, L); !msg.empty())
    return make_invalid(p, L, t, epsilon, msg, profile.source_label());

  const std::int64_t np = suzuki::exponentials_per_segment(p, L);
  ErrorBudget b;
  b.p = p;
  b.L = L;
  b.t = t;
  b.epsilon = epsilon;
  b.profile_source = profile.source_label();

  // predicted error of the whole evolution at segment count r
  auto total_error = [&](std::int64_t r) -> std::optional<double> {
    auto seg = series_error(p, L, t / static_cast<double>(r), profile);
    if (!seg) return std::nullopt;
    return saturate(static_cast<double>(r) * *seg);
  };

  if (t == 0.0) {
    b.segments = 1;
    b.exponentials = np;
    b.predicted_error = 0.0;
    b.status = BudgetStatus::ok;
    return b;
  }

  // The certified total is strictly decreasing in r once the series converges,
  // and convergence itself is monotone in r, so doubling followed by bisection
  // finds the minimal admissible segment count.
  std::int64_t lo = 0;  // every r <= lo fails (diverges or overshoots epsilon)
  std::int64_t hi = -1;
  double hi_error = 0.0;
  for (std::int64_t r = 1; r <= kSegmentCap; r *= 2) {
    auto e = total_error(r);
    if (e && *e <= epsilon) {
      hi = r;
      hi_error = *e;
      break;
    }
    lo = r;
  }
  if (hi < 0) {
    b.status = BudgetStatus::divergent;
    b.segments = kSegmentCap;
    b.exponentials = checked_total(kSegmentCap, np);
    auto e = total_error(kSegmentCap);
    if (e) {
      b.predicted_error = *e;
      b.message = "segment count exceeds the solver cap";
    } else {
      b.message = "series bound diverges at every probed segment count";
    }
    return b;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    auto e = total_error(mid);
    if (e && *e <= epsilon) {
      hi = mid;
      hi_error = *e;
    } else {
      lo = mid;
    }
  }
  b.segments = hi;
  b.exponentials = checked_total(hi, np);
  b.predicted_error = hi_error;
  b.status = BudgetStatus::ok;
  return b;
}

ErrorBudget closed_form_segments(double t, double epsilon, int p, int L,
                                 double beta, double y) {
  const std::string source =
      CommutatorNormProfile::finite_dim(std::max(beta, 0.0), std::max(y, 0.0)).source_label();
  if (auto msg = check_common(t, epsilon, p, L); !msg.empty())
    return make_invalid(p, L, t, epsilon, msg, source);
  if (!(beta > 0.0) || !std::isfinite(beta))
    return make_invalid(p, L, t, epsilon, "closed form needs beta > 0", source);
  if (!(y > 0.0) || !std::isfinite(y))
    return make_invalid(p, L, t, epsilon, "closed form needs y > 0", source);
  if (y * t < epsilon)
    return make_invalid(p, L, t, epsilon, "closed form needs y t >= epsilon", source);

  const double inv2p = 1.0 / (2.0 * p);
  const double log_r = (p + 2) * std::log(5.0) + (1.0 + 1.0 / p) * std::log(static_cast<double>(L)) +
                       std::log(beta) + inv2p * std::log(y) + (1.0 + inv2p) * std::log(t) -
                       inv2p * std::log(epsilon);
  std::int64_t r;
  try {
    r = std::max<std::int64_t>(1, checked_ceil(std::exp(log_r)));
  } catch (const std::overflow_error&) {
    return make_invalid(p, L, t, epsilon, "closed-form segment count exceeds int64 range", source);
  }

  const std::int64_t np = suzuki::exponentials_per_segment(p, L);
  const double lambda = t / static_cast<double>(r);
  const double x = 6.0 * lambda * static_cast<double>(np) * beta;
  ErrorBudget b;
  b.p = p;
  b.L = L;
  b.t = t;
  b.epsilon = epsilon;
  b.profile_source = source;
  b.segments = r;
  b.exponentials = checked_total(r, np);
  if (x >= 1.0)
    return make_invalid(p, L, t, epsilon, "geometric factor is not contractive", source);
  b.predicted_error =
      saturate(static_cast<double>(r) * (static_cast<double>(np) * y / beta) *
               std::pow(x, 2 * p + 1) / (1.0 - x));
  b.status = BudgetStatus::ok;
  return b;
}

ErrorBudget optimal_p(double t, double epsilon, int L,
                      const CommutatorNormProfile& profile, int p_max) {
  if (p_max < 1 || p_max > 8)
    return make_invalid(1, L, t, epsilon, "p_max must lie in [1, 8]", profile.source_label());
  ErrorBudget best;
  bool have_best = false;
  ErrorBudget fallback;
  for (int p = 1; p <= p_max; ++p) {
    ErrorBudget b = solve_segments(t, epsilon, p, L, profile);
    if (b.status == BudgetStatus::invalid) return b;
    if (b.status != BudgetStatus::ok) {
      if (p == 1) fallback = b;
      continue;
    }
    if (!have_best || b.exponentials < best.exponentials) {
      best = b;
      have_best = true;
    }
  }
  if (have_best) return best;
  if (fallback.status == BudgetStatus::divergent) return fallback;
  fallback = make_invalid(1, L, t, epsilon, "no order converged in the scan", profile.source_label());
  fallback.status = BudgetStatus::divergent;
  return fallback;
}

double optimal_p_heuristic(double m_prime, double t, double epsilon) {
  const double arg = m_prime * t / epsilon;
  if (!(arg > 1.0)) return 1.0;
  return std::max(1.0, std::sqrt(std::log(arg) / std::log(5.0)));
}

std::int64_t qho_support_heuristic(int q, int m, int c) {
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("support heuristic needs even q >= 2");
  if (m < 0) throw std::invalid_argument("support heuristic needs a Fock level m >= 0");
  if (c < 1) throw std::invalid_argument("support heuristic needs c >= 1");
  std::int64_t pow_m = 1;
  for (int i = 0; i < q / 2; ++i) pow_m *= m;
  return std::max<std::int64_t>(1, c * pow_m);
}

double qho_y_bound(double m_prime) { return 2.0 * m_prime; }
double coupled_qho_y_bound(double m_prime) { return 4.0 * m_prime; }

CommutatorNormProfile qho_profile(double m_prime) {
  return CommutatorNormProfile::finite_dim(4.0, qho_y_bound(m_prime));
}

CommutatorNormProfile weyl_profile(int q, double m_prime) {
  return CommutatorNormProfile::weyl(q, m_prime);
}

CommutatorNormProfile naive_profile(int q, double m_prime) {
  const double scale = std::pow(m_prime, q / 2.0);
  return CommutatorNormProfile::finite_dim(2.0 * scale, scale);
}

void write_budget_csv_header(std::ostream& os, bool with_hash) {
  os << "p,L,t,epsilon,r,N_unmerged,N_merged,predicted_error,profile_source";
  if (with_hash) os << ",config_hash";
  os << '\n';
}

void write_budget_csv_row(std::ostream& os, const ErrorBudget& b,
                          std::int64_t merged_exponentials, const std::string& config_hash) {
  os << b.p << ',' << b.L << ',' << format_double(b.t) << ',' << format_double(b.epsilon) << ','
     << b.segments << ',' << b.exponentials << ',' << merged_exponentials << ','
     << format_double(b.predicted_error) << ',' << b.profile_source;
  if (!config_hash.empty()) os << ',' << config_hash;
  os << '\n';
}

}  // namespace liesim::bounds
