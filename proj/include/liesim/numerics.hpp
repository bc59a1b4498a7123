#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "liesim/algebra.hpp"
#include "liesim/suzuki.hpp"

namespace liesim::numerics {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxDimension = 1024;

// Dense finite-dimensional stand-in for the generators. Stored matrices are
// skew-Hermitian to 1e-12 except building blocks (x, p, Jx, ...) flagged as
// Hermitian auxiliaries. boundary_mask marks basis states considered
// truncation-contaminated; for a single mode that is the top boundary_band
// levels, for mode products the union over modes.
struct TruncatedRep {
  int dimension = 0;
  int boundary_band = 0;
  std::vector<int> mode_dims;  // tensor factor sizes, slowest first; {dimension} if single mode
  std::vector<char> boundary_mask;
  std::map<std::string, Matrix> matrices;
  std::set<std::string> hermitian_aux;

  const Matrix& matrix(const std::string& label) const;
  bool has(const std::string& label) const { return matrices.count(label) != 0; }
  void add_skew(const std::string& label, Matrix m);        // checks A^dag = -A
  void add_hermitian_aux(const std::string& label, Matrix m);
};

// Mask marking, in each tensor factor, the top `band` levels as contaminated;
// the product-space mask is the union over factors.
std::vector<char> boundary_mask_for(const std::vector<int>& mode_dims, int band);

struct FockOps {
  bool x = false, p = false, x2 = false, p2 = false, xp = false;
  int xq_power = 0;  // 0 = none
};

// Fock-basis truncation at dimension D. Powers are products of the truncated
// x and p, not truncations of the exact powers, so truncation artifacts stay
// in the boundary band. Quadratics also get skew companions i*<op>.
TruncatedRep fock_rep(int D, const FockOps& ops);

// Exact (2J+1)-dimensional angular momentum triple; boundary_band = 0.
TruncatedRep spin_rep(double J);

// A split system bundles the rep whose labels the schedule references with
// the structure constants of the (rescaled) generator basis, when one exists.
struct SplitSystem {
  TruncatedRep rep;
  std::optional<algebra::StructureConstants> constants;
  std::vector<std::string> x_labels;  // the L generators of the split
};

SplitSystem qho_split(int D);                  // X = -i x^2/2 - i p^2/2
SplitSystem spin_split(double J);              // X = -i Jx - i Jy
SplitSystem anharmonic_split(int D, int q);    // X = -i p^2/2 - i x^q/2 (no finite algebra)
SplitSystem coupled_qho_split(int M, int D_mode);  // chain with -x_l x_l' couplings

// e^{tX} for skew-Hermitian X via the spectral decomposition of the Hermitian
// matrix -iX. Construction rejects inputs farther than 1e-12 from skew.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Matrix& x);
  Vector apply(double t, const Vector& psi) const;
  Matrix unitary(double t) const;

 private:
  Matrix vectors_;
  Eigen::VectorXd eigenvalues_;
};

Vector exact_evolution(const Matrix& x, double t, const Vector& psi);
Matrix sum_generators(const TruncatedRep& rep, std::span<const std::string> labels);

// Per-generator exponential cache keyed by (label, duration). Eigen
// decompositions happen once per label; concurrent lookups are serialized, so
// insert-or-get is safe from worker threads.
class ExponentialCache {
 public:
  explicit ExponentialCache(const TruncatedRep& rep);
  const Matrix& exponential(const std::string& label, double duration);
  void apply_in_place(const std::string& label, double duration, Vector& psi,
                      Vector& scratch);

 private:
  struct Eig {
    Matrix vectors;
    Eigen::VectorXd eigenvalues;
  };
  const Eig& eig(const std::string& label);
  const TruncatedRep& rep_;
  std::map<std::string, Eig> eigs_;
  std::map<std::pair<std::string, std::uint64_t>, std::unique_ptr<Matrix>> cache_;
  std::mutex mutex_;
};

struct EvolutionResult {
  Vector final_state;
  double observed_error = 0.0;  // ||(U - W) psi||
  double leakage = 0.0;         // max boundary-band weight at segment boundaries
};

// Applies the schedule right to left (step 1 first) to psi, recording leakage
// at every segment boundary, and compares against the spectral evolution of
// the summed schedule generators over the same total time.
EvolutionResult evaluate_schedule(const TruncatedRep& rep,
                                  const suzuki::Schedule& schedule,
                                  const Vector& psi);

// ||(e^{tX} - W) psi|| recomputed in 80-bit arithmetic. Double evaluation
// floors near n * eps (~4e-14 at D = 64), which buries the true defect of
// high-order schedules at small lambda; order-verification sweeps need the
// extra headroom. Intended for small dimensions and short schedules.
double schedule_defect_extended(const TruncatedRep& rep,
                                const suzuki::Schedule& schedule,
                                const Vector& psi);

double state_leakage(const TruncatedRep& rep, const Vector& psi);

Vector fock_basis_state(int D, int m);
// Deterministic pseudo-random unit vector supported on levels < max_level.
Vector random_state_below(int D, int max_level, std::uint64_t seed);

// Residuals of P([A_k, A_k'] - sum gamma A_k'') P on the interior projector
// P that drops `margin` top states (per mode, via the boundary mask scaled up).
// Returns max-entry residuals per checked pair.
std::vector<double> structure_residuals(const TruncatedRep& rep,
                                        const algebra::StructureConstants& sc,
                                        const std::vector<std::string>& labels,
                                        int margin);

// State CSV: header "index,real,imag", one row per amplitude.
void write_state_csv(std::ostream& os, const Vector& v);
Vector read_state_csv(std::istream& is);

struct EvolutionRow {
  std::string case_id;
  int D = 0;
  int p = 1;
  std::int64_t r = 0;
  double t = 0.0;
  double observed_error = 0.0;
  double leakage = 0.0;
  double predicted_error = 0.0;
};

void write_evolution_csv_header(std::ostream& os, bool with_hash);
void write_evolution_csv_row(std::ostream& os, const EvolutionRow& row,
                             const std::string& config_hash);

}  // namespace liesim::numerics
