#pragma once

#include <array>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace liesim::algebra {

// Ordered list of generator labels. The first num_in_x generators form the
// operator being split; the rest close the algebra under commutation.
struct GeneratorBasis {
  std::vector<std::string> labels;
  int num_in_x = 0;

  int size() const { return static_cast<int>(labels.size()); }
  void check() const;  // throws on duplicate/empty labels or num_in_x out of range
};

struct Violation {
  enum class Kind { antisymmetry, jacobi };
  Kind kind;
  std::array<int, 4> indices;  // (k, k', k'', e); unused slots -1
  double residual;
  std::string message;
};

// Sparse real structure-constant tensor gamma^{k,k'}_{k''} for
// [h_k, h_k'] = sum_{k''} gamma^{k,k'}_{k''} h_{k''}.
//
// Entries are stored as given; the mirrored (k', k) entry is implied by
// antisymmetry when absent. Built-in constructors emit canonical k < k'
// entries only, but raw documents listing both orders are accepted so that
// inconsistent input surfaces as an antisymmetry violation instead of being
// silently resolved.
class StructureConstants {
 public:
  explicit StructureConstants(GeneratorBasis basis);

  const GeneratorBasis& basis() const { return basis_; }
  int size() const { return basis_.size(); }
  int num_in_x() const { return basis_.num_in_x; }

  void set(int k, int kp, int kpp, double gamma);
  // Resolves antisymmetry: stored (k,k') entry wins, else -gamma(k',k), else 0.
  double gamma(int k, int kp, int kpp) const;
  const std::map<std::tuple<int, int, int>, double>& entries() const { return entries_; }

  // Antisymmetry (diagonal + mirrored entries) and Jacobi checks. Residuals
  // are compared against tol scaled by the squared largest entry magnitude.
  std::vector<Violation> validate(double tol = 1e-12) const;

  // max over generator pairs of the absolute row sum sum_{k''} |gamma^{k,k'}_{k''}|.
  double beta() const;

  // Absorbs real coefficients c_k into the generators (h_k <- c_k h_k),
  // rescaling entries by c_k c_k' / c_k''. Optionally relabels.
  StructureConstants rescaled(const std::vector<double>& coeffs,
                              std::vector<std::string> new_labels = {}) const;

  // Permutes the basis: position i of the result holds old generator perm[i].
  StructureConstants reordered(const std::vector<int>& perm) const;

  // JSON document {"labels": [...], "entries": [[k, k', k'', gamma], ...]}
  // with 0-based indices into the labels array.
  static StructureConstants from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  GeneratorBasis basis_;
  std::map<std::tuple<int, int, int>, double> entries_;

  std::vector<double> resolved_dense() const;  // K^3 tensor, antisymmetry applied
};

StructureConstants abelian(int n);
StructureConstants su2();          // {i Jx, i Jy, i Jz}, unit constants
StructureConstants sp2();          // {i x^2, i p^2, i {x,p}}
StructureConstants sp2m(int m);    // all quadratic monomials in m modes, K = m(2m+1)
StructureConstants heisenberg();   // {i x, i p, i 1}

}  // namespace liesim::algebra
