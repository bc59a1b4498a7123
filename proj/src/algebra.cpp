#include "liesim/algebra.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace liesim::algebra {

namespace {

constexpr int kMaxGenerators = 128;

void check_index(int k, int K, const char* what) {
  if (k < 0 || k >= K) throw std::invalid_argument(std::string(what) + " index out of range");
}

}  // namespace

void GeneratorBasis::check() const {
  if (labels.empty()) throw std::invalid_argument("generator basis is empty");
  if (size() > kMaxGenerators) throw std::invalid_argument("generator basis too large");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument("empty generator label");
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate generator label: " + l);
  }
  if (num_in_x < 1 || num_in_x > size())
    throw std::invalid_argument("num_in_x out of range");
}

StructureConstants::StructureConstants(GeneratorBasis basis) : basis_(std::move(basis)) {
  basis_.check();
}

void StructureConstants::set(int k, int kp, int kpp, double gamma) {
  const int K = size();
  check_index(k, K, "generator");
  check_index(kp, K, "generator");
  check_index(kpp, K, "generator");
  if (!std::isfinite(gamma)) throw std::invalid_argument("non-finite structure constant");
  entries_[{k, kp, kpp}] = gamma;
}

double StructureConstants::gamma(int k, int kp, int kpp) const {
  auto it = entries_.find({k, kp, kpp});
  if (it != entries_.end()) return it->second;
  it = entries_.find({kp, k, kpp});
  if (it != entries_.end()) return -it->second;
  return 0.0;
}

std::vector<double> StructureConstants::resolved_dense() const {
  const int K = size();
  std::vector<double> g(static_cast<size_t>(K) * K * K, 0.0);
  auto at = [K](int a, int b, int c) { return (static_cast<size_t>(a) * K + b) * K + c; };
  for (const auto& [key, v] : entries_) {
    auto [a, b, c] = key;
    g[at(a, b, c)] = v;
  }
  // fill implied mirrors where no explicit entry exists
  for (const auto& [key, v] : entries_) {
    auto [a, b, c] = key;
    if (entries_.find({b, a, c}) == entries_.end()) g[at(b, a, c)] = -v;
  }
  return g;
}

std::vector<Violation> StructureConstants::validate(double tol) const {
  std::vector<Violation> out;
  const int K = size();
  double gmax = 0.0;
  for (const auto& [key, v] : entries_) gmax = std::max(gmax, std::abs(v));
  const double scale = std::max(1.0, gmax);

  // antisymmetry: vanishing diagonal and consistent mirrored entries
  for (const auto& [key, v] : entries_) {
    auto [a, b, c] = key;
    if (a == b && std::abs(v) > tol * scale) {
      out.push_back({Violation::Kind::antisymmetry, {a, b, c, -1}, std::abs(v),
                     "diagonal entry gamma^{k,k} must vanish"});
      continue;
    }
    if (a < b) {
      auto it = entries_.find({b, a, c});
      if (it != entries_.end()) {
        double r = std::abs(v + it->second);
        if (r > tol * scale)
          out.push_back({Violation::Kind::antisymmetry, {a, b, c, -1}, r,
                         "mirrored entries are not antisymmetric"});
      }
    }
  }

  // Jacobi on the resolved tensor, distinct triples only (degenerate triples
  // cancel identically once antisymmetry holds)
  const auto g = resolved_dense();
  auto at = [K](int a, int b, int c) { return (static_cast<size_t>(a) * K + b) * K + c; };
  const double jtol = tol * scale * scale * std::max(1, K);
  for (int a = 0; a < K; ++a)
    for (int b = a + 1; b < K; ++b)
      for (int c = b + 1; c < K; ++c)
        for (int e = 0; e < K; ++e) {
          double res = 0.0;
          for (int d = 0; d < K; ++d) {
            res += g[at(b, c, d)] * g[at(a, d, e)];
            res += g[at(c, a, d)] * g[at(b, d, e)];
            res += g[at(a, b, d)] * g[at(c, d, e)];
          }
          if (std::abs(res) > jtol)
            out.push_back({Violation::Kind::jacobi, {a, b, c, e}, std::abs(res),
                           "Jacobi identity violated"});
        }
  return out;
}

double StructureConstants::beta() const {
  const int K = size();
  const auto g = resolved_dense();
  auto at = [K](int a, int b, int c) { return (static_cast<size_t>(a) * K + b) * K + c; };
  double best = 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      if (a == b) continue;
      double row = 0.0;
      for (int c = 0; c < K; ++c) row += std::abs(g[at(a, b, c)]);
      best = std::max(best, row);
    }
  return best;
}

StructureConstants StructureConstants::rescaled(const std::vector<double>& coeffs,
                                                std::vector<std::string> new_labels) const {
  const int K = size();
  if (static_cast<int>(coeffs.size()) != K)
    throw std::invalid_argument("rescaled: coefficient count mismatch");
  for (double c : coeffs)
    if (c == 0.0 || !std::isfinite(c))
      throw std::invalid_argument("rescaled: coefficients must be finite and nonzero");
  GeneratorBasis basis = basis_;
  if (!new_labels.empty()) {
    if (static_cast<int>(new_labels.size()) != K)
      throw std::invalid_argument("rescaled: label count mismatch");
    basis.labels = std::move(new_labels);
  }
  StructureConstants out(std::move(basis));
  for (const auto& [key, v] : entries_) {
    auto [a, b, c] = key;
    out.entries_[key] = v * coeffs[a] * coeffs[b] / coeffs[c];
  }
  return out;
}

StructureConstants StructureConstants::reordered(const std::vector<int>& perm) const {
  const int K = size();
  if (static_cast<int>(perm.size()) != K)
    throw std::invalid_argument("reordered: permutation size mismatch");
  std::vector<int> inverse(K, -1);
  for (int i = 0; i < K; ++i) {
    check_index(perm[i], K, "permutation");
    if (inverse[perm[i]] != -1) throw std::invalid_argument("reordered: not a permutation");
    inverse[perm[i]] = i;
  }
  GeneratorBasis basis = basis_;
  for (int i = 0; i < K; ++i) basis.labels[i] = basis_.labels[perm[i]];
  StructureConstants out(std::move(basis));
  for (const auto& [key, v] : entries_) {
    auto [a, b, c] = key;
    out.entries_[{inverse[a], inverse[b], inverse[c]}] = v;
  }
  return out;
}

StructureConstants StructureConstants::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("algebra JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("labels") || !doc.contains("entries"))
    throw std::invalid_argument("algebra JSON needs \"labels\" and \"entries\"");
  GeneratorBasis basis;
  for (const auto& l : doc["labels"]) {
    if (!l.is_string()) throw std::invalid_argument("algebra JSON labels must be strings");
    basis.labels.push_back(l.get<std::string>());
  }
  basis.num_in_x = static_cast<int>(basis.labels.size());
  StructureConstants sc(std::move(basis));
  for (const auto& e : doc["entries"]) {
    if (!e.is_array() || e.size() != 4)
      throw std::invalid_argument("algebra JSON entries must be [k, k', k'', gamma]");
    int k = e[0].get<int>(), kp = e[1].get<int>(), kpp = e[2].get<int>();
    double v = e[3].get<double>();
    if (sc.entries_.count({k, kp, kpp}))
      throw std::invalid_argument("algebra JSON has a duplicate entry key");
    sc.set(k, kp, kpp, v);
  }
  return sc;
}

std::string StructureConstants::to_json_text() const {
  nlohmann::json doc;
  doc["labels"] = basis_.labels;
  auto entries = nlohmann::json::array();
  for (const auto& [key, v] : entries_) {
    auto [a, b, c] = key;
    entries.push_back({a, b, c, v});
  }
  doc["entries"] = std::move(entries);
  return doc.dump();
}

StructureConstants abelian(int n) {
  if (n < 1) throw std::invalid_argument("abelian: need at least one generator");
  GeneratorBasis basis;
  for (int i = 0; i < n; ++i) basis.labels.push_back("h" + std::to_string(i + 1));
  basis.num_in_x = n;
  return StructureConstants(std::move(basis));
}

StructureConstants su2() {
  StructureConstants sc(GeneratorBasis{{"i*Jx", "i*Jy", "i*Jz"}, 3});
  sc.set(0, 1, 2, -1.0);
  sc.set(1, 2, 0, -1.0);
  sc.set(2, 0, 1, -1.0);
  return sc;
}

StructureConstants sp2() {
  StructureConstants sc(GeneratorBasis{{"i*x2", "i*p2", "i*{x,p}"}, 2});
  sc.set(0, 1, 2, -2.0);
  sc.set(0, 2, 0, -4.0);
  sc.set(1, 2, 1, 4.0);
  return sc;
}

StructureConstants heisenberg() {
  StructureConstants sc(GeneratorBasis{{"i*x", "i*p", "i*1"}, 2});
  sc.set(0, 1, 2, -1.0);
  return sc;
}

// sp(2m) from the canonical pairs [x_l, p_l'] = i delta. Each generator is
// i/2 z^T S z for a symmetric 2m x 2m matrix S over z = (x_1..x_m, p_1..p_m);
// then [h_S, h_T] = h_R with R = T J S - S J T for the symplectic form J.
StructureConstants sp2m(int m) {
  if (m < 1 || m > 7) throw std::invalid_argument("sp2m: mode count out of range");
  const int n = 2 * m;
  struct Mono {
    int type;  // 0 = x x, 1 = p p, 2 = {x, p}
    int l, lp;
  };
  std::vector<Mono> monos;
  std::vector<std::string> labels;
  char buf[64];
  for (int l = 0; l < m; ++l)
    for (int lp = l; lp < m; ++lp) {
      monos.push_back({0, l, lp});
      std::snprintf(buf, sizeof(buf), "i*x%dx%d", l + 1, lp + 1);
      labels.emplace_back(buf);
    }
  for (int l = 0; l < m; ++l)
    for (int lp = l; lp < m; ++lp) {
      monos.push_back({1, l, lp});
      std::snprintf(buf, sizeof(buf), "i*p%dp%d", l + 1, lp + 1);
      labels.emplace_back(buf);
    }
  for (int l = 0; l < m; ++l)
    for (int lp = 0; lp < m; ++lp) {
      monos.push_back({2, l, lp});
      std::snprintf(buf, sizeof(buf), "i*{x%d,p%d}", l + 1, lp + 1);
      labels.emplace_back(buf);
    }
  const int K = static_cast<int>(monos.size());  // m(2m+1)

  auto s_matrix = [&](const Mono& mo) {
    std::vector<double> s(static_cast<size_t>(n) * n, 0.0);
    auto at = [n](int r, int c) { return static_cast<size_t>(r) * n + c; };
    if (mo.type == 0) {
      s[at(mo.l, mo.lp)] += 1.0;
      s[at(mo.lp, mo.l)] += 1.0;
    } else if (mo.type == 1) {
      s[at(m + mo.l, m + mo.lp)] += 1.0;
      s[at(m + mo.lp, m + mo.l)] += 1.0;
    } else {
      s[at(mo.l, m + mo.lp)] += 2.0;
      s[at(m + mo.lp, mo.l)] += 2.0;
    }
    return s;
  };

  // R = T J S - S J T with J = [[0, I], [-I, 0]]; (J v)_i = v_{m+i}, -v_{i-m}
  auto commute = [&](const std::vector<double>& s, const std::vector<double>& t) {
    auto at = [n](int r, int c) { return static_cast<size_t>(r) * n + c; };
    auto jrow = [&](const std::vector<double>& a, int k, int c) {
      // (J a)_{k,c}
      return k < m ? a[at(m + k, c)] : -a[at(k - m, c)];
    };
    std::vector<double> r(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          acc += t[at(i, k)] * jrow(s, k, j) - s[at(i, k)] * jrow(t, k, j);
        r[at(i, j)] = acc;
      }
    return r;
  };

  GeneratorBasis basis{std::move(labels), K};
  StructureConstants sc(std::move(basis));
  std::vector<std::vector<double>> smats;
  smats.reserve(K);
  for (const auto& mo : monos) smats.push_back(s_matrix(mo));

  auto at = [n](int r, int c) { return static_cast<size_t>(r) * n + c; };
  for (int a = 0; a < K; ++a)
    for (int b = a + 1; b < K; ++b) {
      auto r = commute(smats[a], smats[b]);
      for (int c = 0; c < K; ++c) {
        const Mono& mo = monos[c];
        double coeff = 0.0;
        if (mo.type == 0)
          coeff = mo.l == mo.lp ? r[at(mo.l, mo.l)] / 2.0 : r[at(mo.l, mo.lp)];
        else if (mo.type == 1)
          coeff = mo.l == mo.lp ? r[at(m + mo.l, m + mo.l)] / 2.0 : r[at(m + mo.l, m + mo.lp)];
        else
          coeff = r[at(mo.l, m + mo.lp)] / 2.0;
        if (coeff != 0.0) sc.set(a, b, c, coeff);
      }
    }
  return sc;
}

}  // namespace liesim::algebra
