#include "liesim/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "liesim/util.hpp"

namespace liesim::numerics {

namespace {

const std::complex<double> kI(0.0, 1.0);

void check_dimension(int d) {
  if (d < 2) throw std::invalid_argument("representation dimension must be at least 2");
  if (d > kMaxDimension) throw std::invalid_argument("representation dimension exceeds the dense cap");
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Kronecker product, left factor slowest.
Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single-mode operator placed at position `mode` in a product of `dims` factors.
Matrix embed(const Matrix& op, const std::vector<int>& dims, int mode) {
  Matrix out = Matrix::Identity(1, 1);
  for (size_t l = 0; l < dims.size(); ++l) {
    if (static_cast<int>(l) == mode)
      out = kron(out, op);
    else
      out = kron(out, Matrix::Identity(dims[l], dims[l]));
  }
  return out;
}

void fock_ladders(int d, Matrix& x, Matrix& p) {
  x = Matrix::Zero(d, d);
  p = Matrix::Zero(d, d);
  for (int m = 0; m + 1 < d; ++m) {
    const double c = std::sqrt((m + 1) / 2.0);
    x(m, m + 1) = c;
    x(m + 1, m) = c;
    p(m, m + 1) = -kI * c;
    p(m + 1, m) = kI * c;
  }
}

}  // namespace

const Matrix& TruncatedRep::matrix(const std::string& label) const {
  auto it = matrices.find(label);
  if (it == matrices.end()) throw std::invalid_argument("unknown generator label: " + label);
  return it->second;
}

void TruncatedRep::add_skew(const std::string& label, Matrix m) {
  if (m.rows() != dimension || m.cols() != dimension)
    throw std::invalid_argument("generator matrix has the wrong dimension");
  const double defect = max_abs(m + m.adjoint());
  if (defect > 1e-12 * std::max(1.0, max_abs(m)))
    throw std::invalid_argument("generator " + label + " is not skew-Hermitian");
  if (!matrices.emplace(label, std::move(m)).second)
    throw std::invalid_argument("duplicate generator label: " + label);
}

void TruncatedRep::add_hermitian_aux(const std::string& label, Matrix m) {
  if (m.rows() != dimension || m.cols() != dimension)
    throw std::invalid_argument("operator matrix has the wrong dimension");
  const double defect = max_abs(m - m.adjoint());
  if (defect > 1e-12 * std::max(1.0, max_abs(m)))
    throw std::invalid_argument("operator " + label + " is not Hermitian");
  if (!matrices.emplace(label, std::move(m)).second)
    throw std::invalid_argument("duplicate generator label: " + label);
  hermitian_aux.insert(label);
}

std::vector<char> boundary_mask_for(const std::vector<int>& mode_dims, int band) {
  if (mode_dims.empty()) throw std::invalid_argument("boundary mask needs at least one mode");
  if (band < 0) throw std::invalid_argument("boundary band must be nonnegative");
  std::int64_t total = 1;
  for (int d : mode_dims) {
    if (d < 1) throw std::invalid_argument("mode dimensions must be positive");
    total *= d;
    if (total > kMaxDimension) throw std::invalid_argument("product dimension exceeds the dense cap");
  }
  std::vector<char> mask(static_cast<size_t>(total), 0);
  for (std::int64_t i = 0; i < total; ++i) {
    std::int64_t rest = i;
    for (size_t l = mode_dims.size(); l-- > 0;) {
      const int level = static_cast<int>(rest % mode_dims[l]);
      rest /= mode_dims[l];
      if (level >= mode_dims[l] - band) {
        mask[static_cast<size_t>(i)] = 1;
        break;
      }
    }
  }
  return mask;
}

TruncatedRep fock_rep(int D, const FockOps& ops) {
  check_dimension(D);
  Matrix x, p;
  fock_ladders(D, x, p);

  TruncatedRep rep;
  rep.dimension = D;
  rep.mode_dims = {D};
  int band = 0;
  if (ops.x) {
    rep.add_hermitian_aux("x", x);
    band = std::max(band, 1);
  }
  if (ops.p) {
    rep.add_hermitian_aux("p", p);
    band = std::max(band, 1);
  }
  if (ops.x2) {
    Matrix x2 = x * x;
    rep.add_skew("i*x2", kI * x2);
    rep.add_hermitian_aux("x2", std::move(x2));
    band = std::max(band, 2);
  }
  if (ops.p2) {
    Matrix p2 = p * p;
    rep.add_skew("i*p2", kI * p2);
    rep.add_hermitian_aux("p2", std::move(p2));
    band = std::max(band, 2);
  }
  if (ops.xp) {
    Matrix xp = x * p + p * x;
    rep.add_skew("i*{x,p}", kI * xp);
    rep.add_hermitian_aux("{x,p}", std::move(xp));
    band = std::max(band, 2);
  }
  if (ops.xq_power != 0) {
    const int q = ops.xq_power;
    if (q < 1 || q > 16) throw std::invalid_argument("x power out of range");
    Matrix xq = Matrix::Identity(D, D);
    for (int i = 0; i < q; ++i) xq = xq * x;
    rep.add_skew("i*x^" + std::to_string(q), kI * xq);
    rep.add_hermitian_aux("x^" + std::to_string(q), std::move(xq));
    band = std::max(band, q);
  }
  rep.boundary_band = band;
  rep.boundary_mask = boundary_mask_for(rep.mode_dims, band);
  return rep;
}

TruncatedRep spin_rep(double J) {
  const double two_j = 2.0 * J;
  if (!(J >= 0.0) || std::fabs(two_j - std::round(two_j)) > 1e-9)
    throw std::invalid_argument("spin J must be a nonnegative half-integer");
  const int N = static_cast<int>(std::llround(two_j)) + 1;
  check_dimension(N);

  Matrix jp = Matrix::Zero(N, N);
  for (int i = 1; i < N; ++i) jp(i - 1, i) = std::sqrt(i * (two_j - i + 1.0));
  const Matrix jm = jp.adjoint();
  Matrix jz = Matrix::Zero(N, N);
  for (int i = 0; i < N; ++i) jz(i, i) = J - i;

  TruncatedRep rep;
  rep.dimension = N;
  rep.mode_dims = {N};
  rep.boundary_band = 0;
  rep.boundary_mask.assign(static_cast<size_t>(N), 0);
  rep.add_hermitian_aux("Jx", (jp + jm) / 2.0);
  rep.add_hermitian_aux("Jy", -kI / 2.0 * (jp - jm));
  rep.add_hermitian_aux("Jz", std::move(jz));
  return rep;
}

SplitSystem qho_split(int D) {
  SplitSystem sys;
  FockOps ops;
  ops.x2 = ops.p2 = ops.xp = true;
  sys.rep = fock_rep(D, ops);
  sys.rep.add_skew("-i*x2/2", -0.5 * kI * sys.rep.matrix("x2"));
  sys.rep.add_skew("-i*p2/2", -0.5 * kI * sys.rep.matrix("p2"));
  // "i*{x,p}" is already present as the quadratic's skew companion
  sys.x_labels = {"-i*p2/2", "-i*x2/2"};
  sys.constants = algebra::sp2().rescaled({-0.5, -0.5, 1.0},
                                          {"-i*x2/2", "-i*p2/2", "i*{x,p}"});
  return sys;
}

SplitSystem spin_split(double J) {
  SplitSystem sys;
  sys.rep = spin_rep(J);
  sys.rep.add_skew("-i*Jx", -kI * sys.rep.matrix("Jx"));
  sys.rep.add_skew("-i*Jy", -kI * sys.rep.matrix("Jy"));
  sys.rep.add_skew("-i*Jz", -kI * sys.rep.matrix("Jz"));
  sys.x_labels = {"-i*Jx", "-i*Jy"};
  sys.constants = algebra::su2().rescaled({-1.0, -1.0, -1.0},
                                          {"-i*Jx", "-i*Jy", "-i*Jz"});
  return sys;
}

SplitSystem anharmonic_split(int D, int q) {
  if (q <= 2) throw std::invalid_argument("anharmonic split needs q > 2");
  SplitSystem sys;
  FockOps ops;
  ops.p2 = true;
  ops.xq_power = q;
  sys.rep = fock_rep(D, ops);
  const std::string xq = "x^" + std::to_string(q);
  sys.rep.add_skew("-i*p2/2", -0.5 * kI * sys.rep.matrix("p2"));
  sys.rep.add_skew("-i*" + xq + "/2", -0.5 * kI * sys.rep.matrix(xq));
  sys.x_labels = {"-i*p2/2", "-i*" + xq + "/2"};
  return sys;
}

SplitSystem coupled_qho_split(int M, int D_mode) {
  if (M < 1 || M > 7) throw std::invalid_argument("coupled split: mode count out of range");
  if (D_mode < 2) throw std::invalid_argument("coupled split: per-mode dimension too small");
  std::int64_t total = 1;
  for (int l = 0; l < M; ++l) {
    total *= D_mode;
    if (total > kMaxDimension)
      throw std::invalid_argument("coupled split: product dimension exceeds the dense cap");
  }

  Matrix x1, p1;
  fock_ladders(D_mode, x1, p1);
  const std::vector<int> dims(static_cast<size_t>(M), D_mode);
  std::vector<Matrix> xs, ps;
  for (int l = 0; l < M; ++l) {
    xs.push_back(embed(x1, dims, l));
    ps.push_back(embed(p1, dims, l));
  }

  SplitSystem sys;
  sys.rep.dimension = static_cast<int>(total);
  sys.rep.mode_dims = dims;
  sys.rep.boundary_band = 2;
  sys.rep.boundary_mask = boundary_mask_for(dims, 2);

  // Mirror the symplectic basis enumeration: x-pair monomials with l <= l',
  // then p pairs, then all mixed anticommutators. The operator being split,
  //   X = sum_l -i p_l^2/2 + sum_l -i x_l^2/2 + sum_{l<l'} 2i x_l x_l',
  // fixes the rescale coefficients; closure elements keep unit scale.
  std::vector<double> coeffs;
  std::vector<std::string> labels;
  char buf[64];
  auto tag = [&](const char* fmt, int a, int b) {
    std::snprintf(buf, sizeof(buf), fmt, a + 1, b + 1);
    return std::string(buf);
  };
  for (int l = 0; l < M; ++l)
    for (int lp = l; lp < M; ++lp) {
      const Matrix h = kI * (xs[l] * xs[lp]);
      if (l == lp) {
        coeffs.push_back(-0.5);
        labels.push_back(tag("-i*x%dx%d/2", l, lp));
      } else {
        coeffs.push_back(2.0);
        labels.push_back(tag("2i*x%dx%d", l, lp));
      }
      sys.rep.add_skew(labels.back(), coeffs.back() * h);
    }
  for (int l = 0; l < M; ++l)
    for (int lp = l; lp < M; ++lp) {
      const Matrix h = kI * (ps[l] * ps[lp]);
      if (l == lp) {
        coeffs.push_back(-0.5);
        labels.push_back(tag("-i*p%dp%d/2", l, lp));
      } else {
        coeffs.push_back(1.0);
        labels.push_back(tag("i*p%dp%d", l, lp));
      }
      sys.rep.add_skew(labels.back(), coeffs.back() * h);
    }
  for (int l = 0; l < M; ++l)
    for (int lp = 0; lp < M; ++lp) {
      const Matrix h = kI * (xs[l] * ps[lp] + ps[lp] * xs[l]);
      coeffs.push_back(1.0);
      labels.push_back(tag("i*{x%d,p%d}", l, lp));
      sys.rep.add_skew(labels.back(), h);
    }

  sys.constants = algebra::sp2m(M).rescaled(coeffs, labels);
  for (int l = 0; l < M; ++l) sys.x_labels.push_back(tag("-i*p%dp%d/2", l, l));
  for (int l = 0; l < M; ++l) sys.x_labels.push_back(tag("-i*x%dx%d/2", l, l));
  for (int l = 0; l < M; ++l)
    for (int lp = l + 1; lp < M; ++lp) sys.x_labels.push_back(tag("2i*x%dx%d", l, lp));
  return sys;
}

SpectralPropagator::SpectralPropagator(const Matrix& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("propagator needs a square matrix");
  const double defect = max_abs(x + x.adjoint());
  if (defect > 1e-12 * std::max(1.0, max_abs(x)))
    throw std::invalid_argument("propagator input is not skew-Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(-kI * x);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  vectors_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();
}

Vector SpectralPropagator::apply(double t, const Vector& psi) const {
  if (psi.size() != vectors_.rows()) throw std::invalid_argument("state dimension mismatch");
  Vector coeffs = vectors_.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= std::exp(kI * (t * eigenvalues_[i]));
  return vectors_ * coeffs;
}

Matrix SpectralPropagator::unitary(double t) const {
  Vector phases(eigenvalues_.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(kI * (t * eigenvalues_[i]));
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Vector exact_evolution(const Matrix& x, double t, const Vector& psi) {
  return SpectralPropagator(x).apply(t, psi);
}

Matrix sum_generators(const TruncatedRep& rep, std::span<const std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("generator sum needs at least one label");
  Matrix x = Matrix::Zero(rep.dimension, rep.dimension);
  for (const auto& label : labels) x += rep.matrix(label);
  return x;
}

ExponentialCache::ExponentialCache(const TruncatedRep& rep) : rep_(rep) {}

const ExponentialCache::Eig& ExponentialCache::eig(const std::string& label) {
  auto it = eigs_.find(label);
  if (it != eigs_.end()) return it->second;
  const Matrix& g = rep_.matrix(label);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(-kI * g);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed for " + label);
  Eig e;
  e.vectors = solver.eigenvectors();
  e.eigenvalues = solver.eigenvalues();
  return eigs_.emplace(label, std::move(e)).first->second;
}

const Matrix& ExponentialCache::exponential(const std::string& label, double duration) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto key = std::make_pair(label, std::bit_cast<std::uint64_t>(duration));
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  const Eig& e = eig(label);
  Vector phases(e.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(kI * (duration * e.eigenvalues[i]));
  auto m = std::make_unique<Matrix>(e.vectors * phases.asDiagonal() * e.vectors.adjoint());
  return *cache_.emplace(key, std::move(m)).first->second;
}

void ExponentialCache::apply_in_place(const std::string& label, double duration, Vector& psi,
                                      Vector& scratch) {
  if (rep_.dimension >= 512) {
    // two tall mat-vecs beat caching full exponentials at this size
    const Eig* e;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      e = &eig(label);
    }
    scratch.noalias() = e->vectors.adjoint() * psi;
    for (Eigen::Index i = 0; i < scratch.size(); ++i)
      scratch[i] *= std::exp(kI * (duration * e->eigenvalues[i]));
    psi.noalias() = e->vectors * scratch;
    return;
  }
  const Matrix& m = exponential(label, duration);
  scratch.noalias() = m * psi;
  psi.swap(scratch);
}

double state_leakage(const TruncatedRep& rep, const Vector& psi) {
  if (psi.size() != static_cast<Eigen::Index>(rep.boundary_mask.size()))
    throw std::invalid_argument("state dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    if (rep.boundary_mask[static_cast<size_t>(i)]) acc += std::norm(psi[i]);
  return std::sqrt(acc);
}

EvolutionResult evaluate_schedule(const TruncatedRep& rep, const suzuki::Schedule& schedule,
                                  const Vector& psi) {
  if (psi.size() != rep.dimension) throw std::invalid_argument("state dimension mismatch");
  const auto& labels = schedule.labels();
  const Matrix x = sum_generators(rep, labels);
  const Vector exact = exact_evolution(x, schedule.time(), psi);

  ExponentialCache cache(rep);
  Vector cur = psi;
  Vector scratch(rep.dimension);
  double leak = 0.0;
  const auto& steps = schedule.segment_steps();
  for (std::int64_t seg = 0; seg < schedule.segments(); ++seg) {
    for (const suzuki::Step& st : steps)
      cache.apply_in_place(labels[st.generator], st.duration, cur, scratch);
    leak = std::max(leak, state_leakage(rep, cur));
  }

  EvolutionResult result;
  result.observed_error = (exact - cur).norm();
  result.leakage = leak;
  result.final_state = std::move(cur);
  return result;
}

namespace {

using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;

struct LongEig {
  LMatrix vectors;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> eigenvalues;
};

LongEig long_eig(const Matrix& x) {
  const std::complex<long double> mi(0.0L, -1.0L);
  LMatrix h = mi * x.cast<std::complex<long double>>();
  h = ((h + h.adjoint()) / 2.0L).eval();  // symmetrize the promoted copy
  Eigen::SelfAdjointEigenSolver<LMatrix> es(h);
  return {es.eigenvectors(), es.eigenvalues()};
}

LVector long_apply(const LongEig& eig, long double t, const LVector& psi) {
  LVector coeffs = eig.vectors.adjoint() * psi;
  const std::complex<long double> i1(0.0L, 1.0L);
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    coeffs(k) *= std::exp(i1 * t * eig.eigenvalues(k));
  return eig.vectors * coeffs;
}

}  // namespace

double schedule_defect_extended(const TruncatedRep& rep, const suzuki::Schedule& schedule,
                                const Vector& psi) {
  if (psi.size() != rep.dimension) throw std::invalid_argument("state dimension mismatch");
  const auto& labels = schedule.labels();

  LVector exact = long_apply(long_eig(sum_generators(rep, labels)),
                             static_cast<long double>(schedule.time()),
                             psi.cast<std::complex<long double>>());

  std::vector<LongEig> eigs;
  eigs.reserve(labels.size());
  for (const auto& label : labels) eigs.push_back(long_eig(rep.matrix(label)));

  LVector cur = psi.cast<std::complex<long double>>();
  for (std::int64_t n = 0; n < schedule.total_steps(); ++n) {
    const suzuki::Step st = schedule.step(n);
    cur = long_apply(eigs[st.generator], static_cast<long double>(st.duration), cur);
  }
  return static_cast<double>((exact - cur).norm());
}

Vector fock_basis_state(int D, int m) {
  if (D < 1 || m < 0 || m >= D) throw std::invalid_argument("basis level out of range");
  Vector v = Vector::Zero(D);
  v[m] = 1.0;
  return v;
}

Vector random_state_below(int D, int max_level, std::uint64_t seed) {
  if (D < 1 || max_level < 1 || max_level > D)
    throw std::invalid_argument("random state support out of range");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v = Vector::Zero(D);
  for (int i = 0; i < max_level; ++i) v[i] = std::complex<double>(dist(gen), dist(gen));
  const double n = v.norm();
  if (n == 0.0) {
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

std::vector<double> structure_residuals(const TruncatedRep& rep,
                                        const algebra::StructureConstants& sc,
                                        const std::vector<std::string>& labels, int margin) {
  const int K = sc.size();
  if (static_cast<int>(labels.size()) != K)
    throw std::invalid_argument("label count must match the algebra dimension");
  const std::vector<char> interior_mask =
      boundary_mask_for(rep.mode_dims.empty() ? std::vector<int>{rep.dimension} : rep.mode_dims,
                        margin);
  std::vector<int> interior;
  for (size_t i = 0; i < interior_mask.size(); ++i)
    if (!interior_mask[i]) interior.push_back(static_cast<int>(i));

  std::vector<double> residuals;
  residuals.reserve(static_cast<size_t>(K) * (K - 1) / 2);
  for (int a = 0; a < K; ++a)
    for (int b = a + 1; b < K; ++b) {
      const Matrix& ma = rep.matrix(labels[a]);
      const Matrix& mb = rep.matrix(labels[b]);
      Matrix c = ma * mb - mb * ma;
      for (int d = 0; d < K; ++d) {
        const double g = sc.gamma(a, b, d);
        if (g != 0.0) c -= g * rep.matrix(labels[d]);
      }
      double worst = 0.0;
      for (int i : interior)
        for (int j : interior) worst = std::max(worst, std::abs(c(i, j)));
      residuals.push_back(worst);
    }
  return residuals;
}

void write_state_csv(std::ostream& os, const Vector& v) {
  os << "index,real,imag\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << i << ',' << format_double(v[i].real()) << ',' << format_double(v[i].imag()) << '\n';
}

Vector read_state_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index", 0) != 0)
    throw std::invalid_argument("state CSV: missing header");
  std::vector<std::complex<double>> amps;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, re, im;
    if (!std::getline(row, idx, ',') || !std::getline(row, re, ',') || !std::getline(row, im))
      throw std::invalid_argument("state CSV: malformed row");
    const size_t i = std::stoul(idx);
    if (i != amps.size()) throw std::invalid_argument("state CSV: indices must be consecutive");
    amps.emplace_back(std::stod(re), std::stod(im));
  }
  if (amps.empty()) throw std::invalid_argument("state CSV: no amplitudes");
  Vector v(static_cast<Eigen::Index>(amps.size()));
  for (size_t i = 0; i < amps.size(); ++i) v[static_cast<Eigen::Index>(i)] = amps[i];
  return v;
}

void write_evolution_csv_header(std::ostream& os, bool with_hash) {
  os << "case_id,D,p,r,t,observed_error,leakage,predicted_error";
  if (with_hash) os << ",config_hash";
  os << '\n';
}

void write_evolution_csv_row(std::ostream& os, const EvolutionRow& row,
                             const std::string& config_hash) {
  os << row.case_id << ',' << row.D << ',' << row.p << ',' << row.r << ','
     << format_double(row.t) << ',' << format_double(row.observed_error) << ','
     << format_double(row.leakage) << ',' << format_double(row.predicted_error);
  if (!config_hash.empty()) os << ',' << config_hash;
  os << '\n';
}

}  // namespace liesim::numerics
