#include "liesim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "liesim/algebra.hpp"
#include "liesim/bounds.hpp"
#include "liesim/numerics.hpp"
#include "liesim/suzuki.hpp"
#include "liesim/util.hpp"

namespace liesim::cli {

namespace {

using nlohmann::json;

const char* case_name(Case c) {
  switch (c) {
    case Case::qho: return "qho";
    case Case::coupled_qho: return "coupled_qho";
    case Case::anharmonic: return "anharmonic";
    case Case::spin: return "spin";
    case Case::custom: return "custom";
  }
  return "?";
}

Case case_from(const std::string& s) {
  for (Case c : {Case::qho, Case::coupled_qho, Case::anharmonic, Case::spin, Case::custom})
    if (s == case_name(c)) return c;
  throw std::invalid_argument("unknown case: " + s);
}

std::int64_t saturating_mul(std::int64_t a, std::int64_t b) {
  if (a <= 0 || b <= 0) return a * b;
  if (a > std::numeric_limits<std::int64_t>::max() / b)
    return std::numeric_limits<std::int64_t>::max();
  return a * b;
}

// Shared description of the configured case: split size, schedule labels, the
// norm profile per support cutoff, and (optionally) matrices for evolution.
struct CaseContext {
  int L = 0;
  std::vector<std::string> labels;
  std::optional<numerics::SplitSystem> split;  // present when evolution is possible
  bool evolve = false;
  int row_dimension = 0;  // D column of evolution rows
  double beta = 0.0;      // finite-dim profiles
  double custom_y = 0.0;
};

CaseContext make_context(const ExperimentConfig& cfg, std::vector<std::string>& errors) {
  CaseContext ctx;
  try {
    switch (cfg.kind) {
      case Case::qho: {
        ctx.L = 2;
        ctx.labels = {"-i*p2/2", "-i*x2/2"};
        ctx.beta = 4.0;
        if (cfg.D > 0) {
          ctx.split = numerics::qho_split(cfg.D);
          ctx.evolve = true;
          ctx.row_dimension = cfg.D;
        }
        break;
      }
      case Case::anharmonic: {
        ctx.L = 2;
        ctx.labels = {"-i*p2/2", "-i*x^" + std::to_string(cfg.q) + "/2"};
        if (cfg.D > 0) {
          ctx.split = numerics::anharmonic_split(cfg.D, cfg.q);
          ctx.evolve = true;
          ctx.row_dimension = cfg.D;
        }
        break;
      }
      case Case::spin: {
        auto sys = numerics::spin_split(cfg.J);
        ctx.L = 2;
        ctx.labels = sys.x_labels;
        ctx.beta = sys.constants->beta();
        ctx.row_dimension = sys.rep.dimension;
        if (cfg.D > 0) {
          ctx.split = std::move(sys);
          ctx.evolve = true;
        }
        break;
      }
      case Case::coupled_qho: {
        // D_mode = 2 gives the same algebra when only budgets are needed
        auto sys = numerics::coupled_qho_split(cfg.M, cfg.D > 0 ? cfg.D : 2);
        ctx.L = static_cast<int>(sys.x_labels.size());
        ctx.labels = sys.x_labels;
        ctx.beta = sys.constants->beta();
        ctx.row_dimension = sys.rep.dimension;
        if (cfg.D > 0) {
          ctx.split = std::move(sys);
          ctx.evolve = true;
        }
        break;
      }
      case Case::custom: {
        std::ifstream in(cfg.algebra_file);
        if (!in) throw std::invalid_argument("cannot open algebra file: " + cfg.algebra_file);
        std::stringstream buf;
        buf << in.rdbuf();
        auto sc = algebra::StructureConstants::from_json_text(buf.str());
        for (const auto& v : sc.validate())
          errors.push_back("algebra validation: " + v.message);
        for (const auto& label : cfg.x_labels) {
          const auto& known = sc.basis().labels;
          if (std::find(known.begin(), known.end(), label) == known.end())
            errors.push_back("x_labels entry not in the algebra: " + label);
        }
        ctx.L = static_cast<int>(cfg.x_labels.size());
        ctx.labels = cfg.x_labels;
        ctx.beta = sc.beta();
        ctx.custom_y = cfg.y;
        break;
      }
    }
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  return ctx;
}

bounds::CommutatorNormProfile profile_for(const ExperimentConfig& cfg, const CaseContext& ctx,
                                          std::int64_t m_prime) {
  switch (cfg.kind) {
    case Case::qho:
      return bounds::qho_profile(static_cast<double>(m_prime));
    case Case::anharmonic:
      return bounds::weyl_profile(cfg.q, static_cast<double>(m_prime));
    case Case::coupled_qho:
      return bounds::CommutatorNormProfile::finite_dim(
          ctx.beta, bounds::coupled_qho_y_bound(static_cast<double>(m_prime)));
    case Case::spin:
      return bounds::CommutatorNormProfile::finite_dim(ctx.beta, cfg.J);
    case Case::custom:
      return bounds::CommutatorNormProfile::finite_dim(ctx.beta, ctx.custom_y);
  }
  throw std::logic_error("unreachable");
}

// Tensor product of per-mode pseudo-random states, each supported below m'.
numerics::Vector coupled_initial_state(int M, int D_mode, std::int64_t m_prime,
                                       std::uint64_t seed) {
  const int support = static_cast<int>(std::min<std::int64_t>(m_prime, D_mode));
  numerics::Vector v = numerics::random_state_below(D_mode, support, seed);
  for (int l = 1; l < M; ++l) {
    const numerics::Vector w = numerics::random_state_below(D_mode, support, seed + l);
    numerics::Vector out(v.size() * w.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      out.segment(i * w.size(), w.size()) = v[i] * w;
    v = std::move(out);
  }
  return v;
}

numerics::Vector initial_state(const ExperimentConfig& cfg, const CaseContext& ctx,
                               std::int64_t m_prime) {
  switch (cfg.kind) {
    case Case::qho:
    case Case::anharmonic:
      return numerics::random_state_below(
          cfg.D, static_cast<int>(std::min<std::int64_t>(m_prime, cfg.D)), cfg.seed);
    case Case::spin:
      return numerics::random_state_below(ctx.row_dimension, ctx.row_dimension, cfg.seed);
    case Case::coupled_qho:
      return coupled_initial_state(cfg.M, cfg.D, m_prime, cfg.seed);
    case Case::custom:
      break;
  }
  throw std::logic_error("custom case has no matrix representation");
}

bool support_covered(const ExperimentConfig& cfg, std::int64_t m_prime) {
  switch (cfg.kind) {
    case Case::qho:
    case Case::anharmonic:
    case Case::coupled_qho:
      return 2 * m_prime <= cfg.D;  // D per mode for the coupled case
    case Case::spin:
    case Case::custom:
      return true;
  }
  return false;
}

void run_jobs(int workers, size_t n, const std::function<void(size_t)>& body) {
  std::atomic<size_t> next{0};
  auto loop = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) body(i);
  };
  if (workers <= 1 || n <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(n));
  pool.reserve(static_cast<size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
}

int exit_code_for(const std::vector<std::string>& errors, int violations, int divergent) {
  if (!errors.empty()) return 1;
  if (violations > 0) return 2;
  if (divergent > 0) return 3;
  return 0;
}

std::string output_path(const ExperimentConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.output_dir) / name).generic_string();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known = {
      "case", "M", "q", "J", "t", "epsilon", "p_list", "r_list", "m_prime_list",
      "D", "seed", "output_dir", "workers", "evolution_r_cap", "algebra_file",
      "x_labels", "y"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw std::invalid_argument("unknown config key: " + item.key());

  ExperimentConfig c;
  if (j.contains("case")) c.kind = case_from(j.at("case").get<std::string>());
  if (j.contains("M")) c.M = j.at("M").get<int>();
  if (j.contains("q")) c.q = j.at("q").get<int>();
  if (j.contains("J")) c.J = j.at("J").get<double>();
  if (j.contains("t")) c.t = j.at("t").get<double>();
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("p_list")) c.p_list = j.at("p_list").get<std::vector<int>>();
  if (j.contains("r_list")) c.r_list = j.at("r_list").get<std::vector<std::int64_t>>();
  if (j.contains("m_prime_list"))
    c.m_prime_list = j.at("m_prime_list").get<std::vector<std::int64_t>>();
  if (j.contains("D")) c.D = j.at("D").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("workers")) c.workers = j.at("workers").get<int>();
  if (j.contains("evolution_r_cap")) c.evolution_r_cap = j.at("evolution_r_cap").get<std::int64_t>();
  if (j.contains("algebra_file")) c.algebra_file = j.at("algebra_file").get<std::string>();
  if (j.contains("x_labels")) c.x_labels = j.at("x_labels").get<std::vector<std::string>>();
  if (j.contains("y")) c.y = j.at("y").get<double>();
  return c;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["case"] = case_name(kind);
  j["M"] = M;
  j["q"] = q;
  j["J"] = J;
  j["t"] = t;
  j["epsilon"] = epsilon;
  j["p_list"] = p_list;
  j["r_list"] = r_list;
  j["m_prime_list"] = m_prime_list;
  j["D"] = D;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  j["evolution_r_cap"] = evolution_r_cap;
  j["algebra_file"] = algebra_file;
  j["x_labels"] = x_labels;
  j["y"] = y;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  // Execution-only fields are pinned before hashing so that the hash tags the
  // experiment content: the same sweep run with a different worker count or
  // destination directory byte-reproduces its CSVs.
  ExperimentConfig pinned = *this;
  pinned.output_dir = "out";
  pinned.workers = 1;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(pinned.to_json_text()));
  return std::string(buf);
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> e;
  if (!std::isfinite(t) || t < 0.0) e.push_back("t must be finite and nonnegative");
  if (!std::isfinite(epsilon) || epsilon <= 0.0) e.push_back("epsilon must be positive");
  if (p_list.empty()) e.push_back("p_list must not be empty");
  for (int p : p_list)
    if (p < 1 || p > 8) e.push_back("p_list entries must lie in [1, 8]");
  if (r_list.empty()) e.push_back("r_list must not be empty");
  for (std::int64_t r : r_list)
    if (r < 0) e.push_back("r_list entries must be nonnegative (0 = solved)");
  if (kind == Case::qho || kind == Case::anharmonic || kind == Case::coupled_qho) {
    if (m_prime_list.empty()) e.push_back("m_prime_list must not be empty");
    for (std::int64_t m : m_prime_list)
      if (m < 1) e.push_back("m_prime_list entries must be positive");
  }
  if (D != 0 && (D < 2 || D > numerics::kMaxDimension))
    e.push_back("D must be 0 (budgets only) or in [2, 1024]");
  if (kind == Case::coupled_qho) {
    if (M < 1 || M > 7) e.push_back("M must lie in [1, 7]");
    if (D > 0) {
      std::int64_t total = 1;
      bool ok = true;
      for (int l = 0; l < M && ok; ++l) {
        total *= D;
        if (total > numerics::kMaxDimension) ok = false;
      }
      if (!ok) e.push_back("per-mode D^M exceeds the dense dimension cap");
    }
  }
  if (kind == Case::anharmonic) {
    if (q < 2 || q > 6) e.push_back("q must lie in [2, 6]");
    if (q == 2 && D > 0) e.push_back("q = 2 evolution is the harmonic case; use case qho");
  }
  if (kind == Case::spin) {
    const double two_j = 2.0 * J;
    if (!(J >= 0.5) || std::fabs(two_j - std::round(two_j)) > 1e-9)
      e.push_back("J must be a half-integer >= 1/2");
    else if (2.0 * J + 1.0 > numerics::kMaxDimension)
      e.push_back("spin dimension 2J+1 exceeds the dense cap");
  }
  if (kind == Case::custom) {
    if (algebra_file.empty()) e.push_back("custom case needs algebra_file");
    if (x_labels.empty()) e.push_back("custom case needs x_labels");
    if (!(y > 0.0) || !std::isfinite(y)) e.push_back("custom case needs y > 0");
    std::set<std::string> seen(x_labels.begin(), x_labels.end());
    if (seen.size() != x_labels.size()) e.push_back("x_labels must be distinct");
  }
  if (workers < 1 || workers > 64) e.push_back("workers must lie in [1, 64]");
  if (evolution_r_cap < 1) e.push_back("evolution_r_cap must be positive");
  if (output_dir.empty()) e.push_back("output_dir must not be empty");
  return e;
}

RunResult run(const ExperimentConfig& config) {
  RunResult res;
  res.errors = config.validate();
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }
  CaseContext ctx = make_context(config, res.errors);
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }

  // spin and custom budgets do not depend on a support cutoff
  const bool uses_m_prime = config.kind == Case::qho || config.kind == Case::anharmonic ||
                            config.kind == Case::coupled_qho;
  const std::vector<std::int64_t> mp_values =
      uses_m_prime ? config.m_prime_list : std::vector<std::int64_t>{0};

  struct JobOut {
    bounds::ErrorBudget budget;
    std::int64_t merged = 0;
    std::vector<numerics::EvolutionRow> rows;
    int violations = 0;
    int divergent = 0;
    std::string error;
  };
  const size_t n_jobs = mp_values.size() * config.p_list.size();
  std::vector<JobOut> outs(n_jobs);

  const std::string hash = config.hash();
  run_jobs(config.workers, n_jobs, [&](size_t i) {
    JobOut& out = outs[i];
    try {
      const std::int64_t m_prime = mp_values[i / config.p_list.size()];
      const int p = config.p_list[i % config.p_list.size()];
      const auto profile = profile_for(config, ctx, m_prime);
      out.budget = bounds::solve_segments(config.t, config.epsilon, p, ctx.L, profile);

      const auto pattern =
          suzuki::merge_adjacent(suzuki::build({p, ctx.L, 1.0, 1, {}}));
      out.merged = saturating_mul(out.budget.segments, pattern.steps_per_segment());
      if (out.budget.status == bounds::BudgetStatus::invalid) {
        out.error = "budget solve rejected validated inputs: " + out.budget.message;
        return;
      }
      if (out.budget.status == bounds::BudgetStatus::divergent) out.divergent++;

      if (!ctx.evolve || !support_covered(config, m_prime)) return;
      for (std::int64_t r_entry : config.r_list) {
        std::int64_t r;
        double predicted;
        if (r_entry == 0) {
          if (out.budget.status != bounds::BudgetStatus::ok) continue;
          r = out.budget.segments;
          predicted = out.budget.predicted_error;
        } else {
          r = r_entry;
          const auto seg =
              bounds::series_error(p, ctx.L, config.t / static_cast<double>(r), profile);
          if (!seg) {
            out.divergent++;
            continue;
          }
          predicted = std::min(static_cast<double>(r) * *seg,
                               std::numeric_limits<double>::max());
        }
        if (r > config.evolution_r_cap) continue;

        const auto schedule =
            suzuki::merge_adjacent(suzuki::build({p, ctx.L, config.t, r, ctx.labels}));
        const numerics::Vector psi = initial_state(config, ctx, m_prime);
        const auto eval = numerics::evaluate_schedule(ctx.split->rep, schedule, psi);

        numerics::EvolutionRow row;
        row.case_id = std::string(case_name(config.kind)) +
                      (uses_m_prime ? "/mp=" + std::to_string(m_prime) : "") +
                      "/p=" + std::to_string(p) + "/r=" + std::to_string(r);
        row.D = ctx.row_dimension;
        row.p = p;
        row.r = r;
        row.t = config.t;
        row.observed_error = eval.observed_error;
        row.leakage = eval.leakage;
        row.predicted_error = predicted;
        if (eval.observed_error + 2.0 * eval.leakage > predicted) out.violations++;
        out.rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  for (const JobOut& out : outs) {
    if (!out.error.empty()) res.errors.push_back(out.error);
    res.violations += out.violations;
    res.divergent += out.divergent;
  }
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  const std::string budgets_path = output_path(config, "budgets.csv");
  const std::string evolution_path = output_path(config, "evolution.csv");
  std::ofstream budgets(budgets_path, std::ios::binary);
  std::ofstream evolution(evolution_path, std::ios::binary);
  if (!budgets || !evolution) {
    res.errors.push_back("cannot write outputs under " + config.output_dir);
    res.exit_code = 1;
    return res;
  }
  bounds::write_budget_csv_header(budgets, true);
  numerics::write_evolution_csv_header(evolution, true);
  for (const JobOut& out : outs) {
    bounds::write_budget_csv_row(budgets, out.budget, out.merged, hash);
    for (const auto& row : out.rows) numerics::write_evolution_csv_row(evolution, row, hash);
  }
  res.files = {budgets_path, evolution_path};
  res.exit_code = exit_code_for(res.errors, res.violations, res.divergent);
  return res;
}

RunResult compare_bounds(const ExperimentConfig& config) {
  RunResult res;
  res.errors = config.validate();
  if (config.kind != Case::anharmonic)
    res.errors.push_back("compare-bounds needs the anharmonic case");
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }

  struct Row {
    int p = 0;
    std::int64_t m_prime = 0;
    std::int64_t n_structure = 0;
    std::int64_t n_naive = 0;
    double ratio = 0.0;
    bool ok = false;
    int divergent = 0;
    std::string error;
  };
  const size_t n_jobs = config.m_prime_list.size() * config.p_list.size();
  std::vector<Row> rows(n_jobs);
  run_jobs(config.workers, n_jobs, [&](size_t i) {
    Row& row = rows[i];
    try {
      row.m_prime = config.m_prime_list[i / config.p_list.size()];
      row.p = config.p_list[i % config.p_list.size()];
      const double mp = static_cast<double>(row.m_prime);
      const auto structure = bounds::solve_segments(config.t, config.epsilon, row.p, 2,
                                                    bounds::weyl_profile(config.q, mp));
      const auto naive = bounds::solve_segments(config.t, config.epsilon, row.p, 2,
                                                bounds::naive_profile(config.q, mp));
      if (structure.status != bounds::BudgetStatus::ok ||
          naive.status != bounds::BudgetStatus::ok) {
        row.divergent = 1;
        return;
      }
      row.n_structure = structure.exponentials;
      row.n_naive = naive.exponentials;
      row.ratio = static_cast<double>(row.n_naive) / static_cast<double>(row.n_structure);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  for (const Row& row : rows) {
    if (!row.error.empty()) res.errors.push_back(row.error);
    res.divergent += row.divergent;
  }
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  const std::string path = output_path(config, "compare.csv");
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    res.errors.push_back("cannot write outputs under " + config.output_dir);
    res.exit_code = 1;
    return res;
  }
  const std::string hash = config.hash();
  os << "p,m_prime,N_structure,N_naive,ratio,config_hash\n";
  for (const Row& row : rows) {
    if (!row.ok) continue;
    os << row.p << ',' << row.m_prime << ',' << row.n_structure << ',' << row.n_naive << ','
       << format_double(row.ratio) << ',' << hash << '\n';
  }
  res.files = {path};
  res.exit_code = exit_code_for(res.errors, res.violations, res.divergent);
  return res;
}

RunResult schedule_export(const ExperimentConfig& config) {
  RunResult res;
  res.errors = config.validate();
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }
  CaseContext ctx = make_context(config, res.errors);
  if (!res.errors.empty()) {
    res.exit_code = 1;
    return res;
  }

  const int p = config.p_list.front();
  std::int64_t r = config.r_list.front();
  try {
    if (r == 0) {
      const std::int64_t mp =
          config.m_prime_list.empty() ? 0 : config.m_prime_list.front();
      const auto budget = bounds::solve_segments(config.t, config.epsilon, p, ctx.L,
                                                 profile_for(config, ctx, mp));
      if (budget.status != bounds::BudgetStatus::ok) {
        res.divergent++;
        res.exit_code = 3;
        return res;
      }
      r = budget.segments;
    }
    const auto schedule = suzuki::build({p, ctx.L, config.t, r, ctx.labels});

    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    const std::string path = output_path(config, "schedule.csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) {
      res.errors.push_back("cannot write outputs under " + config.output_dir);
      res.exit_code = 1;
      return res;
    }
    suzuki::write_schedule_csv(os, schedule);
    res.files = {path};
  } catch (const std::exception& e) {
    res.errors.emplace_back(e.what());
    res.exit_code = 1;
  }
  return res;
}

}  // namespace liesim::cli
