#include "liesim/suzuki.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "liesim/util.hpp"

namespace liesim::suzuki {

namespace {

constexpr int kMaxHalfOrder = 8;

void check_half_order(int p) {
  if (p < 1 || p > kMaxHalfOrder)
    throw std::invalid_argument("half order p must lie in [1, 8]");
}

}  // namespace

double suzuki_constant(int p) {
  check_half_order(p);
  return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * p + 1.0)));
}

std::int64_t exponentials_per_segment(int p, int L) {
  check_half_order(p);
  if (L < 1) throw std::invalid_argument("need at least one generator");
  std::int64_t n = 2 * static_cast<std::int64_t>(L);
  for (int i = 1; i < p; ++i) n *= 5;
  return n;
}

std::vector<Step> base_schedule(int L, double lambda) {
  if (L < 1) throw std::invalid_argument("need at least one generator");
  std::vector<Step> steps;
  steps.reserve(2 * L);
  for (int k = 0; k < L; ++k) steps.push_back({k, lambda / 2.0});
  for (int k = L - 1; k >= 0; --k) steps.push_back({k, lambda / 2.0});
  return steps;
}

std::vector<Step> recurse(const std::vector<Step>& fragment, int p) {
  check_half_order(p);
  if (fragment.empty()) throw std::invalid_argument("recurse: empty fragment");
  const double s = suzuki_constant(p);
  const double scales[5] = {s, s, 1.0 - 4.0 * s, s, s};
  std::vector<Step> out;
  out.reserve(5 * fragment.size());
  for (double scale : scales)
    for (const Step& st : fragment) out.push_back({st.generator, scale * st.duration});
  return out;
}

Schedule::Schedule(int half_order, double time, std::int64_t segments,
                   std::vector<std::string> labels, std::vector<Step> segment_steps,
                   bool merged)
    : half_order_(half_order),
      time_(time),
      lambda_(time / static_cast<double>(segments)),
      segments_(segments),
      labels_(std::move(labels)),
      segment_steps_(std::move(segment_steps)),
      merged_(merged) {
  check_half_order(half_order_);
  if (segments_ < 1) throw std::invalid_argument("segment count must be positive");
  if (labels_.empty()) throw std::invalid_argument("schedule needs generator labels");
  const int L = num_generators();
  for (const Step& st : segment_steps_) {
    if (st.generator < 0 || st.generator >= L)
      throw std::invalid_argument("schedule step references an unknown generator");
    if (std::abs(st.duration) > std::abs(lambda_) * (1.0 + 1e-12) + 1e-300)
      throw std::invalid_argument("schedule step duration exceeds lambda");
  }
}

Step Schedule::step(std::int64_t n) const {
  if (n < 0 || n >= total_steps()) throw std::out_of_range("schedule step index");
  return segment_steps_[static_cast<size_t>(n % steps_per_segment())];
}

std::vector<double> Schedule::segment_duration_sums() const {
  std::vector<double> sums(num_generators(), 0.0);
  for (const Step& st : segment_steps_) sums[st.generator] += st.duration;
  return sums;
}

Schedule build(const SuzukiParams& params) {
  check_half_order(params.half_order);
  if (params.num_generators < 1) throw std::invalid_argument("need at least one generator");
  if (params.segments < 1) throw std::invalid_argument("segment count must be positive");
  if (params.time < 0.0 || !std::isfinite(params.time))
    throw std::invalid_argument("evolution time must be finite and nonnegative");

  std::vector<std::string> labels = params.labels;
  if (labels.empty()) {
    for (int k = 0; k < params.num_generators; ++k) labels.push_back("h" + std::to_string(k + 1));
  } else if (static_cast<int>(labels.size()) != params.num_generators) {
    throw std::invalid_argument("label count must match the generator count");
  }

  const double lambda = params.time / static_cast<double>(params.segments);
  std::vector<Step> fragment = base_schedule(params.num_generators, lambda);
  for (int p = 1; p < params.half_order; ++p) fragment = recurse(fragment, p);
  return Schedule(params.half_order, params.time, params.segments, std::move(labels),
                  std::move(fragment), false);
}

Schedule merge_adjacent(const Schedule& schedule) {
  std::vector<Step> merged;
  merged.reserve(schedule.segment_steps().size());
  for (const Step& st : schedule.segment_steps()) {
    if (!merged.empty() && merged.back().generator == st.generator)
      merged.back().duration += st.duration;
    else
      merged.push_back(st);
  }
  return Schedule(schedule.half_order(), schedule.time(), schedule.segments(),
                  schedule.labels(), std::move(merged), true);
}

void write_schedule_csv(std::ostream& os, const Schedule& schedule) {
  os << "segment,step,generator_label,duration\n";
  const auto& steps = schedule.segment_steps();
  for (std::int64_t seg = 1; seg <= schedule.segments(); ++seg) {
    for (size_t i = 0; i < steps.size(); ++i) {
      os << seg << ',' << (i + 1) << ',' << schedule.labels()[steps[i].generator] << ','
         << format_double(steps[i].duration) << '\n';
    }
  }
}

}  // namespace liesim::suzuki
