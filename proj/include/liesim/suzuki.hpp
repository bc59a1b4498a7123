#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace liesim::suzuki {

struct Step {
  int generator = 0;  // 0-based index < L
  double duration = 0.0;
};

struct SuzukiParams {
  int half_order = 1;        // p, formula order is 2p
  int num_generators = 1;    // L
  double time = 0.0;         // t, split into `segments` equal pieces
  std::int64_t segments = 1; // r
  std::vector<std::string> labels;  // optional; defaults to h1..hL
};

// s_p = 1 / (4 - 4^(1/(2p+1)))
double suzuki_constant(int p);

// Exponentials per segment before merging: 2 L 5^(p-1).
std::int64_t exponentials_per_segment(int p, int L);

// Symmetric order-2 fragment: half steps 1..L then L..1, each lambda/2.
std::vector<Step> base_schedule(int L, double lambda);

// One order-raising pass 2p -> 2p+2: five scaled copies of the fragment,
// the middle one with the negative coefficient 1 - 4 s_p.
std::vector<Step> recurse(const std::vector<Step>& fragment, int p);

// Product-formula schedule. Steps apply right to left: step n = 1 acts first,
// matching the composition W = V_N ... V_1. All segments share one step
// pattern, stored once; flat accessors present the r * N_p step view.
class Schedule {
 public:
  Schedule(int half_order, double time, std::int64_t segments,
           std::vector<std::string> labels, std::vector<Step> segment_steps,
           bool merged);

  int half_order() const { return half_order_; }
  int order() const { return 2 * half_order_; }
  std::int64_t segments() const { return segments_; }
  double time() const { return time_; }
  double lambda() const { return lambda_; }
  int num_generators() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool merged() const { return merged_; }

  const std::vector<Step>& segment_steps() const { return segment_steps_; }
  std::int64_t steps_per_segment() const { return static_cast<std::int64_t>(segment_steps_.size()); }
  std::int64_t total_steps() const { return segments_ * steps_per_segment(); }
  Step step(std::int64_t n) const;  // flat 0-based index into the r * N_p view

  // Signed duration total per generator within one segment; equals lambda
  // for every generator of an unmerged or merged build.
  std::vector<double> segment_duration_sums() const;

 private:
  int half_order_;
  double time_;
  double lambda_;
  std::int64_t segments_;
  std::vector<std::string> labels_;
  std::vector<Step> segment_steps_;
  bool merged_;
};

// Rejects segments < 1, time < 0, half_order outside [1, 8], L < 1.
Schedule build(const SuzukiParams& params);

// Fuses runs of consecutive steps sharing a generator within each segment.
// Segment boundaries are never crossed. Idempotent; the evaluated unitary is
// unchanged since adjacent exponentials of one generator compose exactly.
Schedule merge_adjacent(const Schedule& schedule);

// Columns: segment, step, generator_label, duration. Steps are numbered from
// 1 within their segment; doubles use shortest round-trip formatting.
void write_schedule_csv(std::ostream& os, const Schedule& schedule);

}  // namespace liesim::suzuki
