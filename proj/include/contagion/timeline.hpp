#pragma once

#include <cmath>
#include <cstdint>

#include "contagion/rng.hpp"

namespace contagion {

// One Poisson event stream, read strictly left to right. Arrival times are
// prefix sums of exponential draws taken at even stream positions; odd
// positions hold a thinning coin per arrival. Because draws are pure
// functions of (key, index), two cursors over the same key always see the
// same arrival times regardless of when or where they read them — this is
// what makes coupled and restricted simulations exact.
class ArrivalCursor {
 public:
  ArrivalCursor() = default;
  ArrivalCursor(std::uint64_t key, double rate) : key_(key), rate_(rate) {
    t_ = draw(0);
  }

  double time() const { return t_; }
  double coin() const { return stream_unit(key_, 2 * i_ + 1); }

  void consume() {
    ++i_;
    t_ += draw(i_);
  }

  void advance_past(double s) {
    while (t_ <= s) consume();
  }

 private:
  double draw(std::uint64_t i) const {
    return -std::log(stream_unit(key_, 2 * i)) / rate_;
  }

  std::uint64_t key_ = 0;
  double rate_ = 1.0;
  std::uint64_t i_ = 0;
  double t_ = 0.0;
};

// Key layout for the event streams of one simulation. Streams are
// per-vertex (recoveries) and per directed adjacency slot (infections);
// base rates are fixed at timeline construction so that runs with smaller
// effective rates can be coupled by thinning against the same streams.
struct TimelineSpec {
  std::uint64_t seed = 0;
  double lambda_base = 1.0;
  double recovery_base = 1.0;

  std::uint64_t recovery_key(int vertex) const {
    return derive_key(seed, "rec", static_cast<std::uint64_t>(vertex));
  }
  std::uint64_t edge_key(int vertex, int slot) const {
    return derive_key(seed, "inf", static_cast<std::uint64_t>(vertex),
                      static_cast<std::uint64_t>(slot));
  }
  std::uint64_t root_added_key() const { return derive_key(seed, "rootadd"); }
};

}  // namespace contagion
