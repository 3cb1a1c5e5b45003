#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnet {

enum class EventKind {
  QDatagramArrival,
  LLEGenerated,
  GenerationTimerExpiry,
  AckArrival,
  LinkFailure,
  LinkRestore,
  WorkloadSwitch,
  SessionStart,
  SessionTerminate,
  SampleMetrics,
  ControlMessage,  // corrections, terminations, drop notices
};

const char* event_kind_name(EventKind kind);

// Seeded generator with a pinned algorithm (mt19937_64) and pinned value
// mappings so replays are bit-identical across builds and platforms.
class SimRng {
 public:
  explicit SimRng(uint64_t seed) : rng_(seed) {}

  // (0, 1], 53-bit resolution
  double uniform01() { return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // k >= 1, P(k) = p(1-p)^{k-1}, by inversion
  uint64_t geometric(double p);
  uint64_t raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Discrete-event engine: (time, sequence)-ordered dispatch, monotone clock.
class EventQueue {
 public:
  struct Record {
    double time = 0.0;
    uint64_t seq = 0;
    EventKind kind{};
  };

  uint64_t schedule(double time, EventKind kind, std::function<void()> action);
  // Dispatch everything with time <= t_end; clock ends at t_end.
  void run_until(double t_end);
  bool run_one();  // dispatch a single event; false if queue empty
  double now() const { return now_; }
  size_t pending() const { return heap_.size(); }
  const std::vector<Record>& trace() const { return trace_; }
  void set_tracing(bool on) { tracing_ = on; }

 private:
  struct Entry {
    double time;
    uint64_t seq;
    EventKind kind;
    std::function<void()> action;
    bool operator>(const Entry& o) const {
      if (time != o.time) return time > o.time;
      return seq > o.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  double now_ = 0.0;
  uint64_t next_seq_ = 0;
  bool tracing_ = false;
  std::vector<Record> trace_;
};

// Success probability per attempt p = d(1-w)/chi (clamped to 1), geometric
// attempt count, time = attempts/chi. Throws on w = 1 (stalled link).
double sample_lle_time(double d, double w, double chi, SimRng& rng);

// length / (2e5 km/s) seconds
double propagation_delay(double length_km);

}  // namespace qnet
