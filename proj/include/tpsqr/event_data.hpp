#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tpsqr {

/// One raw time-stamped event. Event types are 1-based labels in {1..p}.
struct EventRecord {
  std::string subject_id;
  double timestamp = 0.0;
  int event_type = 0;
  std::size_t source_line = 0;  ///< input line for diagnostics, 0 if unknown
};

/**
 * A maximal single-type run of events: first occurrence time `t`,
 * event type `o`, and the number of subsequent occurrences `x`
 * (total occurrences in the run minus one).
 */
struct Timespan {
  double t = 0.0;
  int o = 0;
  std::int64_t x = 0;

  bool operator==(const Timespan&) const = default;
};

struct SubjectSequence {
  std::string subject_id;
  std::vector<Timespan> spans;

  std::size_t size() const { return spans.size(); }
  bool empty() const { return spans.empty(); }
};

/**
 * Lag-window thresholds 0 = tau_0 < tau_1 < ... < tau_L.
 * Window l (1-based) is the half-open interval [tau_{l-1}, tau_l).
 */
class LagWindows {
 public:
  explicit LagWindows(std::vector<double> thresholds);

  int size() const { return static_cast<int>(thresholds_.size()) - 1; }
  const std::vector<double>& thresholds() const { return thresholds_; }
  double max_lag() const { return thresholds_.back(); }

  /// 1-based window holding `tau` when every threshold is multiplied by
  /// `scale`; 0 when tau falls past the last (scaled) threshold.
  int window(double tau, double scale = 1.0) const;

 private:
  std::vector<double> thresholds_;
};

/// One-hot influence vector of length L; all zero when tau >= tau_L.
std::vector<double> influence(double tau, const LagWindows& windows);

/**
 * Aggregates one subject's events into single-type timespans.
 *
 * Events must be sorted by timestamp and belong to a single subject.
 * Same-type events sharing a timestamp collapse into the run count;
 * distinct types sharing a timestamp are rejected.
 *
 * Ambiguity merge: when the span before the current one has the same type
 * as an incoming event and the current span started less than
 * `t_ambiguity` after it, the event is counted in that earlier span.
 * With t_ambiguity = 0 aggregation is plain run-length grouping.
 */
SubjectSequence aggregate(std::span<const EventRecord> events, double t_ambiguity);

/// Expands spans back into count-weighted first-occurrence events.
std::vector<EventRecord> expand(const SubjectSequence& seq);

struct AggregateOptions {
  double t_ambiguity = 0.0;
  double min_duration = 0.0;  ///< subjects whose last - first timestamp is shorter are dropped
};

/**
 * Validates, groups by subject (in order of first appearance) and aggregates
 * a whole event table. Events inside a subject are stably sorted by time.
 */
std::vector<SubjectSequence> aggregate_dataset(std::span<const EventRecord> events, int p,
                                               const AggregateOptions& options);

}  // namespace tpsqr
