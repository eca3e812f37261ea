#include "tpsqr/event_data.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tpsqr/errors.hpp"

namespace tpsqr {

namespace {

std::string where(const EventRecord& e)
{
  std::ostringstream os;
  os << "subject '" << e.subject_id << "' at timestamp " << e.timestamp;
  if (e.source_line > 0) os << " (line " << e.source_line << ")";
  return os.str();
}

}  // namespace

LagWindows::LagWindows(std::vector<double> thresholds) : thresholds_(std::move(thresholds))
{
  if (thresholds_.size() < 2) {
    throw ValidationError("lag windows need at least two thresholds (L >= 1)");
  }
  if (thresholds_.front() != 0.0) {
    throw ValidationError("first lag threshold must be 0");
  }
  for (std::size_t l = 1; l < thresholds_.size(); ++l) {
    if (!std::isfinite(thresholds_[l]) || !(thresholds_[l] > thresholds_[l - 1])) {
      throw ValidationError("lag thresholds must be finite and strictly increasing");
    }
  }
}

int LagWindows::window(double tau, double scale) const
{
  if (!(tau >= 0.0)) throw std::invalid_argument("influence: lag must be nonnegative");
  if (scale <= 0.0) return 0;
  // first threshold strictly greater than tau; left-closed windows
  for (std::size_t l = 1; l < thresholds_.size(); ++l) {
    if (tau < scale * thresholds_[l]) return static_cast<int>(l);
  }
  return 0;
}

std::vector<double> influence(double tau, const LagWindows& windows)
{
  std::vector<double> phi(static_cast<std::size_t>(windows.size()), 0.0);
  if (const int l = windows.window(tau); l > 0) phi[static_cast<std::size_t>(l - 1)] = 1.0;
  return phi;
}

SubjectSequence aggregate(std::span<const EventRecord> events, double t_ambiguity)
{
  if (!(t_ambiguity >= 0.0)) throw std::invalid_argument("t_ambiguity must be nonnegative");

  SubjectSequence seq;
  if (events.empty()) return seq;
  seq.subject_id = events.front().subject_id;

  const EventRecord* prev = nullptr;
  for (const auto& e : events) {
    if (e.subject_id != seq.subject_id) {
      throw ValidationError("aggregate: mixed subjects '" + seq.subject_id + "' and '" +
                            e.subject_id + "'");
    }
    if (!std::isfinite(e.timestamp) || e.timestamp < 0.0) {
      throw ValidationError("invalid timestamp for " + where(e));
    }
    if (prev != nullptr) {
      if (e.timestamp < prev->timestamp) {
        throw ValidationError("events not sorted by timestamp for " + where(e));
      }
      if (e.timestamp == prev->timestamp && e.event_type != prev->event_type) {
        throw ValidationError("distinct event types " + std::to_string(prev->event_type) +
                              " and " + std::to_string(e.event_type) + " share a timestamp for " +
                              where(e));
      }
    }
    prev = &e;

    auto& spans = seq.spans;
    const std::size_t n = spans.size();
    if (n > 0 && spans[n - 1].o == e.event_type) {
      ++spans[n - 1].x;
    } else if (n > 1 && spans[n - 2].o == e.event_type &&
               spans[n - 1].t - spans[n - 2].t < t_ambiguity) {
      ++spans[n - 2].x;
    } else {
      spans.push_back({e.timestamp, e.event_type, 0});
    }
  }
  return seq;
}

std::vector<EventRecord> expand(const SubjectSequence& seq)
{
  std::vector<EventRecord> events;
  for (const auto& s : seq.spans) {
    for (std::int64_t c = 0; c <= s.x; ++c) events.push_back({seq.subject_id, s.t, s.o, 0});
  }
  return events;
}

std::vector<SubjectSequence> aggregate_dataset(std::span<const EventRecord> events, int p,
                                               const AggregateOptions& options)
{
  if (p < 1) throw ValidationError("number of event types p must be >= 1");
  if (!(options.min_duration >= 0.0)) throw ValidationError("min_duration must be nonnegative");

  std::vector<std::vector<EventRecord>> by_subject;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& e : events) {
    if (e.event_type < 1 || e.event_type > p) {
      throw ValidationError("event type " + std::to_string(e.event_type) + " outside 1.." +
                            std::to_string(p) + " for " + where(e));
    }
    if (!std::isfinite(e.timestamp) || e.timestamp < 0.0) {
      throw ValidationError("invalid timestamp for " + where(e));
    }
    auto [it, inserted] = index.try_emplace(e.subject_id, by_subject.size());
    if (inserted) by_subject.emplace_back();
    by_subject[it->second].push_back(e);
  }

  std::vector<SubjectSequence> out;
  out.reserve(by_subject.size());
  for (auto& subject_events : by_subject) {
    std::stable_sort(subject_events.begin(), subject_events.end(),
                     [](const EventRecord& a, const EventRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
    const double duration = subject_events.back().timestamp - subject_events.front().timestamp;
    if (duration < options.min_duration) continue;
    out.push_back(aggregate(subject_events, options.t_ambiguity));
  }
  return out;
}

}  // namespace tpsqr
