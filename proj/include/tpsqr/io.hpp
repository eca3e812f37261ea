#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpsqr/event_data.hpp"
#include "tpsqr/psqr_oracle.hpp"
#include "tpsqr/solver.hpp"
#include "tpsqr/template.hpp"

namespace tpsqr::io {

using json = nlohmann::json;

/// Sidecar describing an event table: {"p": <int>, "time_unit": <string>}.
struct DatasetHeader {
  int p = 0;
  std::string time_unit = "unspecified";
};

DatasetHeader header_from_json(const json& j);
json to_json(const DatasetHeader& header);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/**
 * Reads `subject_id,timestamp,event_type` CSV (header row required when the
 * input is nonempty). Malformed rows raise ValidationError naming the line.
 */
std::vector<EventRecord> read_events_csv(std::istream& in);
void write_events_csv(std::ostream& out, std::span<const EventRecord> events);

/// `subject_id,span_index,t,o,x`, span_index 1-based.
void write_aggregated_csv(std::ostream& out, std::span<const SubjectSequence> sequences);
std::vector<SubjectSequence> read_aggregated_csv(std::istream& in);

/// {"p","L","thresholds","omega","w":[[k,k',l,value],...]} with zero w entries omitted.
json template_to_json(const Template& tmpl, const LagWindows& windows);
Template template_from_json(const json& j);

/// lambda, loglik, AIC, active-set size, iterations, KKT residual, convergence.
json fit_report(const FitResult& fit);

json model_to_json(const PsqrModel& model);
PsqrModel model_from_json(const json& j);

/// One row per sample, columns x1..xp.
void write_samples_csv(std::ostream& out, const Eigen::MatrixXi& samples);

}  // namespace tpsqr::io
