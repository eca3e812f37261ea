#include "tpsqr/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "tpsqr/errors.hpp"

namespace tpsqr::io {

namespace {

std::vector<std::string> split_csv_line(std::string line)
{
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const char* what, std::size_t line)
{
  const auto s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("line " + std::to_string(line) + ": cannot parse " + what + " '" + text + "'");
  }
  return value;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

DatasetHeader header_from_json(const json& j)
{
  if (!j.is_object() || !j.contains("p") || !j["p"].is_number_integer()) {
    throw ValidationError("dataset header needs an integer \"p\"");
  }
  DatasetHeader h;
  h.p = j["p"].get<int>();
  if (h.p < 1) throw ValidationError("dataset header: p must be >= 1");
  if (j.contains("time_unit")) h.time_unit = j["time_unit"].get<std::string>();
  return h;
}

json to_json(const DatasetHeader& header) { return json{{"p", header.p}, {"time_unit", header.time_unit}}; }

std::string format_double(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<EventRecord> read_events_csv(std::istream& in)
{
  std::vector<EventRecord> events;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_csv_line(line);
    if (!seen_header) {
      if (fields.size() != 3 || trim(fields[0]) != "subject_id" || trim(fields[1]) != "timestamp" ||
          trim(fields[2]) != "event_type") {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": expected header 'subject_id,timestamp,event_type'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
    }
    EventRecord e;
    e.subject_id = trim(fields[0]);
    if (e.subject_id.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty subject_id");
    e.timestamp = parse_number<double>(fields[1], "timestamp", line_no);
    e.event_type = parse_number<int>(fields[2], "event_type", line_no);
    e.source_line = line_no;
    events.push_back(std::move(e));
  }
  return events;
}

void write_events_csv(std::ostream& out, std::span<const EventRecord> events)
{
  out << "subject_id,timestamp,event_type\n";
  for (const auto& e : events) out << e.subject_id << ',' << format_double(e.timestamp) << ',' << e.event_type << '\n';
}

void write_aggregated_csv(std::ostream& out, std::span<const SubjectSequence> sequences)
{
  out << "subject_id,span_index,t,o,x\n";
  for (const auto& seq : sequences) {
    for (std::size_t j = 0; j < seq.spans.size(); ++j) {
      const auto& s = seq.spans[j];
      out << seq.subject_id << ',' << (j + 1) << ',' << format_double(s.t) << ',' << s.o << ',' << s.x << '\n';
    }
  }
}

std::vector<SubjectSequence> read_aggregated_csv(std::istream& in)
{
  std::vector<SubjectSequence> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_csv_line(line);
    if (!seen_header) {
      if (fields.size() != 5 || trim(fields[0]) != "subject_id") {
        throw ValidationError("line " + std::to_string(line_no) + ": expected header 'subject_id,span_index,t,o,x'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != 5) throw ValidationError("line " + std::to_string(line_no) + ": expected 5 fields");
    const auto id = trim(fields[0]);
    const auto index = parse_number<long>(fields[1], "span_index", line_no);
    Timespan s;
    s.t = parse_number<double>(fields[2], "t", line_no);
    s.o = parse_number<int>(fields[3], "o", line_no);
    s.x = parse_number<std::int64_t>(fields[4], "x", line_no);
    if (out.empty() || out.back().subject_id != id) out.push_back({id, {}});
    if (index != static_cast<long>(out.back().spans.size()) + 1) {
      throw ValidationError("line " + std::to_string(line_no) + ": span_index out of sequence");
    }
    out.back().spans.push_back(s);
  }
  return out;
}

json template_to_json(const Template& tmpl, const LagWindows& windows)
{
  tmpl.validate();
  json w = json::array();
  for (Eigen::Index c = 0; c < tmpl.w.size(); ++c) {
    if (tmpl.w(c) == 0.0) continue;
    const auto key = pair_from_index(static_cast<std::size_t>(c), tmpl.p, tmpl.L);
    w.push_back(json::array({key.source, key.target, key.lag, tmpl.w(c)}));
  }
  json omega = json::array();
  for (Eigen::Index k = 0; k < tmpl.omega.size(); ++k) omega.push_back(tmpl.omega(k));
  return json{{"p", tmpl.p}, {"L", tmpl.L}, {"thresholds", windows.thresholds()}, {"omega", omega}, {"w", w}};
}

Template template_from_json(const json& j)
{
  try {
    Template tmpl(j.at("p").get<int>(), j.at("L").get<int>());
    const auto omega = j.at("omega").get<std::vector<double>>();
    if (static_cast<int>(omega.size()) != tmpl.p) throw ValidationError("template JSON: omega length != p");
    for (int k = 0; k < tmpl.p; ++k) tmpl.omega(k) = omega[static_cast<std::size_t>(k)];
    for (const auto& entry : j.at("w")) {
      tmpl.weight(entry.at(0).get<int>(), entry.at(1).get<int>(), entry.at(2).get<int>()) = entry.at(3).get<double>();
    }
    tmpl.validate();
    return tmpl;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("template JSON: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ValidationError(std::string("template JSON: ") + e.what());
  }
}

json fit_report(const FitResult& fit)
{
  return json{{"lambda", fit.lambda},
              {"loglik", fit.loglik},
              {"aic", fit.aic()},
              {"objective", fit.objective},
              {"active_set_size", fit.active_set.size()},
              {"free_intercepts", fit.free_intercepts},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"kkt_residual", fit.kkt_residual}};
}

json model_to_json(const PsqrModel& model)
{
  json rows = json::array();
  for (int j = 0; j < model.p(); ++j) {
    json row = json::array();
    for (int k = 0; k < model.p(); ++k) row.push_back(model.theta()(j, k));
    rows.push_back(row);
  }
  return json{{"p", model.p()}, {"theta", rows}};
}

PsqrModel model_from_json(const json& j)
{
  try {
    const auto rows = j.at("theta").get<std::vector<std::vector<double>>>();
    const auto p = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd theta(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != p) {
        throw ValidationError("model JSON: theta must be square");
      }
      for (Eigen::Index c = 0; c < p; ++c) theta(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return PsqrModel(std::move(theta));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model JSON: ") + e.what());
  }
}

void write_samples_csv(std::ostream& out, const Eigen::MatrixXi& samples)
{
  for (Eigen::Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << samples(i, j);
    out << '\n';
  }
}

}  // namespace tpsqr::io
