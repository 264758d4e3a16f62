#include "gdpp/bench.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gdpp {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double read_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string to_csv(const BenchResult& res, bool timings) {
  std::ostringstream os;
  os << "method,m,median_error,q1_error,q3_error,failures,n_signals,bound_violations,fixed_sample,seed";
  if (timings) os << ",wall_time_s";
  os << '\n';
  for (const auto& r : res.rows) {
    os << to_string(r.method) << ',' << r.m << ',' << csv_number(r.median_error) << ',' << csv_number(r.q1_error)
       << ',' << csv_number(r.q3_error) << ',' << r.failures << ',' << r.n_signals << ',' << r.bound_violations
       << ',' << (r.fixed_sample ? "true" : "false") << ',' << r.seed;
    if (timings) os << ',' << csv_number(r.wall_time_s);
    os << '\n';
  }
  return os.str();
}

json to_json(const BenchResult& res, bool timings) {
  json rows = json::array();
  for (const auto& r : res.rows) {
    json row = {{"method", to_string(r.method)},
                {"m", r.m},
                {"median_error", number(r.median_error)},
                {"q1_error", number(r.q1_error)},
                {"q3_error", number(r.q3_error)},
                {"failures", r.failures},
                {"n_signals", r.n_signals},
                {"bound_violations", r.bound_violations},
                {"fixed_sample", r.fixed_sample},
                {"seed", r.seed}};
    if (timings) row["wall_time_s"] = r.wall_time_s;
    rows.push_back(std::move(row));
  }
  return {{"n_nodes", res.n_nodes},
          {"n_edges", res.n_edges},
          {"k", res.k},
          {"lambda_max", number(res.lambda_max)},
          {"cutoff", number(res.cutoff)},
          {"cutoff_source", res.cutoff_source},
          {"r", res.r},
          {"n_probes", res.n_probes},
          {"noise_std", res.noise_std},
          {"seed", res.seed},
          {"sample_policy", "fresh sample per signal for random methods; one fixed sample for dpp-approx and dpp-ideal"},
          {"rows", std::move(rows)}};
}

}  // namespace

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format '" + std::string(s) + "'");
}

std::string format_report(const BenchResult& res, ReportFormat format, bool include_timings) {
  if (format == ReportFormat::Csv) return to_csv(res, include_timings);
  return to_json(res, include_timings).dump(2) + "\n";
}

void emit_report(const BenchResult& res, const std::filesystem::path& path, ReportFormat format,
                 bool include_timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file " + path.string());
  out << format_report(res, format, include_timings);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

BenchResult parse_json_report(std::string_view text) {
  const json j = json::parse(text);
  BenchResult res;
  res.n_nodes = j.at("n_nodes").get<Index>();
  res.n_edges = j.at("n_edges").get<Index>();
  res.k = j.at("k").get<Index>();
  res.lambda_max = read_number(j.at("lambda_max"));
  res.cutoff = read_number(j.at("cutoff"));
  res.cutoff_source = j.at("cutoff_source").get<std::string>();
  res.r = j.at("r").get<Index>();
  res.n_probes = j.at("n_probes").get<Index>();
  res.noise_std = read_number(j.at("noise_std"));
  res.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("rows")) {
    BenchRow row;
    row.method = method_from_string(r.at("method").get<std::string>());
    row.m = r.at("m").get<Index>();
    row.median_error = read_number(r.at("median_error"));
    row.q1_error = read_number(r.at("q1_error"));
    row.q3_error = read_number(r.at("q3_error"));
    row.failures = r.at("failures").get<Index>();
    row.n_signals = r.at("n_signals").get<Index>();
    row.bound_violations = r.at("bound_violations").get<Index>();
    row.fixed_sample = r.at("fixed_sample").get<bool>();
    row.seed = r.at("seed").get<std::uint64_t>();
    if (r.contains("wall_time_s")) row.wall_time_s = r.at("wall_time_s").get<double>();
    res.rows.push_back(std::move(row));
  }
  return res;
}

}  // namespace gdpp
