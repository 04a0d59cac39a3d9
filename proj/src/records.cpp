#include "geom/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace geom {

namespace {

constexpr const char* kHeader = "experiment,manifold,sigma,n,rep,point_id,metric,value,flag";

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool same_value(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

bool operator==(const ExperimentRecord& a, const ExperimentRecord& b) {
  return a.experiment == b.experiment && a.manifold == b.manifold && same_value(a.sigma, b.sigma) && a.n == b.n &&
         a.rep == b.rep && a.point_id == b.point_id && a.metric == b.metric && same_value(a.value, b.value) &&
         a.flag == b.flag;
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << kHeader << '\n';
  for (const ExperimentRecord& r : records)
    os << r.experiment << ',' << r.manifold << ',' << fmt17(r.sigma) << ',' << r.n << ',' << r.rep << ',' << r.point_id
       << ',' << r.metric << ',' << fmt17(r.value) << ',' << r.flag << '\n';
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    throw GeomError(ErrorCode::InvalidArgument, "records file: missing or unexpected header");
  std::vector<ExperimentRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 9)
      throw GeomError(ErrorCode::InvalidArgument, "records file: line " + std::to_string(lineno) + " has " +
                                                      std::to_string(cells.size()) + " columns");
    try {
      ExperimentRecord r;
      r.experiment = cells[0];
      r.manifold = cells[1];
      r.sigma = std::stod(cells[2]);
      r.n = std::stoull(cells[3]);
      r.rep = std::stoi(cells[4]);
      r.point_id = std::stoull(cells[5]);
      r.metric = cells[6];
      r.value = std::stod(cells[7]);
      r.flag = cells[8];
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw GeomError(ErrorCode::InvalidArgument, "records file: unparsable number on line " + std::to_string(lineno));
    }
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), "quantile of an empty set");
  require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(const std::vector<double>& values) {
  std::vector<double> v;
  BoxStats s;
  for (double x : values) {
    if (std::isfinite(x))
      v.push_back(x);
    else
      ++s.failures;
  }
  if (v.empty()) throw GeomError(ErrorCode::EmptyGroup, "no finite values in group");
  std::sort(v.begin(), v.end());
  s.count = v.size();
  s.median = quantile_sorted(v, 0.5);
  s.q1 = quantile_sorted(v, 0.25);
  s.q3 = quantile_sorted(v, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.q1;
  s.whisker_hi = s.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      ++s.outliers;
      continue;
    }
    s.whisker_lo = std::min(s.whisker_lo, x);
    s.whisker_hi = std::max(s.whisker_hi, x);
  }
  s.min = v.front();
  s.max = v.back();
  return s;
}

std::vector<SummaryGroup> summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw GeomError(ErrorCode::EmptyGroup, "no records to summarize");
  using Key = std::tuple<std::string, std::string, double, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryGroup> groups;
  std::vector<std::vector<double>> values;
  for (const ExperimentRecord& r : records) {
    const Key key{r.experiment, r.metric, r.sigma, r.n};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      SummaryGroup g;
      g.experiment = r.experiment;
      g.metric = r.metric;
      g.sigma = r.sigma;
      g.n = r.n;
      groups.push_back(g);
      values.emplace_back();
    }
    SummaryGroup& g = groups[it->second];
    ++g.rows;
    if (r.failed() || !std::isfinite(r.value))
      ++g.failures;
    else
      values[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (values[i].empty()) continue;
    BoxStats s = box_stats(values[i]);
    s.failures = groups[i].failures;
    groups[i].stats = s;
  }
  return groups;
}

nlohmann::json summary_to_json(const std::vector<SummaryGroup>& groups) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t rows = 0, failed = 0;
  for (const SummaryGroup& g : groups) {
    nlohmann::json j;
    j["experiment"] = g.experiment;
    j["metric"] = g.metric;
    j["sigma"] = g.sigma;
    j["n"] = g.n;
    j["rows"] = g.rows;
    j["failures"] = g.failures;
    rows += g.rows;
    failed += g.failures;
    if (g.stats) {
      const BoxStats& s = *g.stats;
      j["count"] = s.count;
      j["median"] = s.median;
      j["q1"] = s.q1;
      j["q3"] = s.q3;
      j["whisker_lo"] = s.whisker_lo;
      j["whisker_hi"] = s.whisker_hi;
      j["outliers"] = s.outliers;
      j["min"] = s.min;
      j["max"] = s.max;
    } else {
      j["count"] = 0;
      j["median"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  nlohmann::json out;
  out["groups"] = std::move(arr);
  out["rows"] = rows;
  out["failed_rows"] = failed;
  out["failed_fraction"] = rows ? static_cast<double>(failed) / static_cast<double>(rows) : 0.0;
  return out;
}

double group_median(const std::vector<SummaryGroup>& groups, const std::string& metric, double sigma, std::size_t n) {
  for (const SummaryGroup& g : groups)
    if (g.metric == metric && g.sigma == sigma && g.n == n) return g.stats ? g.stats->median : std::nan("");
  return std::nan("");
}

}  // namespace geom
