#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace abob {

// Recorded per-arm reward samples at strictly increasing integer times.
// Queries between samples are filled by per-arm linear interpolation; there
// is no extrapolation outside [first_time, last_time].
struct RewardTrace {
  std::vector<long long> times;
  std::vector<std::vector<double>> rewards;  // rewards[row][arm]

  int arm_count() const { return rewards.empty() ? 0 : static_cast<int>(rewards[0].size()); }
  long long first_time() const { return times.front(); }
  long long last_time() const { return times.back(); }
};

inline double trace_mean(const RewardTrace& trace, long long t, int arm) {
  if (arm < 0 || arm >= trace.arm_count())
    throw std::out_of_range("trace_mean: arm out of range");
  if (t < trace.first_time() || t > trace.last_time())
    throw std::out_of_range("trace_mean: time " + std::to_string(t) +
                            " outside [" + std::to_string(trace.first_time()) + ", " +
                            std::to_string(trace.last_time()) + "]");
  // First row with time >= t.
  const auto it = std::lower_bound(trace.times.begin(), trace.times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - trace.times.begin());
  if (trace.times[hi] == t) return trace.rewards[hi][arm];
  const std::size_t lo = hi - 1;
  const double span = static_cast<double>(trace.times[hi] - trace.times[lo]);
  const double frac = static_cast<double>(t - trace.times[lo]) / span;
  return trace.rewards[lo][arm] + frac * (trace.rewards[hi][arm] - trace.rewards[lo][arm]);
}

// Loads a trace CSV with header `t,arm_0,...,arm_{k-1}`. Malformed rows are
// rejected with the offending line number.
inline RewardTrace load_reward_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);

  const auto fail = [&](int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
  };

  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream header(line);
  std::string field;
  if (!std::getline(header, field, ',') || field != "t")
    fail(1, "header must start with 't'");
  int k = 0;
  while (std::getline(header, field, ',')) {
    if (field != "arm_" + std::to_string(k))
      fail(1, "expected column 'arm_" + std::to_string(k) + "', got '" + field + "'");
    ++k;
  }
  if (k == 0) fail(1, "no arm columns");

  RewardTrace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    if (!std::getline(row, field, ',')) fail(line_no, "empty row");
    long long t = 0;
    try {
      std::size_t pos = 0;
      t = std::stoll(field, &pos);
      if (pos != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      fail(line_no, "bad time value '" + field + "'");
    }
    if (!trace.times.empty() && t <= trace.times.back())
      fail(line_no, "times must be strictly increasing");
    std::vector<double> values;
    values.reserve(k);
    while (std::getline(row, field, ',')) {
      double v = 0.0;
      try {
        std::size_t pos = 0;
        v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        fail(line_no, "bad reward value '" + field + "'");
      }
      if (!(v >= 0.0 && v <= 1.0)) fail(line_no, "reward outside [0,1]");
      values.push_back(v);
    }
    if (static_cast<int>(values.size()) != k)
      fail(line_no, "expected " + std::to_string(k) + " reward columns, got " +
                        std::to_string(values.size()));
    trace.times.push_back(t);
    trace.rewards.push_back(std::move(values));
  }
  if (trace.times.size() < 2)
    throw std::runtime_error(path + ": trace needs at least 2 sample rows");
  return trace;
}

}  // namespace abob
