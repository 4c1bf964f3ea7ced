#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace eigenpath::harness {

struct MetricSummary {
  double mean = 0.0;
  double standard_error = 0.0;  // sample std / sqrt(count)
  double min = 0.0;
  double max = 0.0;
  double median_of_means = 0.0;
  std::size_t count = 0;
};

/// Median of the means of `buckets` contiguous blocks; robust against heavy tails.
inline double median_of_means(const std::vector<double>& x, std::size_t buckets = 10) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  buckets = std::clamp<std::size_t>(buckets, 1, x.size());
  std::vector<double> means;
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t lo = b * x.size() / buckets;
    const std::size_t hi = (b + 1) * x.size() / buckets;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i];
    means.push_back(acc / static_cast<double>(hi - lo));
  }
  std::sort(means.begin(), means.end());
  const std::size_t m = means.size();
  return m % 2 == 1 ? means[m / 2] : 0.5 * (means[m / 2 - 1] + means[m / 2]);
}

inline MetricSummary summarize(const std::vector<double>& x) {
  MetricSummary s;
  s.count = x.size();
  if (x.empty()) {
    s.mean = s.standard_error = s.min = s.max = s.median_of_means = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  s.min = x.front();
  s.max = x.front();
  for (double v : x) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  const double var = x.size() > 1 ? ss / static_cast<double>(x.size() - 1) : 0.0;
  s.standard_error = std::sqrt(var / static_cast<double>(x.size()));
  s.median_of_means = median_of_means(x);
  return s;
}

}  // namespace eigenpath::harness
