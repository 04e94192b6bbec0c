#include "phida/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace phida {

namespace {

struct Contingency {
  std::vector<std::vector<double>> table;
  std::vector<double> rows;
  std::vector<double> cols;
  double n = 0.0;
};

std::vector<std::size_t> dense_codes(std::span<const long> labels, std::size_t& count) {
  std::map<long, std::size_t> code;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] = code.emplace(labels[i], code.size());
    out[i] = it->second;
  }
  count = code.size();
  return out;
}

Contingency contingency(std::span<const long> truth, std::span<const long> pred) {
  if (truth.size() != pred.size()) throw std::invalid_argument("labelings differ in length");
  if (truth.empty()) throw std::invalid_argument("empty labelings");
  std::size_t r = 0;
  std::size_t c = 0;
  const auto a = dense_codes(truth, r);
  const auto b = dense_codes(pred, c);
  Contingency ct;
  ct.table.assign(r, std::vector<double>(c, 0.0));
  ct.rows.assign(r, 0.0);
  ct.cols.assign(c, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ct.table[a[i]][b[i]] += 1.0;
    ct.rows[a[i]] += 1.0;
    ct.cols[b[i]] += 1.0;
  }
  ct.n = static_cast<double>(a.size());
  return ct;
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

double entropy_of(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

double mi_of(const Contingency& ct) {
  double mi = 0.0;
  for (std::size_t i = 0; i < ct.rows.size(); ++i) {
    for (std::size_t j = 0; j < ct.cols.size(); ++j) {
      const double nij = ct.table[i][j];
      if (nij > 0.0) mi += (nij / ct.n) * std::log(ct.n * nij / (ct.rows[i] * ct.cols[j]));
    }
  }
  return std::max(mi, 0.0);
}

// E[MI] under the hypergeometric model with fixed marginals.
double emi_of(const Contingency& ct) {
  const double n = ct.n;
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (double a : ct.rows) {
    for (double b : ct.cols) {
      const double lo = std::max(1.0, a + b - n);
      const double hi = std::min(a, b);
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double term = (nij / n) * std::log(n * nij / (a * b));
        const double log_p = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(n - a + 1.0) +
                             std::lgamma(n - b + 1.0) - lg_n - std::lgamma(nij + 1.0) -
                             std::lgamma(a - nij + 1.0) - std::lgamma(b - nij + 1.0) -
                             std::lgamma(n - a - b + nij + 1.0);
        emi += term * std::exp(log_p);
      }
    }
  }
  return emi;
}

}  // namespace

double adjusted_rand_index(std::span<const long> truth, std::span<const long> pred) {
  const auto ct = contingency(truth, pred);
  double index = 0.0;
  for (const auto& row : ct.table) {
    for (double v : row) index += pairs(v);
  }
  double sum_rows = 0.0;
  double sum_cols = 0.0;
  for (double a : ct.rows) sum_rows += pairs(a);
  for (double b : ct.cols) sum_cols += pairs(b);
  const double total = pairs(ct.n);
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double entropy(std::span<const long> labels) {
  const auto ct = contingency(labels, labels);
  return entropy_of(ct.rows, ct.n);
}

double mutual_information(std::span<const long> truth, std::span<const long> pred) {
  return mi_of(contingency(truth, pred));
}

double expected_mutual_information(std::span<const long> truth, std::span<const long> pred) {
  return emi_of(contingency(truth, pred));
}

double adjusted_mutual_information(std::span<const long> truth, std::span<const long> pred) {
  const auto ct = contingency(truth, pred);
  const std::size_t r = ct.rows.size();
  const std::size_t c = ct.cols.size();
  if (r == c && (r == 1 || r == static_cast<std::size_t>(ct.n))) {
    // Both trivial in the same way: identical partitions.
    return 1.0;
  }
  const double mi = mi_of(ct);
  const double emi = emi_of(ct);
  const double h_max = std::max(entropy_of(ct.rows, ct.n), entropy_of(ct.cols, ct.n));
  double denom = h_max - emi;
  // Keep the sign of the denominator but avoid dividing by ~0.
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(denom) < eps) denom = denom < 0.0 ? -eps : eps;
  return (mi - emi) / denom;
}

double avg_inc(std::span<const double> per_stage) {
  if (per_stage.empty()) throw std::invalid_argument("avg_inc: no stages");
  double s = 0.0;
  for (double v : per_stage) s += v;
  return s / static_cast<double>(per_stage.size());
}

double backward_transfer(const StageScoreMatrix& r) {
  const std::size_t j = r.size();
  if (j < 2) throw std::invalid_argument("backward_transfer: need at least two stages");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < j; ++i) {
    if (r[i].size() < j || !r[i][i] || !r[i][j - 1]) {
      throw std::invalid_argument("backward_transfer: missing stage score");
    }
    s += *r[i][j - 1] - *r[i][i];
  }
  return s / static_cast<double>(j - 1);
}

}  // namespace phida
