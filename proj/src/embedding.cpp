#include "vwsd/embedding.hpp"

#include <cmath>
#include <string>

#include "vwsd/errors.hpp"

namespace vwsd {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Embedding l2_normalized(std::vector<double> v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DegenerateEmbedding("cannot normalize a zero-norm vector");
  }
  for (double& x : v) x /= norm;
  return Embedding{std::move(v), true};
}

std::vector<double> mean_of(std::span<const Embedding> embeddings) {
  if (embeddings.empty()) throw InvalidArgument("mean of an empty embedding list");
  const std::size_t dim = embeddings.front().dim();
  std::vector<double> acc(dim, 0.0);
  for (const Embedding& e : embeddings) {
    if (e.dim() != dim) throw InvalidArgument("mean over embeddings of different dimensions");
    for (std::size_t i = 0; i < dim; ++i) acc[i] += e.values[i];
  }
  const double n = static_cast<double>(embeddings.size());
  for (double& x : acc) x /= n;
  return acc;
}

std::vector<double> weighted_sum(const Embedding& a, double wa, const Embedding& b, double wb) {
  if (a.dim() != b.dim()) throw InvalidArgument("weighted sum over different dimensions");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = wa * a.values[i] + wb * b.values[i];
  return out;
}

bool is_unit_norm(const Embedding& e, double tolerance) {
  return std::abs(l2_norm(e.values) - 1.0) <= tolerance;
}

}  // namespace vwsd
