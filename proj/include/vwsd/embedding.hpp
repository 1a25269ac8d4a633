#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vwsd {

/// Tolerance on the L2 norm of a vector flagged as normalized.
inline constexpr double kUnitNormTolerance = 1e-6;

/// Fixed-dimension real vector shared by every stage of the pipeline.
struct Embedding {
  std::vector<double> values;
  bool normalized = false;

  std::size_t dim() const noexcept { return values.size(); }

  bool operator==(const Embedding&) const = default;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// Returns `v / ‖v‖`. Throws DegenerateEmbedding when the norm is zero or not finite.
Embedding l2_normalized(std::vector<double> v);

/// Element-wise arithmetic mean. Throws InvalidArgument on empty input or mismatched dimensions.
std::vector<double> mean_of(std::span<const Embedding> embeddings);

/// `wa * a + wb * b`, dimensions must agree.
std::vector<double> weighted_sum(const Embedding& a, double wa, const Embedding& b, double wb);

bool is_unit_norm(const Embedding& e, double tolerance = kUnitNormTolerance);

}  // namespace vwsd
