#pragma once

// World-frame halo interpolation and restriction through the single stored
// reference operator: copy into reference ordering, apply, copy back.

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "trihalo/csr.hpp"
#include "trihalo/geometry.hpp"
#include "trihalo/linear_ops.hpp"

namespace trihalo {

/// Builds the CSR operator for a key without caching. tensor_linear has no
/// CSR form and is rejected.
CsrOperator build_operator(const OperatorKey& key);

/// Memoized reference operators. Concurrent get() calls are safe; two
/// threads racing on a missing key may both build it, the first insert wins.
class OperatorCache {
 public:
  std::shared_ptr<const CsrOperator> get(const OperatorKey& key);
  std::size_t size() const;
  void clear();

  static OperatorCache& global();

 private:
  mutable std::mutex mutex_;
  std::map<OperatorKey, std::shared_ptr<const CsrOperator>> operators_;
};

/// One face exchange with preallocated reference buffers.
class FaceTransfer {
 public:
  static FaceTransfer interpolation(Scheme scheme, const FaceConfig& cfg,
                                    OperatorCache& cache = OperatorCache::global());
  static FaceTransfer restriction(Scheme scheme, const FaceConfig& cfg,
                                  std::optional<Half> half,
                                  OperatorCache& cache = OperatorCache::global());

  Scheme scheme() const { return scheme_; }
  const FaceConfig& config() const { return cfg_; }
  const RegionShape& source_shape() const { return world_source_; }
  const RegionShape& target_shape() const { return world_target_; }
  /// Null for tensor_linear.
  const std::shared_ptr<const CsrOperator>& reference_operator() const { return op_; }

  void run(const HaloBuffer& source, HaloBuffer& target);

 private:
  FaceTransfer(Scheme scheme, const FaceConfig& cfg, RegionShape ref_source,
               RegionShape ref_target);

  Scheme scheme_;
  FaceConfig cfg_;
  ReferenceFrame frame_;
  RegionShape world_source_;
  RegionShape world_target_;
  std::shared_ptr<const CsrOperator> op_;
  std::optional<TensorKernel> tensor_;
  HaloBuffer ref_source_;
  HaloBuffer ref_target_;
};

HaloBuffer interpolate(Scheme scheme, const FaceConfig& cfg, const HaloBuffer& coarse,
                       OperatorCache& cache = OperatorCache::global());
HaloBuffer restrict_halo(Scheme scheme, const FaceConfig& cfg, const HaloBuffer& fine,
                         std::optional<Half> half = std::nullopt,
                         OperatorCache& cache = OperatorCache::global());

/// The reference operator with rows and columns renumbered to the world
/// ordering of `cfg`, i.e. one of the six stored-per-face variants.
CsrOperator permute_to_world(const CsrOperator& reference_op, const FaceConfig& cfg);

}  // namespace trihalo
