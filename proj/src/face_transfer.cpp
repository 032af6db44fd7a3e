#include "trihalo/face_transfer.hpp"

namespace trihalo {

FaceTransfer::FaceTransfer(Scheme scheme, const FaceConfig& cfg, RegionShape ref_source,
                           RegionShape ref_target)
    : scheme_(scheme),
      cfg_(cfg),
      frame_(ReferenceFrame::for_face(cfg)),
      world_source_(frame_.to_world(ref_source)),
      world_target_(frame_.to_world(ref_target)),
      ref_source_(ref_source, cfg.u),
      ref_target_(ref_target, cfg.u) {}

FaceTransfer FaceTransfer::interpolation(Scheme scheme, const FaceConfig& cfg,
                                         OperatorCache& cache) {
  cfg.validate();
  FaceTransfer transfer(scheme, cfg, reference::coarse_source(cfg.p, cfg.k),
                        reference::fine_segment(cfg.p, cfg.k, cfg.segment));
  if (scheme == Scheme::tensor_linear) {
    transfer.tensor_ = TensorKernel::interpolation(cfg.p, cfg.k, cfg.segment);
  } else {
    transfer.op_ = cache.get(OperatorKey::interpolation(scheme, cfg.p, cfg.k, cfg.segment));
  }
  return transfer;
}

FaceTransfer FaceTransfer::restriction(Scheme scheme, const FaceConfig& cfg,
                                       std::optional<Half> half, OperatorCache& cache) {
  cfg.validate();
  FaceTransfer transfer(scheme, cfg, reference::fine_source(cfg.p, cfg.k),
                        reference::coarse_target(cfg.p, cfg.k, half));
  if (scheme == Scheme::tensor_linear) {
    transfer.tensor_ = TensorKernel::restriction(cfg.p, cfg.k, half);
  } else {
    transfer.op_ = cache.get(OperatorKey::restriction(scheme, cfg.p, cfg.k, half));
  }
  return transfer;
}

void FaceTransfer::run(const HaloBuffer& source, HaloBuffer& target) {
  if (source.shape() != world_source_ || target.shape() != world_target_ ||
      source.unknowns() != cfg_.u || target.unknowns() != cfg_.u) {
    throw ShapeError("face transfer buffers do not match " + world_source_.describe() +
                     " -> " + world_target_.describe() + " with u=" + std::to_string(cfg_.u));
  }
  to_reference_into(frame_, source, ref_source_);
  if (tensor_) {
    tensor_->apply(ref_source_, ref_target_);
  } else {
    apply_into(*op_, ref_source_.values(), ref_target_.values(), cfg_.u);
  }
  from_reference_into(frame_, ref_target_, target);
}

HaloBuffer interpolate(Scheme scheme, const FaceConfig& cfg, const HaloBuffer& coarse,
                       OperatorCache& cache) {
  FaceConfig c = cfg;
  c.u = coarse.unknowns();
  FaceTransfer transfer = FaceTransfer::interpolation(scheme, c, cache);
  if (!coarse.all_finite()) throw std::domain_error("non-finite value in coarse halo data");
  HaloBuffer out(transfer.target_shape(), c.u);
  transfer.run(coarse, out);
  return out;
}

HaloBuffer restrict_halo(Scheme scheme, const FaceConfig& cfg, const HaloBuffer& fine,
                         std::optional<Half> half, OperatorCache& cache) {
  FaceConfig c = cfg;
  c.u = fine.unknowns();
  FaceTransfer transfer = FaceTransfer::restriction(scheme, c, half, cache);
  if (!fine.all_finite()) throw std::domain_error("non-finite value in fine halo data");
  HaloBuffer out(transfer.target_shape(), c.u);
  transfer.run(fine, out);
  return out;
}

CsrOperator permute_to_world(const CsrOperator& reference_op, const FaceConfig& cfg) {
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  const OperatorInfo& info = reference_op.info();
  const RegionShape world_source = frame.to_world(info.source);
  const RegionShape world_target = frame.to_world(info.target);
  std::vector<Triplet> entries = reference_op.triplets();
  for (Triplet& t : entries) {
    const CellIndex row = frame.reference_to_world(
        info.target.delinearize(static_cast<std::size_t>(t.row)), info.target.extents);
    const CellIndex col = frame.reference_to_world(
        info.source.delinearize(static_cast<std::size_t>(t.col)), info.source.extents);
    t.row = static_cast<std::int64_t>(world_target.linear(row));
    t.col = static_cast<std::int64_t>(world_source.linear(col));
  }
  OperatorInfo world_info = info;
  world_info.source = world_source;
  world_info.target = world_target;
  return CsrOperator::from_triplets(std::move(entries), world_info);
}

}  // namespace trihalo
