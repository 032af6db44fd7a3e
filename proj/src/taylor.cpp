#include "trihalo/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace trihalo {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require_order(int order) {
  if (order != 2 && order != 3) {
    throw ConfigError("Taylor operators exist for orders 2 and 3, got " + std::to_string(order));
  }
}

}  // namespace

TaylorBasis TaylorBasis::of_order(int order) {
  if (order < 0) throw ConfigError("negative Taylor order");
  TaylorBasis basis;
  basis.order_ = order;
  for (int degree = 0; degree <= order; ++degree) {
    for (int a = degree; a >= 0; --a) {
      for (int b = degree - a; b >= 0; --b) {
        const int c = degree - a - b;
        basis.exponents_.push_back({a, b, c});
        basis.normalization_.push_back(1.0 / (factorial(a) * factorial(b) * factorial(c)));
      }
    }
  }
  return basis;
}

double TaylorBasis::evaluate(std::size_t j, const std::array<double, 3>& x) const {
  double value = normalization_[j];
  for (int axis = 0; axis < 3; ++axis) {
    for (int e = 0; e < exponents_[j][axis]; ++e) value *= x[axis];
  }
  return value;
}

std::vector<double> TaylorBasis::evaluate_all(const std::array<double, 3>& x) const {
  std::vector<double> values(size());
  for (std::size_t j = 0; j < size(); ++j) values[j] = evaluate(j, x);
  return values;
}

int stencil_width(int order) {
  require_order(order);
  return order == 2 ? 3 : 5;
}

int minimum_patch_size(Role role, int order) {
  require_order(order);
  // Each tangential axis must offer order+1 distinct source centres.
  return role == Role::interpolate ? order + 1 : (order + 1 + 2) / 3;
}

int minimum_halo_depth(int order) {
  require_order(order);
  return (order + 2) / 2;
}

CellIndex nearest_source_cell(const CellIndex& target, const RegionShape& target_region,
                              const RegionShape& source_region) {
  const auto x = target_region.centre(target);
  CellIndex nearest;
  for (int axis = 0; axis < 3; ++axis) {
    const double position = (x[axis] - source_region.origin[axis]) / source_region.spacing;
    const int index = static_cast<int>(std::ceil(position - 0.5));
    nearest[axis] = std::clamp(index, 0, source_region.extents[axis] - 1);
  }
  return nearest;
}

StencilSpec select_stencil(const CellIndex& centre, const RegionShape& region, int order) {
  const int width = stencil_width(order);
  const std::size_t basis_size = TaylorBasis::of_order(order).size();
  if (!region.contains(centre)) throw std::out_of_range("stencil centre outside the region");

  // Per axis: the (possibly shifted) stencil centre and the admissible range.
  std::array<int, 3> shifted{};
  for (int axis = 0; axis < 3; ++axis) {
    const int extent = region.extents[axis];
    const int reach = extent >= width ? width / 2 : (extent >= 3 ? 1 : 0);
    shifted[axis] = std::clamp(centre[axis], reach, extent - 1 - reach);
    const int available = std::min(extent, width);
    if (available < order + 1) {
      std::ostringstream msg;
      msg << "order-" << order << " stencil needs " << order + 1
          << " source cells along axis " << axis << " but the region " << region.describe()
          << " offers " << available;
      throw StencilInfeasibleError(msg.str(), 0, 0);
    }
  }

  StencilSpec stencil;
  stencil.centre = centre;
  auto add = [&](const CellIndex& cell) {
    if (!region.contains(cell)) return;
    stencil.offsets.push_back({cell[0] - centre[0], cell[1] - centre[1], cell[2] - centre[2]});
  };
  // 3x3x3 block around the shifted centre.
  const std::array<int, 3> half_block{region.extents[0] >= 3 ? 1 : 0,
                                      region.extents[1] >= 3 ? 1 : 0,
                                      region.extents[2] >= 3 ? 1 : 0};
  for (int c = -half_block[2]; c <= half_block[2]; ++c) {
    for (int b = -half_block[1]; b <= half_block[1]; ++b) {
      for (int a = -half_block[0]; a <= half_block[0]; ++a) {
        add({shifted[0] + a, shifted[1] + b, shifted[2] + c});
      }
    }
  }
  // Third order adds the cells two away along each axis.
  if (width == 5) {
    for (int axis = 0; axis < 3; ++axis) {
      for (int step : {-2, 2}) {
        CellIndex cell = shifted;
        cell[axis] += step;
        add(cell);
      }
    }
  }
  std::sort(stencil.offsets.begin(), stencil.offsets.end(),
            [](const CellIndex& x, const CellIndex& y) {
              return std::tie(x[2], x[1], x[0]) < std::tie(y[2], y[1], y[0]);
            });
  if (stencil.size() < basis_size + 3) {
    throw StencilInfeasibleError("stencil of " + std::to_string(stencil.size()) +
                                     " cells is too small for " + std::to_string(basis_size) +
                                     " coefficients",
                                 0, 0);
  }
  return stencil;
}

DerivativeFit build_derivative_fit(const StencilSpec& stencil, const TaylorBasis& basis,
                                   double spacing) {
  DenseMatrix a(stencil.size(), basis.size());
  for (std::size_t i = 0; i < stencil.size(); ++i) {
    const auto& o = stencil.offsets[i];
    const std::array<double, 3> x{static_cast<double>(o[0]), static_cast<double>(o[1]),
                                  static_cast<double>(o[2])};
    for (std::size_t j = 0; j < basis.size(); ++j) a(i, j) = basis.evaluate(j, x);
  }
  DerivativeFit fit;
  fit.weights = solve_pseudoinverse_rows(a, &fit.condition_estimate);
  fit.offsets = stencil.offsets;
  if (spacing != 1.0) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double scale = 1.0 / std::pow(spacing, basis.degree(j));
      for (std::size_t q = 0; q < stencil.size(); ++q) fit.weights(j, q) *= scale;
    }
  }
  return fit;
}

std::vector<TaylorRowPlan> plan_taylor_rows(const RegionShape& target,
                                            const RegionShape& source) {
  std::vector<TaylorRowPlan> plan;
  plan.reserve(target.cell_count());
  for (std::size_t row = 0; row < target.cell_count(); ++row) {
    TaylorRowPlan entry;
    entry.target = target.delinearize(row);
    entry.source = nearest_source_cell(entry.target, target, source);
    const auto xt = target.centre(entry.target);
    const auto xs = source.centre(entry.source);
    for (int axis = 0; axis < 3; ++axis) {
      entry.offset[axis] = (xt[axis] - xs[axis]) / source.spacing;
    }
    plan.push_back(entry);
  }
  return plan;
}

namespace {

CsrOperator assemble(const OperatorKey& key, const RegionShape& source,
                     const RegionShape& target, int order) {
  const TaylorBasis basis = TaylorBasis::of_order(order);
  std::map<std::size_t, DerivativeFit> fits;
  OperatorInfo info;
  info.key = key;
  info.source = source;
  info.target = target;

  std::vector<Triplet> entries;
  const std::vector<TaylorRowPlan> plan = plan_taylor_rows(target, source);
  for (std::size_t row = 0; row < plan.size(); ++row) {
    const TaylorRowPlan& entry = plan[row];
    const std::size_t source_linear = source.linear(entry.source);
    auto it = fits.find(source_linear);
    if (it == fits.end()) {
      DerivativeFit fit;
      try {
        fit = build_derivative_fit(select_stencil(entry.source, source, order), basis);
      } catch (const StencilInfeasibleError& e) {
        throw StencilInfeasibleError(
            std::string(e.what()) + "; " + key.fingerprint() + " requires p >= " +
                std::to_string(minimum_patch_size(key.role, order)) +
                " and k >= " + std::to_string(minimum_halo_depth(order)),
            minimum_patch_size(key.role, order), minimum_halo_depth(order));
      }
      info.max_condition = std::max(info.max_condition, fit.condition_estimate);
      if (fit.condition_estimate > kConditionWarningThreshold) ++info.ill_conditioned_fits;
      it = fits.emplace(source_linear, std::move(fit)).first;
    }
    const DerivativeFit& fit = it->second;
    const std::vector<double> taylor = basis.evaluate_all(entry.offset);
    for (std::size_t q = 0; q < fit.offsets.size(); ++q) {
      double weight = 0.0;
      for (std::size_t j = 0; j < basis.size(); ++j) weight += taylor[j] * fit.weights(j, q);
      const CellIndex& o = fit.offsets[q];
      const CellIndex cell{entry.source[0] + o[0], entry.source[1] + o[1],
                           entry.source[2] + o[2]};
      entries.push_back({static_cast<std::int64_t>(row),
                         static_cast<std::int64_t>(source.linear(cell)), weight});
    }
  }
  return CsrOperator::from_triplets(std::move(entries), info);
}

Scheme scheme_for_order(int order) { return order == 2 ? Scheme::order2 : Scheme::order3; }

void require_feasible(Role role, int p, int k, int order) {
  if (p < minimum_patch_size(role, order) || k < minimum_halo_depth(order)) {
    std::ostringstream msg;
    msg << "order-" << order << " " << to_string(role) << " is infeasible for p=" << p
        << ", k=" << k << ": requires p >= " << minimum_patch_size(role, order)
        << " and k >= " << minimum_halo_depth(order);
    throw StencilInfeasibleError(msg.str(), minimum_patch_size(role, order),
                                 minimum_halo_depth(order));
  }
}

}  // namespace

int scheme_order(Scheme scheme) {
  switch (scheme) {
    case Scheme::order2: return 2;
    case Scheme::order3: return 3;
    default: return 1;
  }
}

CsrOperator build_interpolation(int p, int k, int order, int segment) {
  require_order(order);
  FaceConfig{Axis::x, Side::negative, segment < 0 ? 0 : segment, p, k, 1}.validate();
  require_feasible(Role::interpolate, p, k, order);
  const RegionShape target = segment == OperatorKey::kWholeFace
                                 ? reference::fine_face(p, k)
                                 : reference::fine_segment(p, k, segment);
  return assemble(OperatorKey::interpolation(scheme_for_order(order), p, k, segment),
                  reference::coarse_source(p, k), target, order);
}

CsrOperator build_interpolation(const FaceConfig& cfg, int order) {
  cfg.validate();
  return build_interpolation(cfg.p, cfg.k, order, OperatorKey::kWholeFace);
}

CsrOperator build_restriction(int p, int k, int order, std::optional<Half> half) {
  require_order(order);
  FaceConfig{Axis::x, Side::negative, 0, p, k, 1}.validate();
  require_feasible(Role::restrict, p, k, order);
  return assemble(OperatorKey::restriction(scheme_for_order(order), p, k, half),
                  reference::fine_source(p, k), reference::coarse_target(p, k, half), order);
}

CsrOperator build_restriction(const FaceConfig& cfg, int order, std::optional<Half> half) {
  cfg.validate();
  return build_restriction(cfg.p, cfg.k, order, half);
}

}  // namespace trihalo
