#include "trihalo/csr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace trihalo {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::tensor_linear: return "tensor_linear";
    case Scheme::matrix_linear: return "matrix_linear";
    case Scheme::order2: return "order2";
    case Scheme::order3: return "order3";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == text) return s;
  }
  if (text == "tensor") return Scheme::tensor_linear;
  if (text == "matrix") return Scheme::matrix_linear;
  throw ConfigError("unknown scheme '" + text +
                    "' (expected tensor_linear, matrix_linear, order2 or order3)");
}

std::string OperatorKey::fingerprint() const {
  std::ostringstream out;
  out << to_string(scheme) << '/' << to_string(role) << "/p" << p << "/k" << k << '/';
  if (part == kWholeFace) {
    out << "whole";
  } else if (role == Role::interpolate) {
    out << "segment" << part;
  } else {
    out << to_string(static_cast<Half>(part));
  }
  return out.str();
}

CsrOperator CsrOperator::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                       std::vector<Triplet> entries) {
  if (n_cols > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw std::invalid_argument("column count exceeds the index type");
  }
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n_rows ||
        static_cast<std::size_t>(t.col) >= n_cols) {
      throw std::out_of_range("triplet (" + std::to_string(t.row) + "," +
                              std::to_string(t.col) + ") outside " + std::to_string(n_rows) +
                              "x" + std::to_string(n_cols));
    }
    if (!std::isfinite(t.value)) throw std::invalid_argument("non-finite triplet value");
  }
  // Value is the last sort key so duplicates are summed in the same order
  // whatever the input order.
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });

  CsrOperator op;
  op.n_cols_ = n_cols;
  op.row_offsets_.assign(n_rows + 1, 0);
  std::size_t i = 0;
  for (std::size_t row = 0; row < n_rows; ++row) {
    while (i < entries.size() && static_cast<std::size_t>(entries[i].row) == row) {
      const std::int64_t col = entries[i].col;
      double sum = 0.0;
      while (i < entries.size() && static_cast<std::size_t>(entries[i].row) == row &&
             entries[i].col == col) {
        sum += entries[i].value;
        ++i;
      }
      if (std::abs(sum) >= kDropTolerance) {
        op.col_indices_.push_back(static_cast<std::int32_t>(col));
        op.values_.push_back(sum);
      }
    }
    op.row_offsets_[row + 1] = op.values_.size();
  }
  op.info_.source = RegionShape{{static_cast<int>(n_cols), 1, 1}, 1, {0.0, 0.0, 0.0}};
  op.info_.target = RegionShape{{static_cast<int>(n_rows), 1, 1}, 1, {0.0, 0.0, 0.0}};
  return op;
}

CsrOperator CsrOperator::from_triplets(std::vector<Triplet> entries, const OperatorInfo& info) {
  CsrOperator op = from_triplets(info.target.cell_count(), info.source.cell_count(),
                                 std::move(entries));
  op.info_ = info;
  return op;
}

void CsrOperator::set_info(const OperatorInfo& info) {
  if (info.source.cell_count() != n_cols_ || info.target.cell_count() != n_rows()) {
    throw ShapeError("operator metadata regions do not match the matrix dimensions");
  }
  info_ = info;
}

std::size_t CsrOperator::max_row_nnz() const {
  std::size_t widest = 0;
  for (std::size_t r = 0; r + 1 < row_offsets_.size(); ++r) {
    widest = std::max(widest, row_offsets_[r + 1] - row_offsets_[r]);
  }
  return widest;
}

std::vector<Triplet> CsrOperator::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_rows(); ++r) {
    for (std::size_t j = row_offsets_[r]; j < row_offsets_[r + 1]; ++j) {
      out.push_back({static_cast<std::int64_t>(r), col_indices_[j], values_[j]});
    }
  }
  return out;
}

DenseMatrix CsrOperator::to_dense() const {
  DenseMatrix dense(n_rows(), n_cols_);
  for (const Triplet& t : triplets()) dense(t.row, t.col) = t.value;
  return dense;
}

namespace {

// Accumulates one row over a block of kBlock unknowns held in registers.
// Even and odd entries feed separate accumulators to hide FMA latency.
template <std::size_t kBlock>
inline void accumulate_block(const std::int32_t* cols, const double* weights, std::size_t begin,
                             std::size_t end, const double* in, std::size_t stride,
                             std::size_t c0, double* out) {
  double even[kBlock] = {};
  double odd[kBlock] = {};
  std::size_t j = begin;
  for (; j + 1 < end; j += 2) {
    const double w0 = weights[j];
    const double w1 = weights[j + 1];
    const double* a = in + static_cast<std::size_t>(cols[j]) * stride + c0;
    const double* b = in + static_cast<std::size_t>(cols[j + 1]) * stride + c0;
    for (std::size_t c = 0; c < kBlock; ++c) {
      even[c] += w0 * a[c];
      odd[c] += w1 * b[c];
    }
  }
  if (j < end) {
    const double w = weights[j];
    const double* a = in + static_cast<std::size_t>(cols[j]) * stride + c0;
    for (std::size_t c = 0; c < kBlock; ++c) even[c] += w * a[c];
  }
  for (std::size_t c = 0; c < kBlock; ++c) out[c0 + c] = even[c] + odd[c];
}

}  // namespace

void apply_into(const CsrOperator& op, std::span<const double> src, std::span<double> dst,
                int u) {
  constexpr std::size_t kBlock = 16;
  const std::size_t* offsets = op.row_offsets().data();
  const std::int32_t* cols = op.col_indices().data();
  const double* weights = op.values().data();
  const double* in = src.data();
  double* out = dst.data();
  const std::size_t rows = op.n_rows();
  const auto stride = static_cast<std::size_t>(u);
  const std::size_t full = stride - stride % kBlock;
  for (std::size_t r = 0; r < rows; ++r) {
    double* row_out = out + r * stride;
    const std::size_t begin = offsets[r];
    const std::size_t end = offsets[r + 1];
    for (std::size_t c0 = 0; c0 < full; c0 += kBlock) {
      accumulate_block<kBlock>(cols, weights, begin, end, in, stride, c0, row_out);
    }
    if (full == stride) continue;
    if (full > 0) {
      // One last block ending at the final channel; overlapped channels are
      // recomputed with the same arithmetic and come out identical.
      accumulate_block<kBlock>(cols, weights, begin, end, in, stride, stride - kBlock, row_out);
      continue;
    }
    std::size_t c0 = 0;
    if (stride - c0 >= 8) {
      accumulate_block<8>(cols, weights, begin, end, in, stride, c0, row_out);
      c0 += 8;
    }
    if (stride - c0 >= 4) {
      accumulate_block<4>(cols, weights, begin, end, in, stride, c0, row_out);
      c0 += 4;
    }
    for (; c0 < stride; ++c0) accumulate_block<1>(cols, weights, begin, end, in, stride, c0, row_out);
  }
}

HaloBuffer apply(const CsrOperator& op, const HaloBuffer& src) {
  if (src.cell_count() != op.n_cols()) {
    throw ShapeError("operator " + op.key().fingerprint() + " expects " +
                     std::to_string(op.n_cols()) + " source cells, buffer has " +
                     std::to_string(src.cell_count()));
  }
  if (!src.all_finite()) throw std::domain_error("non-finite value in operator input");
  RegionShape target = op.info().target;
  if (target.cell_count() != op.n_rows()) {
    target = RegionShape{{static_cast<int>(op.n_rows()), 1, 1}, 1, {0.0, 0.0, 0.0}};
  }
  HaloBuffer out(target, src.unknowns());
  apply_into(op, src.values(), out.values(), src.unknowns());
  return out;
}

CsrOperator extract_segment(const CsrOperator& full_face, int segment) {
  const OperatorKey& key = full_face.key();
  if (segment < 0 || segment >= kSegmentCount) {
    throw ConfigError("segment must lie in [0,8], got " + std::to_string(segment));
  }
  const RegionShape face = reference::fine_face(key.p, key.k);
  if (key.role != Role::interpolate || key.part != OperatorKey::kWholeFace ||
      full_face.n_rows() != face.cell_count()) {
    throw ShapeError("segment extraction needs a whole-face interpolation operator");
  }
  const RegionShape seg = reference::fine_segment(key.p, key.k, segment);
  const auto offset = reference::segment_offset(key.p, segment);

  std::vector<Triplet> rows;
  auto offsets = full_face.row_offsets();
  auto cols = full_face.col_indices();
  auto vals = full_face.values();
  for (std::size_t r = 0; r < seg.cell_count(); ++r) {
    const CellIndex c = seg.delinearize(r);
    const std::size_t source_row = face.linear({c[0], c[1] + offset[0], c[2] + offset[1]});
    for (std::size_t j = offsets[source_row]; j < offsets[source_row + 1]; ++j) {
      rows.push_back({static_cast<std::int64_t>(r), cols[j], vals[j]});
    }
  }
  OperatorInfo info = full_face.info();
  info.key.part = segment;
  info.target = seg;
  return CsrOperator::from_triplets(std::move(rows), info);
}

void write_dump(std::ostream& out, const CsrOperator& op) {
  out << op.n_rows() << ' ' << op.n_cols() << ' ' << op.nnz() << ' '
      << to_string(op.key().scheme) << ' ' << op.key().p << ' ' << op.key().k << '\n';
  char value[64];
  for (const Triplet& t : op.triplets()) {
    std::snprintf(value, sizeof value, "%.17g", t.value);
    out << t.row << ' ' << t.col << ' ' << value << '\n';
  }
}

std::string dump_to_string(const CsrOperator& op) {
  std::ostringstream out;
  write_dump(out, op);
  return out.str();
}

CsrOperator read_dump(std::istream& in) {
  std::size_t n_rows = 0, n_cols = 0, nnz = 0;
  std::string tag;
  int p = 0, k = 0;
  if (!(in >> n_rows >> n_cols >> nnz >> tag >> p >> k)) {
    throw std::runtime_error("malformed operator dump header");
  }
  std::vector<Triplet> entries(nnz);
  for (Triplet& t : entries) {
    if (!(in >> t.row >> t.col >> t.value)) throw std::runtime_error("truncated operator dump");
  }
  CsrOperator op = CsrOperator::from_triplets(n_rows, n_cols, std::move(entries));
  OperatorInfo info = op.info();
  info.key.scheme = parse_scheme(tag);
  info.key.p = p;
  info.key.k = k;
  op.set_info(info);
  return op;
}

}  // namespace trihalo
