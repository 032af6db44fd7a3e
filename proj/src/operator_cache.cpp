#include <stdexcept>

#include "trihalo/face_transfer.hpp"
#include "trihalo/linear_ops.hpp"
#include "trihalo/taylor.hpp"

namespace trihalo {

CsrOperator build_operator(const OperatorKey& key) {
  switch (key.scheme) {
    case Scheme::tensor_linear:
      throw ConfigError("tensor_linear is applied axis by axis and has no CSR operator; "
                        "use matrix_linear for its collapsed form");
    case Scheme::matrix_linear:
      return collapse_to_matrix(key);
    case Scheme::order2:
    case Scheme::order3: {
      const int order = scheme_order(key.scheme);
      if (key.role == Role::interpolate) return build_interpolation(key.p, key.k, order, key.part);
      return build_restriction(key.p, key.k, order, key.half());
    }
  }
  throw ConfigError("unknown scheme");
}

std::shared_ptr<const CsrOperator> OperatorCache::get(const OperatorKey& key) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = operators_.find(key); it != operators_.end()) return it->second;
  }
  auto built = std::make_shared<const CsrOperator>(build_operator(key));
  std::lock_guard lock(mutex_);
  return operators_.emplace(key, std::move(built)).first->second;
}

std::size_t OperatorCache::size() const {
  std::lock_guard lock(mutex_);
  return operators_.size();
}

void OperatorCache::clear() {
  std::lock_guard lock(mutex_);
  operators_.clear();
}

OperatorCache& OperatorCache::global() {
  static OperatorCache cache;
  return cache;
}

}  // namespace trihalo
