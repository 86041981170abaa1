#include "lrru/params.hpp"

#include "lrru/error.hpp"

namespace lrru {

Tensor& ModelParams::add(const std::string& name, Tensor value) {
  if (contains(name)) throw UsageError("duplicate parameter name: " + name);
  value.set_requires_grad(true);
  index_.emplace(name, tensors_.size());
  names_.push_back(name);
  tensors_.push_back(std::move(value));
  return tensors_.back();
}

const Tensor& ModelParams::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown parameter: " + name);
  return tensors_[it->second];
}

Tensor& ModelParams::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown parameter: " + name);
  return tensors_[it->second];
}

std::int64_t ModelParams::total_numel() const {
  std::int64_t total = 0;
  for (const Tensor& t : tensors_) total += t.numel();
  return total;
}

void ModelParams::zero_grad() {
  for (Tensor& t : tensors_) t.zero_grad();
}

}  // namespace lrru
