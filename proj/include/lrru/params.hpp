#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lrru/tensor.hpp"

namespace lrru {

/// Ordered collection of named, learnable tensors.
class ModelParams {
 public:
  /// Adds a parameter; names must be unique. The tensor is marked requires_grad.
  Tensor& add(const std::string& name, Tensor value);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);

  std::size_t size() const { return tensors_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }

  std::int64_t total_numel() const;
  void zero_grad();

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace lrru
