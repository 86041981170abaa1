#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lrru {

/// Extents of a dense (N, C, H, W) array.
struct Shape {
  std::int64_t n = 0;
  std::int64_t c = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  std::int64_t numel() const { return n * c * h * w; }
  std::int64_t plane() const { return h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

namespace detail {

struct Node;
using BackwardFn = std::function<void(Node&)>;

// One vertex of the autodiff graph. Non-leaf nodes are created by ops and
// hold the closure that pushes their gradient into their parents.
struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until a gradient reaches this node
  bool requires_grad = false;
  bool leaf = true;
  std::uint64_t seq = 0;  // execution order
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;

  std::vector<double>& grad_buffer();
};

}  // namespace detail

/// Handle to a node of the autodiff graph.
///
/// Copying a Tensor copies the handle; both copies refer to the same values
/// and gradient. Use clone() for an independent deep copy. Values of a tensor
/// produced by an op are never mutated afterwards, so handles are safe to
/// share read-only across threads.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::int64_t numel() const { return shape().numel(); }

  std::span<const double> data() const;
  /// Mutable access to a leaf's values (parameter updates, test setup).
  /// Throws for op outputs: they may be referenced by a live graph.
  std::span<double> mutable_data();

  double at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const;
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool value);
  bool is_leaf() const;

  bool has_grad() const;
  /// Gradient values; empty span when no gradient has reached this tensor.
  std::span<const double> grad() const;
  void zero_grad();

  /// Reverse pass from a single-element tensor. Leaf gradients accumulate
  /// across calls; intermediate gradients are recomputed each call.
  void backward() const;

  /// New leaf holding a copy of the values, detached from any graph.
  Tensor clone() const;
  Tensor detach() const { return clone(); }

  const char* op_name() const;

  // Internal: used by op implementations.
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  detail::Node& node() const;
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

/// While alive, ops on this thread record no graph (inference mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool active();

 private:
  bool previous_;
};

namespace detail {

/// Builds an op output. The backward closure is kept only when at least one
/// input requires a gradient.
Tensor make_result(Shape shape, std::vector<double> values, std::initializer_list<Tensor> inputs,
                   BackwardFn backward, const char* op);

}  // namespace detail

}  // namespace lrru
