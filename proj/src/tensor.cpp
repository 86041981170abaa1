#include "lrru/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

#include "lrru/error.hpp"

namespace lrru {

namespace {

std::atomic<std::uint64_t> g_sequence{0};

std::uint64_t next_seq() { return g_sequence.fetch_add(1, std::memory_order_relaxed) + 1; }

thread_local bool t_no_grad = false;

}  // namespace

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + ")";
}

std::vector<double>& detail::Node::grad_buffer() {
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad;
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    throw DimensionError("negative extent in shape " + shape.str());
  }
  if (static_cast<std::int64_t>(values.size()) != shape.numel()) {
    throw DimensionError("tensor of shape " + shape.str() + " needs " +
                         std::to_string(shape.numel()) + " values, got " +
                         std::to_string(values.size()));
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = shape;
  node_->data = std::move(values);
  node_->requires_grad = requires_grad;
  node_->seq = next_seq();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return Tensor(shape, std::vector<double>(static_cast<std::size_t>(shape.numel()), 0.0),
                requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  return Tensor(shape, std::vector<double>(static_cast<std::size_t>(shape.numel()), value),
                requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor({1, 1, 1, 1}, {value}, requires_grad);
}

detail::Node& Tensor::node() const {
  if (!node_) throw Error("use of an undefined tensor");
  return *node_;
}

const Shape& Tensor::shape() const { return node().shape; }

std::span<const double> Tensor::data() const { return node().data; }

std::span<double> Tensor::mutable_data() {
  if (!node().leaf) throw Error("mutable_data() on a non-leaf tensor (" + std::string(op_name()) + ")");
  return node().data;
}

double Tensor::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const {
  const Shape& s = shape();
  if (n < 0 || n >= s.n || c < 0 || c >= s.c || h < 0 || h >= s.h || w < 0 || w >= s.w) {
    throw DimensionError("index out of range for shape " + s.str());
  }
  return node().data[static_cast<std::size_t>(((n * s.c + c) * s.h + h) * s.w + w)];
}

double Tensor::item() const {
  if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape().str());
  return node().data[0];
}

bool Tensor::requires_grad() const { return node().requires_grad; }

void Tensor::set_requires_grad(bool value) {
  if (!node().leaf) throw Error("requires_grad can only be toggled on leaf tensors");
  node().requires_grad = value;
}

bool Tensor::is_leaf() const { return node().leaf; }

bool Tensor::has_grad() const { return !node().grad.empty(); }

std::span<const double> Tensor::grad() const { return node().grad; }

void Tensor::zero_grad() { node().grad.clear(); }

const char* Tensor::op_name() const { return node().op; }

Tensor Tensor::clone() const { return Tensor(shape(), node().data, false); }

void Tensor::backward() const {
  detail::Node& root = node();
  if (root.data.size() != 1) {
    throw DimensionError("backward() needs a single-element loss, got shape " + root.shape.str());
  }
  if (!root.requires_grad) return;

  // Collect every node reachable through gradient-carrying edges.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<detail::Node*> stack{&root};
  seen.insert(&root);
  while (!stack.empty()) {
    detail::Node* cur = stack.back();
    stack.pop_back();
    order.push_back(cur);
    for (const auto& p : cur->parents) {
      if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  // Reverse execution order.
  std::sort(order.begin(), order.end(),
            [](const detail::Node* a, const detail::Node* b) { return a->seq > b->seq; });

  for (detail::Node* nd : order) {
    if (!nd->leaf) nd->grad.clear();
  }
  if (root.leaf) {
    root.grad_buffer()[0] += 1.0;
  } else {
    root.grad.assign(1, 1.0);
  }
  for (detail::Node* nd : order) {
    if (nd->leaf || !nd->backward || nd->grad.empty()) continue;
    nd->backward(*nd);
  }
}

NoGradGuard::NoGradGuard() : previous_(t_no_grad) { t_no_grad = true; }

NoGradGuard::~NoGradGuard() { t_no_grad = previous_; }

bool NoGradGuard::active() { return t_no_grad; }

Tensor detail::make_result(Shape shape, std::vector<double> values,
                           std::initializer_list<Tensor> inputs, BackwardFn backward,
                           const char* op) {
  auto nd = std::make_shared<Node>();
  nd->shape = shape;
  nd->data = std::move(values);
  nd->leaf = false;
  nd->op = op;
  nd->seq = next_seq();
  bool any = false;
  if (!t_no_grad) {
    for (const Tensor& t : inputs) any = any || t.requires_grad();
  }
  if (any) {
    nd->requires_grad = true;
    nd->parents.reserve(inputs.size());
    for (const Tensor& t : inputs) nd->parents.push_back(t.node_ptr());
    nd->backward = std::move(backward);
  }
  return Tensor(std::move(nd));
}

}  // namespace lrru
