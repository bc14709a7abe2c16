#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ffcdnn/error.hpp"
#include "ffcdnn/numerics/tensor.hpp"

namespace ffcdnn {

/// Records per-layer adjoint rules during a forward pass and replays them in
/// reverse. Every watched input gets a zero-initialized gradient slot of its
/// own shape; adjoints accumulate into those slots.
class GradTape {
public:
    using Adjoint = std::function<void(GradTape&)>;
    using Slot = std::size_t;

    Slot watch(const Shape& shape) {
        grads_.emplace_back(shape);
        return grads_.size() - 1;
    }

    void record(Adjoint adjoint) {
        if (replayed_) throw StateError("grad tape: record after backward");
        adjoints_.push_back(std::move(adjoint));
    }

    Tensor& grad(Slot slot) { return grads_.at(slot); }
    const Tensor& grad(Slot slot) const { return grads_.at(slot); }
    std::size_t slots() const noexcept { return grads_.size(); }
    std::size_t recorded() const noexcept { return adjoints_.size(); }

    void backward() {
        if (replayed_) throw StateError("grad tape: backward called twice");
        replayed_ = true;
        for (auto it = adjoints_.rbegin(); it != adjoints_.rend(); ++it) (*it)(*this);
    }

private:
    std::vector<Tensor> grads_;
    std::vector<Adjoint> adjoints_;
    bool replayed_ = false;
};

} // namespace ffcdnn
