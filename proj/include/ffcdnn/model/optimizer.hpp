#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ffcdnn/model/network.hpp"

namespace ffcdnn::model {

/// Adaptive-moment descent with bias correction.
class Adam {
public:
    Adam(std::vector<NamedTensor> params, double lr, double beta1, double beta2, double eps)
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (auto& p : params_) {
            m_.emplace_back(p.tensor->shape());
            v_.emplace_back(p.tensor->shape());
        }
    }

    void step(const std::vector<Tensor>& grads) {
        ++t_;
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            double* w = params_[k].tensor->data();
            double* m = m_[k].data();
            double* v = v_[k].data();
            const double* g = grads[k].data();
            for (std::size_t i = 0; i < m_[k].size(); ++i) {
                m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
                w[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
            }
        }
    }

private:
    std::vector<NamedTensor> params_;
    double lr_, beta1_, beta2_, eps_;
    std::size_t t_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

} // namespace ffcdnn::model
