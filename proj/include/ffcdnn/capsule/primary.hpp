#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ffcdnn/error.hpp"

namespace ffcdnn::capsule {

/// Where one primary-capsule component came from.
struct Provenance {
    bool padding = false;
    std::size_t branch = 0;  // 0 = LAI, 1 = LCC
    std::size_t feature = 0; // index into the concatenated feature vector
};

/// Groups a concatenated feature vector into capsules of `dim` scalars.
/// Each branch is chunked separately (the last chunk of a branch is zero
/// padded), so every capsule holds features of a single branch.
class CapsuleLayout {
public:
    CapsuleLayout() = default;
    CapsuleLayout(std::vector<std::size_t> branch_sizes, std::size_t dim) : branch_sizes_(std::move(branch_sizes)), dim_(dim) {
        if (dim == 0) throw InvalidArgument("capsule layout: capsule dimension must be positive");
        std::size_t offset = 0;
        for (std::size_t br = 0; br < branch_sizes_.size(); ++br) {
            const std::size_t n = branch_sizes_[br];
            const std::size_t caps = (n + dim - 1) / dim;
            for (std::size_t i = 0; i < caps * dim; ++i) {
                if (i < n) prov_.push_back({false, br, offset + i});
                else prov_.push_back({true, br, 0});
            }
            capsule_branch_.insert(capsule_branch_.end(), caps, br);
            offset += n;
        }
        features_ = offset;
        if (capsule_branch_.empty()) throw InvalidArgument("capsule layout: no features");
    }

    std::size_t capsules() const noexcept { return capsule_branch_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t features() const noexcept { return features_; }
    std::size_t capsule_branch(std::size_t i) const { return capsule_branch_.at(i); }
    /// Provenance of component (capsule i, element d) at i * dim + d.
    const std::vector<Provenance>& provenance() const noexcept { return prov_; }

    std::vector<double> pack(std::span<const double> features) const {
        if (features.size() != features_) throw InvalidArgument("capsule layout: feature count mismatch");
        std::vector<double> out(prov_.size(), 0.0);
        for (std::size_t i = 0; i < prov_.size(); ++i)
            if (!prov_[i].padding) out[i] = features[prov_[i].feature];
        return out;
    }

    /// Adjoint of pack: routes capsule gradients back to features.
    void unpack_grad(std::span<const double> dcaps, std::span<double> dfeatures) const {
        for (std::size_t i = 0; i < prov_.size(); ++i)
            if (!prov_[i].padding) dfeatures[prov_[i].feature] += dcaps[i];
    }

private:
    std::vector<std::size_t> branch_sizes_;
    std::size_t dim_ = 0;
    std::size_t features_ = 0;
    std::vector<Provenance> prov_;
    std::vector<std::size_t> capsule_branch_;
};

} // namespace ffcdnn::capsule
