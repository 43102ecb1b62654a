#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace qsync {

// Bookkeeping for a tensor-product Hilbert space: the ordered local
// dimensions and the derived strides of the composite index.
// Site 0 is the slowest-varying index, matching kron(A, B) layout.
class HilbertStructure {
public:
    HilbertStructure() = default;

    explicit HilbertStructure(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty())
            throw std::invalid_argument("HilbertStructure: empty dimension list");
        for (int d : dims_) {
            if (d < 2)
                throw std::invalid_argument("HilbertStructure: local dimension must be >= 2");
        }
        strides_.resize(dims_.size());
        long long total = 1;
        for (std::size_t i = dims_.size(); i-- > 0;) {
            strides_[i] = static_cast<int>(total);
            total *= dims_[i];
            if (total > (1LL << 30))
                throw std::invalid_argument("HilbertStructure: composite dimension overflow");
        }
        total_dim_ = static_cast<int>(total);
    }

    int num_sites() const { return static_cast<int>(dims_.size()); }
    int dim(int site) const { return dims_.at(static_cast<std::size_t>(site)); }
    int stride(int site) const { return strides_.at(static_cast<std::size_t>(site)); }
    int total_dim() const { return total_dim_; }
    const std::vector<int>& dims() const { return dims_; }

    bool operator==(const HilbertStructure& other) const { return dims_ == other.dims_; }
    bool operator!=(const HilbertStructure& other) const { return !(*this == other); }

    void check_site(int site) const {
        if (site < 0 || site >= num_sites())
            throw std::out_of_range("HilbertStructure: site index out of range");
    }

    // Decompose a composite basis index into per-site indices.
    std::vector<int> unpack(int index) const {
        std::vector<int> local(dims_.size());
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            local[i] = (index / strides_[i]) % dims_[i];
        }
        return local;
    }

private:
    std::vector<int> dims_;
    std::vector<int> strides_;
    int total_dim_ = 0;
};

}  // namespace qsync
