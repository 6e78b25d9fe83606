#include "arena/space.hpp"

#include "arena/error.hpp"

#include <limits>
#include <unordered_set>

namespace arena {

SearchSpace::SearchSpace(std::vector<ParameterDef> params) : params_(std::move(params)), size_(1) {
    if (params_.empty()) {
        throw InvalidArgument("search space needs at least one parameter");
    }
    for (const auto& p : params_) {
        if (p.values.empty()) {
            throw InvalidArgument("parameter '" + p.name + "' has no values");
        }
        std::unordered_set<std::string> seen(p.values.begin(), p.values.end());
        if (seen.size() != p.values.size()) {
            throw InvalidArgument("parameter '" + p.name + "' has duplicate values");
        }
        const auto count = static_cast<std::uint64_t>(p.values.size());
        if (size_ > std::numeric_limits<std::uint64_t>::max() / count) {
            throw InvalidArgument("search space size overflows 64 bits");
        }
        size_ *= count;
    }
}

std::uint64_t SearchSpace::linearize(std::span<const std::uint32_t> indices) const {
    if (indices.size() != params_.size()) {
        throw InvalidConfiguration("expected " + std::to_string(params_.size()) +
                                   " indices, got " + std::to_string(indices.size()));
    }
    std::uint64_t linear = 0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto count = static_cast<std::uint64_t>(params_[i].values.size());
        if (indices[i] >= count) {
            throw InvalidConfiguration("index " + std::to_string(indices[i]) +
                                       " out of range for parameter '" + params_[i].name + "'");
        }
        linear = linear * count + indices[i];
    }
    return linear;
}

Configuration SearchSpace::delinearize(std::uint64_t linear_index) const {
    if (linear_index >= size_) {
        throw InvalidConfiguration("linear index " + std::to_string(linear_index) +
                                   " out of range for space of size " + std::to_string(size_));
    }
    Configuration cfg;
    cfg.linear_index = linear_index;
    cfg.indices.resize(params_.size());
    for (std::size_t i = params_.size(); i-- > 0;) {
        const auto count = static_cast<std::uint64_t>(params_[i].values.size());
        cfg.indices[i] = static_cast<std::uint32_t>(linear_index % count);
        linear_index /= count;
    }
    return cfg;
}

RegionPartition::RegionPartition(IndexRange range, std::uint64_t count) : range_(range), count_(count) {
    if (count == 0) {
        throw InvalidArgument("partition count must be positive");
    }
    if (count > range.size()) {
        throw TooManyRegions("cannot split " + std::to_string(range.size()) +
                             " configurations into " + std::to_string(count) + " regions");
    }
    base_ = range.size() / count;
    extra_ = range.size() % count;
}

std::uint64_t RegionPartition::region_of(std::uint64_t linear_index) const {
    if (!range_.contains(linear_index)) {
        throw InvalidConfiguration("index " + std::to_string(linear_index) + " outside partitioned range");
    }
    const std::uint64_t offset = linear_index - range_.lo;
    const std::uint64_t boundary = extra_ * (base_ + 1);
    if (offset < boundary) {
        return offset / (base_ + 1);
    }
    return extra_ + (offset - boundary) / base_;
}

IndexRange RegionPartition::region_range(std::uint64_t region) const {
    if (region >= count_) {
        throw InvalidArgument("region id " + std::to_string(region) + " out of range");
    }
    std::uint64_t lo;
    std::uint64_t len;
    if (region < extra_) {
        len = base_ + 1;
        lo = range_.lo + region * len;
    } else {
        len = base_;
        lo = range_.lo + extra_ * (base_ + 1) + (region - extra_) * base_;
    }
    return {lo, lo + len};
}

RegionPartition partition_regions(const SearchSpace& space, std::uint64_t n_r) {
    return RegionPartition(space.full_range(), n_r);
}

RegionPartition partition_subspaces(const SearchSpace& space, std::uint64_t n_sub) {
    return RegionPartition(space.full_range(), n_sub);
}

} // namespace arena
