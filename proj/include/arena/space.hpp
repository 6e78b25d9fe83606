#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace arena {

/// One discrete tunable parameter: a name and its ordered admissible values.
/// Values are opaque tokens at this layer; runners decide what they mean.
struct ParameterDef {
    std::string name;
    std::vector<std::string> values;
};

/// A point in the search space: per-parameter value indices plus the
/// row-major 1-D index they map to.
struct Configuration {
    std::vector<std::uint32_t> indices;
    std::uint64_t linear_index = 0;
};

/// Half-open range of linear indices [lo, hi).
struct IndexRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    std::uint64_t size() const { return hi - lo; }
    bool contains(std::uint64_t i) const { return i >= lo && i < hi; }
};

/// The Cartesian product of all parameters' value sets, linearized row-major
/// over the declared parameter order (first parameter varies slowest).
/// Immutable after construction.
class SearchSpace {
public:
    explicit SearchSpace(std::vector<ParameterDef> params);

    std::size_t dimension() const { return params_.size(); }
    std::uint64_t size() const { return size_; }
    const std::vector<ParameterDef>& params() const { return params_; }
    const ParameterDef& param(std::size_t i) const { return params_[i]; }
    IndexRange full_range() const { return {0, size_}; }

    std::uint64_t linearize(std::span<const std::uint32_t> indices) const;
    Configuration delinearize(std::uint64_t linear_index) const;

private:
    std::vector<ParameterDef> params_;
    std::uint64_t size_;
};

/// Equal split of a contiguous 1-D index range into k chunks whose sizes
/// differ by at most one; the first (size % k) chunks take the extra element.
/// Region ids are 0..k-1 in index order.
class RegionPartition {
public:
    RegionPartition(IndexRange range, std::uint64_t count);

    std::uint64_t count() const { return count_; }
    IndexRange full_range() const { return range_; }

    std::uint64_t region_of(std::uint64_t linear_index) const;
    IndexRange region_range(std::uint64_t region) const;
    std::uint64_t region_size(std::uint64_t region) const { return region_range(region).size(); }

private:
    IndexRange range_;
    std::uint64_t count_;
    std::uint64_t base_;   // floor(size / count)
    std::uint64_t extra_;  // size % count; first `extra_` regions hold base_+1
};

RegionPartition partition_regions(const SearchSpace& space, std::uint64_t n_r);
RegionPartition partition_subspaces(const SearchSpace& space, std::uint64_t n_sub);

} // namespace arena
