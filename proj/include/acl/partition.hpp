#pragma once

#include <vector>

#include "acl/errors.hpp"

namespace acl {

// Disjoint cover of {0..p-1}. Groups keep their construction order;
// member indices are ascending within each group.
struct GroupPartition {
    std::vector<std::vector<int>> groups;

    int num_groups() const { return static_cast<int>(groups.size()); }
    int size_of(int r) const { return static_cast<int>(groups[static_cast<std::size_t>(r)].size()); }

    int total_size() const;
    int max_group_size() const;

    // group sizes must stay below the sample size for the group solver to
    // be well posed; callers diagnose this, it is not enforced by fits
    bool max_group_size_below(int n) const { return max_group_size() < n; }

    // throws InvalidPartition unless groups disjointly cover {0..p-1}
    void validate(int p) const;

    static GroupPartition singletons(int p);

    // group index for every column; -1 when uncovered (validate rejects that)
    std::vector<int> membership(int p) const;
};

} // namespace acl
