#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace recomb {

// The sampled leaves of the depth-t binary tree: N = 2^t configurations
// drawn i.i.d. from the initial distribution.  Everything quenched is a
// function of this object.
struct Environment {
    int n = 0;
    int k = 0;
    int t = 0;
    std::vector<std::uint8_t> leaves;  // N x n, leaf-major
    std::string source;                // free-form descriptor of the law of the leaves

    std::uint64_t leaf_count() const { return std::uint64_t(1) << t; }
    std::uint8_t leaf(std::uint64_t x, int i) const {
        return leaves[x * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i)];
    }
};

}  // namespace recomb
