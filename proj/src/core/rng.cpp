#include "theorygen/core/rng.hpp"

#include <algorithm>
#include <numeric>

namespace theorygen {

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    shuffle(idx);
    if (k > n) k = n;
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace theorygen
