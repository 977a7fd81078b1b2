#include "cbsars/core.hpp"

namespace cbsars {

RankingPermutation::RankingPermutation(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::vector<bool> seen(indices_.size(), false);
    for (const auto i : indices_) {
        if (i >= indices_.size() || seen[i]) {
            throw InvalidInput("ranking is not a permutation");
        }
        seen[i] = true;
    }
}

RankingPermutation RankingPermutation::identity(std::size_t p) {
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return RankingPermutation(std::move(idx));
}

}  // namespace cbsars
