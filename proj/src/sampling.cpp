#include "truend/sampling.hpp"

#include "truend/rng.hpp"

#include <numeric>
#include <utility>
#include <vector>

namespace truend {

Portfolio subsample_clustered(const Portfolio& portfolio,
                              std::size_t n_accounts, std::uint64_t seed) {
    const std::size_t n = portfolio.size();
    if (n_accounts < 1 || n_accounts > n)
        throw DataError("sample size " + std::to_string(n_accounts) +
                        " exceeds portfolio of " + std::to_string(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Xoshiro256ss rng(seed);
    for (std::size_t i = 0; i < n_accounts; ++i) {
        const std::size_t j = i + rng.bounded(n - i);
        std::swap(order[i], order[j]);
    }
    order.resize(n_accounts);

    Portfolio out;
    out.loans.reserve(n_accounts);
    for (std::size_t idx : order) out.loans.push_back(portfolio.loans[idx]);
    out.finalise();
    return out;
}

}  // namespace truend
