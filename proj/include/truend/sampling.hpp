#pragma once

#include "truend/types.hpp"

#include <cstdint>

namespace truend {

// Draws n_accounts whole loan histories uniformly without replacement.
// Selection: loans sorted by loan_id, then a partial Fisher-Yates shuffle
// driven by Xoshiro256ss(seed); the first n_accounts slots are kept.
// Deterministic for a fixed seed regardless of input layout.
Portfolio subsample_clustered(const Portfolio& portfolio,
                              std::size_t n_accounts, std::uint64_t seed);

}  // namespace truend
