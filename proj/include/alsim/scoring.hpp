#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alsim/rng.hpp"
#include "alsim/types.hpp"

namespace alsim {

// Per-box active-learning score. Margin and entropy lie in [0,1], variance
// in [1 - 1/D, 1], random in [0,1). Higher means more informative.
using BoxScore = double;

enum class ScorerKind {
    kMargin,
    kVariance,
    kEntropy,
    kRandom,
};

std::string to_string(ScorerKind kind);
std::optional<ScorerKind> parse_scorer(const std::string& name);

// 1-vs-2 uncertainty: 1 - (p_d1 - p_d2) for the two largest entries.
// A top-two tie scores 1; full confidence scores 0. Requires D >= 2.
BoxScore margin_score(const ClassDistribution& p);

// 1 - 1/(D-1) * sum_d (p_d - 1/D)^2. The uniform distribution scores 1,
// a one-hot distribution scores 1 - 1/D. Requires D >= 2.
BoxScore variance_score(const ClassDistribution& p);

// Normalized Shannon entropy -sum_d p_d log2(p_d) / log2(D), with the
// 0 * log2(0) = 0 convention. Requires D >= 2.
BoxScore entropy_score(const ClassDistribution& p);

// Uniform draw in [0,1); deterministic given the generator state.
BoxScore random_score(DetRng& rng);

// Applies the chosen scorer to every detection of one image. For the random
// scorer the caller must pass the image's own derived generator so results
// do not depend on scheduling order.
std::vector<BoxScore> score_boxes(const ImagePrediction& prediction, ScorerKind kind,
                                  DetRng& rng);

}  // namespace alsim
