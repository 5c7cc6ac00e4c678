#include "alsim/accumulate.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace alsim {

std::string to_string(AccumulatorKind kind) {
    switch (kind) {
        case AccumulatorKind::kMean: return "mean";
        case AccumulatorKind::kSum: return "sum";
        case AccumulatorKind::kMax: return "max";
    }
    return "unknown";
}

std::optional<AccumulatorKind> parse_accumulator(const std::string& name) {
    if (name == "mean") return AccumulatorKind::kMean;
    if (name == "sum") return AccumulatorKind::kSum;
    if (name == "max") return AccumulatorKind::kMax;
    return std::nullopt;
}

double accumulate(const std::vector<BoxScore>& scores, AccumulatorKind kind) {
    if (scores.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    double max = scores.front();
    for (double score : scores) {
        sum += score;
        max = std::max(max, score);
    }
    switch (kind) {
        case AccumulatorKind::kMean: return sum / static_cast<double>(scores.size());
        case AccumulatorKind::kSum: return sum;
        case AccumulatorKind::kMax: return max;
    }
    throw std::logic_error("unreachable accumulator kind");
}

std::vector<ImageScore> score_pool(const std::vector<ImagePrediction>& predictions,
                                   const PoolScoringOptions& options, std::uint64_t seed) {
    std::vector<ImageScore> result;
    result.reserve(predictions.size());
    for (const auto& prediction : predictions) {
        ImagePrediction filtered;
        filtered.image_id = prediction.image_id;
        for (const auto& det : prediction.detections) {
            if (det.confidence >= options.confidence_threshold) {
                filtered.detections.push_back(det);
            }
        }
        ImageScore score;
        score.image_id = prediction.image_id;
        score.n_boxes = filtered.detections.size();
        if (filtered.detections.empty()) {
            score.value = options.empty_image_score;
        } else {
            DetRng rng = DetRng::derive(seed, prediction.image_id);
            score.value = accumulate(score_boxes(filtered, options.scorer, rng),
                                     options.accumulator);
        }
        result.push_back(std::move(score));
    }
    return result;
}

RankedPool rank(std::vector<ImageScore> scores) {
    std::set<std::string> seen;
    for (const auto& score : scores) {
        if (!seen.insert(score.image_id).second) {
            throw ValidationError("duplicate image id '" + score.image_id +
                                  "' in pool scores");
        }
    }
    std::sort(scores.begin(), scores.end(), [](const ImageScore& a, const ImageScore& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.image_id < b.image_id;
    });
    return RankedPool{std::move(scores)};
}

std::vector<std::string> select_top(const RankedPool& pool, std::size_t L) {
    if (L < 1) {
        throw std::domain_error("selection size must be at least 1");
    }
    const std::size_t count = std::min(L, pool.entries.size());
    std::vector<std::string> ids;
    ids.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ids.push_back(pool.entries[i].image_id);
    }
    return ids;
}

}  // namespace alsim
