#include "alsim/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace alsim {

namespace {

void require_multiclass(const ClassDistribution& p, const char* scorer) {
    if (p.size() < 2) {
        throw std::domain_error(std::string(scorer) +
                                " is undefined for fewer than two categories");
    }
}

}  // namespace

std::string to_string(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::kMargin: return "margin";
        case ScorerKind::kVariance: return "variance";
        case ScorerKind::kEntropy: return "entropy";
        case ScorerKind::kRandom: return "random";
    }
    return "unknown";
}

std::optional<ScorerKind> parse_scorer(const std::string& name) {
    if (name == "margin") return ScorerKind::kMargin;
    if (name == "variance") return ScorerKind::kVariance;
    if (name == "entropy") return ScorerKind::kEntropy;
    if (name == "random") return ScorerKind::kRandom;
    return std::nullopt;
}

BoxScore margin_score(const ClassDistribution& p) {
    require_multiclass(p, "margin score");
    double best = -1.0;
    double second = -1.0;
    for (double value : p.probs) {
        if (value > best) {
            second = best;
            best = value;
        } else if (value > second) {
            second = value;
        }
    }
    return 1.0 - (best - second);
}

BoxScore variance_score(const ClassDistribution& p) {
    require_multiclass(p, "variance score");
    const double d = static_cast<double>(p.size());
    const double mean = 1.0 / d;
    double sum_sq = 0.0;
    for (double value : p.probs) {
        const double dev = value - mean;
        sum_sq += dev * dev;
    }
    return 1.0 - sum_sq / (d - 1.0);
}

BoxScore entropy_score(const ClassDistribution& p) {
    require_multiclass(p, "entropy score");
    double bits = 0.0;
    for (double value : p.probs) {
        if (value > 0.0) {
            bits -= value * std::log2(value);
        }
    }
    return bits / std::log2(static_cast<double>(p.size()));
}

BoxScore random_score(DetRng& rng) {
    return rng.next_double();
}

std::vector<BoxScore> score_boxes(const ImagePrediction& prediction, ScorerKind kind,
                                  DetRng& rng) {
    std::vector<BoxScore> scores;
    scores.reserve(prediction.detections.size());
    for (const auto& det : prediction.detections) {
        switch (kind) {
            case ScorerKind::kMargin:
                scores.push_back(margin_score(det.distribution));
                break;
            case ScorerKind::kVariance:
                scores.push_back(variance_score(det.distribution));
                break;
            case ScorerKind::kEntropy:
                scores.push_back(entropy_score(det.distribution));
                break;
            case ScorerKind::kRandom:
                scores.push_back(random_score(rng));
                break;
        }
    }
    return scores;
}

}  // namespace alsim
