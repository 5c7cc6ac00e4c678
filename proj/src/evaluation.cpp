#include "alsim/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace alsim {

double iou(const BoxGeometry& a, const BoxGeometry& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) {
        return 0.0;
    }
    const double intersection = ix * iy;
    return intersection / (a.area() + b.area() - intersection);
}

void MatchResult::merge(const MatchResult& other) {
    detections.insert(detections.end(), other.detections.begin(), other.detections.end());
    gt_count += other.gt_count;
}

MatchResult match_detections(const std::vector<std::pair<BoxGeometry, double>>& detections,
                             const std::vector<BoxGeometry>& ground_truths,
                             double threshold) {
    if (threshold <= 0.0 || threshold > 1.0) {
        throw std::domain_error("IoU threshold must lie in (0, 1]");
    }
    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].second > detections[b].second;
    });

    // Outcomes are emitted in descending confidence order, the order the PR
    // curve consumes them.
    MatchResult result;
    result.gt_count = ground_truths.size();
    result.detections.reserve(detections.size());
    std::vector<bool> claimed(ground_truths.size(), false);
    for (std::size_t idx : order) {
        const auto& [box, confidence] = detections[idx];
        double best_iou = 0.0;
        std::size_t best_gt = ground_truths.size();
        for (std::size_t g = 0; g < ground_truths.size(); ++g) {
            if (claimed[g]) {
                continue;
            }
            const double overlap = iou(box, ground_truths[g]);
            if (overlap > best_iou) {  // strict: ties keep the earliest index
                best_iou = overlap;
                best_gt = g;
            }
        }
        DetectionOutcome outcome;
        outcome.confidence = confidence;
        if (best_gt < ground_truths.size() && best_iou >= threshold) {
            outcome.true_positive = true;
            claimed[best_gt] = true;
        }
        result.detections.push_back(outcome);
    }
    return result;
}

PRCurve compute_pr_curve(const MatchResult& matches) {
    std::vector<DetectionOutcome> outcomes = matches.detections;
    std::stable_sort(outcomes.begin(), outcomes.end(),
                     [](const DetectionOutcome& a, const DetectionOutcome& b) {
                         return a.confidence > b.confidence;
                     });
    PRCurve curve;
    curve.points.reserve(outcomes.size());
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const auto& outcome : outcomes) {
        if (outcome.true_positive) {
            ++tp;
        } else {
            ++fp;
        }
        PRPoint point;
        point.recall = matches.gt_count == 0
                           ? 0.0
                           : static_cast<double>(tp) / static_cast<double>(matches.gt_count);
        point.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        curve.points.push_back(point);
    }
    return curve;
}

std::string to_string(ApInterpolation interp) {
    switch (interp) {
        case ApInterpolation::kAllPoints: return "all";
        case ApInterpolation::kElevenPoint: return "11point";
    }
    return "unknown";
}

std::optional<ApInterpolation> parse_interpolation(const std::string& name) {
    if (name == "all") return ApInterpolation::kAllPoints;
    if (name == "11point") return ApInterpolation::kElevenPoint;
    return std::nullopt;
}

std::optional<double> average_precision(const MatchResult& matches, ApInterpolation interp) {
    if (matches.gt_count == 0) {
        return std::nullopt;
    }
    const PRCurve curve = compute_pr_curve(matches);
    if (curve.points.empty()) {
        return 0.0;
    }
    // Monotone precision envelope from the right.
    std::vector<double> envelope(curve.points.size());
    double running = 0.0;
    for (std::size_t i = curve.points.size(); i-- > 0;) {
        running = std::max(running, curve.points[i].precision);
        envelope[i] = running;
    }
    if (interp == ApInterpolation::kAllPoints) {
        double ap = 0.0;
        double prev_recall = 0.0;
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            ap += (curve.points[i].recall - prev_recall) * envelope[i];
            prev_recall = curve.points[i].recall;
        }
        return ap;
    }
    double sum = 0.0;
    for (int step = 0; step <= 10; ++step) {
        const double level = static_cast<double>(step) / 10.0;
        double best = 0.0;
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            if (curve.points[i].recall >= level) {
                best = envelope[i];
                break;
            }
        }
        sum += best;
    }
    return sum / 11.0;
}

double mean_ap(const std::vector<ClassAp>& per_class) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& entry : per_class) {
        if (entry.gt_count > 0) {
            sum += entry.ap.value_or(0.0);
            ++counted;
        }
    }
    if (counted == 0) {
        throw std::domain_error("mAP undefined: no class has ground truth");
    }
    return sum / static_cast<double>(counted);
}

EvaluationResult evaluate_predictions(const DatasetIndex& index,
                                      const std::vector<ImagePrediction>& predictions,
                                      const EvaluationOptions& options) {
    std::map<std::string, const ImagePrediction*> by_image;
    for (const auto& prediction : predictions) {
        if (!by_image.emplace(prediction.image_id, &prediction).second) {
            throw ValidationError("duplicate prediction for image '" + prediction.image_id +
                                  "'");
        }
        if (!index.has_image(prediction.image_id)) {
            throw ValidationError("prediction for unknown image '" + prediction.image_id +
                                  "'");
        }
    }

    const std::size_t category_count = index.categories.size();
    std::vector<MatchResult> per_class_matches(category_count);
    // Images are visited in index order so results do not depend on the
    // order of the prediction records.
    for (const auto& image_id : index.images) {
        const GroundTruthAnnotation annotation = index.annotation_for(image_id);
        std::vector<std::vector<BoxGeometry>> gts(category_count);
        for (const auto& box : annotation.boxes) {
            gts[static_cast<std::size_t>(box.category - 1)].push_back(box.geometry);
        }
        std::vector<std::vector<std::pair<BoxGeometry, double>>> dets(category_count);
        auto it = by_image.find(image_id);
        if (it != by_image.end()) {
            for (const auto& det : it->second->detections) {
                dets[det.predicted_class()].emplace_back(det.geometry, det.confidence);
            }
        }
        for (std::size_t c = 0; c < category_count; ++c) {
            if (dets[c].empty() && gts[c].empty()) {
                continue;
            }
            per_class_matches[c].merge(
                match_detections(dets[c], gts[c], options.iou_threshold));
        }
    }

    EvaluationResult result;
    result.per_class.reserve(category_count);
    for (std::size_t c = 0; c < category_count; ++c) {
        ClassAp entry;
        entry.category = index.categories.names[c];
        entry.gt_count = per_class_matches[c].gt_count;
        entry.ap = average_precision(per_class_matches[c], options.interpolation);
        result.per_class.push_back(std::move(entry));
    }
    result.map = mean_ap(result.per_class);
    return result;
}

}  // namespace alsim
