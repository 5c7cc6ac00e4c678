#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alsim/types.hpp"

namespace alsim {

// Intersection-over-union of two valid boxes; symmetric, in [0,1].
double iou(const BoxGeometry& a, const BoxGeometry& b);

struct DetectionOutcome {
    double confidence = 0.0;
    bool true_positive = false;
};

// Outcome of matching one class's detections against its ground truth.
// Mergeable across images of the same class.
struct MatchResult {
    std::vector<DetectionOutcome> detections;
    std::size_t gt_count = 0;

    void merge(const MatchResult& other);
};

// Greedy matching in descending confidence order: each detection claims the
// still-unmatched ground-truth box with the highest IoU if that IoU reaches
// the threshold (true positive), otherwise it is a false positive.
// Deterministic: IoU ties go to the earliest ground-truth index, confidence
// ties keep input order.
MatchResult match_detections(const std::vector<std::pair<BoxGeometry, double>>& detections,
                             const std::vector<BoxGeometry>& ground_truths, double threshold);

struct PRPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points;  // recall non-decreasing
};

PRCurve compute_pr_curve(const MatchResult& matches);

enum class ApInterpolation {
    kAllPoints,   // continuous area under the monotone precision envelope
    kElevenPoint  // mean of interpolated precision at recall 0.0, 0.1, ... 1.0
};

std::string to_string(ApInterpolation interp);
std::optional<ApInterpolation> parse_interpolation(const std::string& name);

// Area under the precision-recall curve for one class; 0 when the class has
// ground truth but no true positives. Undefined (nullopt) without ground
// truth.
std::optional<double> average_precision(const MatchResult& matches,
                                        ApInterpolation interp = ApInterpolation::kAllPoints);

struct ClassAp {
    std::string category;
    std::size_t gt_count = 0;
    std::optional<double> ap;  // absent when the class has no ground truth
};

// Unweighted mean over classes with at least one ground-truth box.
double mean_ap(const std::vector<ClassAp>& per_class);

struct EvaluationOptions {
    double iou_threshold = 0.5;
    ApInterpolation interpolation = ApInterpolation::kAllPoints;
};

struct EvaluationResult {
    std::vector<ClassAp> per_class;
    double map = 0.0;
};

// Full VOC-style evaluation of predictions against a dataset. Detections
// are assigned to their argmax class; confidence is the maximum probability.
EvaluationResult evaluate_predictions(const DatasetIndex& index,
                                      const std::vector<ImagePrediction>& predictions,
                                      const EvaluationOptions& options = {});

}  // namespace alsim
