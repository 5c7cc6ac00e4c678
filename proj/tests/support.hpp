#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "alsim/rng.hpp"
#include "alsim/types.hpp"

namespace testsupport {

// Unique scratch directory under the system temp root, removed on scope exit.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        const auto base = std::filesystem::temp_directory_path();
        do {
            path_ = base / ("alsim-test-" + std::to_string(::getpid()) + "-" +
                            std::to_string(counter++));
        } while (std::filesystem::exists(path_));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline alsim::ClassDistribution dist(std::vector<double> probs) {
    return alsim::ClassDistribution::validated(std::move(probs), "test fixture");
}

inline alsim::Detection det(const alsim::BoxGeometry& box, std::vector<double> probs) {
    return alsim::Detection::make(box, dist(std::move(probs)));
}

// Uniform point on the D-simplex: normalized unit exponentials.
inline std::vector<double> random_simplex(alsim::DetRng& rng, std::size_t d) {
    std::vector<double> probs(d);
    double sum = 0.0;
    for (double& p : probs) {
        p = -std::log(1.0 - rng.next_double());
        sum += p;
    }
    for (double& p : probs) {
        p /= sum;
    }
    return probs;
}

// ---- independent evaluation reference ------------------------------------
// Deliberately structured differently from the library: clamp-based overlap,
// insertion-sorted confidence order, linear GT scans, O(n^2) precision
// envelopes.

struct RefOutcome {
    double confidence = 0.0;
    bool true_positive = false;
};

inline double ref_iou(const alsim::BoxGeometry& a, const alsim::BoxGeometry& b) {
    const double left = a.x_min > b.x_min ? a.x_min : b.x_min;
    const double right = a.x_max < b.x_max ? a.x_max : b.x_max;
    const double top = a.y_min > b.y_min ? a.y_min : b.y_min;
    const double bottom = a.y_max < b.y_max ? a.y_max : b.y_max;
    const double w = right - left;
    const double h = bottom - top;
    if (w <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    const double inter = w * h;
    const double union_area = (a.x_max - a.x_min) * (a.y_max - a.y_min) +
                              (b.x_max - b.x_min) * (b.y_max - b.y_min) - inter;
    return inter / union_area;
}

inline std::vector<RefOutcome> ref_match(
    const std::vector<std::pair<alsim::BoxGeometry, double>>& detections,
    const std::vector<alsim::BoxGeometry>& ground_truths, double threshold) {
    // Stable insertion sort by descending confidence keeps input order on ties.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        std::size_t pos = order.size();
        while (pos > 0 && detections[order[pos - 1]].second < detections[i].second) {
            pos--;
        }
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), i);
    }

    std::vector<bool> claimed(ground_truths.size(), false);
    std::vector<RefOutcome> outcomes;
    for (const std::size_t det_index : order) {
        const auto& [box, confidence] = detections[det_index];
        double best = -1.0;
        std::size_t best_gt = ground_truths.size();
        for (std::size_t g = 0; g < ground_truths.size(); ++g) {
            if (claimed[g]) {
                continue;
            }
            const double overlap = ref_iou(box, ground_truths[g]);
            if (overlap > best) {
                best = overlap;
                best_gt = g;
            }
        }
        RefOutcome outcome;
        outcome.confidence = confidence;
        if (best_gt < ground_truths.size() && best >= threshold) {
            claimed[best_gt] = true;
            outcome.true_positive = true;
        }
        outcomes.push_back(outcome);
    }
    return outcomes;
}

// All-points AP: sum over recall steps of the best precision at or beyond
// that step, scanned quadratically.
inline double ref_ap_all_points(const std::vector<RefOutcome>& outcomes, std::size_t gt_count) {
    if (gt_count == 0) {
        return 0.0;
    }
    std::vector<double> recalls;
    std::vector<double> precisions;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].true_positive) {
            tp++;
        }
        recalls.push_back(static_cast<double>(tp) / static_cast<double>(gt_count));
        precisions.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    }
    double ap = 0.0;
    double previous_recall = 0.0;
    for (std::size_t i = 0; i < recalls.size(); ++i) {
        double envelope = 0.0;
        for (std::size_t j = i; j < precisions.size(); ++j) {
            envelope = std::max(envelope, precisions[j]);
        }
        ap += (recalls[i] - previous_recall) * envelope;
        previous_recall = recalls[i];
    }
    return ap;
}

inline double ref_ap_eleven_point(const std::vector<RefOutcome>& outcomes, std::size_t gt_count) {
    if (gt_count == 0) {
        return 0.0;
    }
    std::vector<double> recalls;
    std::vector<double> precisions;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].true_positive) {
            tp++;
        }
        recalls.push_back(static_cast<double>(tp) / static_cast<double>(gt_count));
        precisions.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    }
    double total = 0.0;
    for (int level = 0; level <= 10; ++level) {
        const double target = static_cast<double>(level) / 10.0;
        double best = 0.0;
        for (std::size_t i = 0; i < recalls.size(); ++i) {
            if (recalls[i] >= target) {
                best = std::max(best, precisions[i]);
            }
        }
        total += best;
    }
    return total / 11.0;
}

}  // namespace testsupport
