#include "alsim/types.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace alsim {

ClassDistribution ClassDistribution::validated(std::vector<double> probs,
                                               const std::string& context) {
    if (probs.empty()) {
        throw ValidationError(context + ": empty probability vector");
    }
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw ValidationError(context + ": probability entry " + std::to_string(p) +
                                  " outside [0,1]");
        }
    }
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    const double deviation = std::abs(sum - 1.0);
    if (deviation > kProbSumTolerance) {
        throw ValidationError(context + ": probabilities sum to " + std::to_string(sum) +
                              ", deviation exceeds tolerance " +
                              std::to_string(kProbSumTolerance));
    }
    // Skip the division when the sum is already 1 up to floating-point noise;
    // this keeps load(write(x)) bit-identical to x.
    if (deviation > kProbSumNoopTolerance) {
        for (double& p : probs) {
            p /= sum;
        }
    }
    return ClassDistribution{std::move(probs)};
}

double ClassDistribution::max_prob() const {
    return *std::max_element(probs.begin(), probs.end());
}

std::size_t ClassDistribution::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
}

Detection Detection::make(BoxGeometry geometry, ClassDistribution distribution) {
    Detection det;
    det.geometry = geometry;
    det.confidence = distribution.max_prob();
    det.distribution = std::move(distribution);
    return det;
}

bool DatasetIndex::has_image(const std::string& image_id) const {
    return std::find(images.begin(), images.end(), image_id) != images.end();
}

GroundTruthAnnotation DatasetIndex::annotation_for(const std::string& image_id) const {
    auto it = annotations.find(image_id);
    if (it != annotations.end()) {
        return it->second;
    }
    return GroundTruthAnnotation{image_id, {}};
}

void DatasetIndex::validate() const {
    if (categories.size() == 0) {
        throw ValidationError("dataset has no categories");
    }
    {
        std::set<std::string> seen(categories.names.begin(), categories.names.end());
        if (seen.size() != categories.names.size()) {
            throw ValidationError("category names are not unique");
        }
    }
    {
        std::set<std::string> seen;
        for (const auto& id : images) {
            if (!seen.insert(id).second) {
                throw ValidationError("duplicate image id '" + id + "'");
            }
        }
    }
    const int category_count = static_cast<int>(categories.size());
    for (const auto& [image_id, annotation] : annotations) {
        if (!has_image(image_id)) {
            throw ValidationError("annotated image '" + image_id +
                                  "' missing from the image list");
        }
        if (annotation.image_id != image_id) {
            throw ValidationError("annotation keyed under '" + image_id +
                                  "' carries image_id '" + annotation.image_id + "'");
        }
        for (const auto& box : annotation.boxes) {
            if (!box.geometry.valid()) {
                throw ValidationError("image '" + image_id + "': degenerate box [" +
                                      std::to_string(box.geometry.x_min) + ", " +
                                      std::to_string(box.geometry.y_min) + ", " +
                                      std::to_string(box.geometry.x_max) + ", " +
                                      std::to_string(box.geometry.y_max) + "]");
            }
            if (box.category < 1 || box.category > category_count) {
                throw ValidationError("image '" + image_id + "': category index " +
                                      std::to_string(box.category) + " outside [1, " +
                                      std::to_string(category_count) + "]");
            }
        }
    }
}

}  // namespace alsim
