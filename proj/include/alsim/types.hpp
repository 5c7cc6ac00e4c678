#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace alsim {

// Input files that do not parse at all.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed input that violates a domain invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A detector adapter or oracle broke the exchange contract.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unusable experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probability vectors must sum to 1 within this tolerance; larger deviations
// indicate a broken exporter and are rejected.
inline constexpr double kProbSumTolerance = 1e-6;

// Below this deviation a distribution is treated as already normalized and
// left bit-for-bit untouched, so that writing and re-reading a prediction
// file cannot perturb scores.
inline constexpr double kProbSumNoopTolerance = 1e-12;

// Ordered, immutable set of foreground category names.
struct CategorySet {
    std::vector<std::string> names;

    std::size_t size() const { return names.size(); }
};

// Axis-aligned box with corner coordinates in continuous pixel units.
struct BoxGeometry {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }

    bool valid() const {
        return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
               std::isfinite(y_max) && x_min < x_max && y_min < y_max;
    }

    bool operator==(const BoxGeometry&) const = default;
};

// Probability vector over the D foreground categories of one detection.
struct ClassDistribution {
    std::vector<double> probs;

    // Validates entries and sum, renormalizing when the sum deviates from 1
    // by at most kProbSumTolerance. `context` names the record in errors.
    static ClassDistribution validated(std::vector<double> probs, const std::string& context);

    std::size_t size() const { return probs.size(); }
    double max_prob() const;
    std::size_t argmax() const;  // ties resolved to the lowest index

    bool operator==(const ClassDistribution&) const = default;
};

struct Detection {
    BoxGeometry geometry;
    ClassDistribution distribution;
    double confidence = 0.0;  // always the maximum entry of `distribution`

    static Detection make(BoxGeometry geometry, ClassDistribution distribution);
    std::size_t predicted_class() const { return distribution.argmax(); }

    bool operator==(const Detection&) const = default;
};

struct ImagePrediction {
    std::string image_id;
    std::vector<Detection> detections;

    bool operator==(const ImagePrediction&) const = default;
};

struct GroundTruthBox {
    BoxGeometry geometry;
    int category = 1;  // 1-based index into CategorySet

    bool operator==(const GroundTruthBox&) const = default;
};

struct GroundTruthAnnotation {
    std::string image_id;
    std::vector<GroundTruthBox> boxes;

    bool operator==(const GroundTruthAnnotation&) const = default;
};

// A full annotated dataset: category set, image ids, and per-image ground
// truth. Immutable after loading; safe to share across threads.
struct DatasetIndex {
    CategorySet categories;
    std::vector<std::string> images;
    std::map<std::string, GroundTruthAnnotation> annotations;

    bool has_image(const std::string& image_id) const;

    // Ground truth for an image; images without a record annotate as empty.
    GroundTruthAnnotation annotation_for(const std::string& image_id) const;

    // Enforces all invariants (unique ids, category range, box validity).
    void validate() const;
};

}  // namespace alsim
