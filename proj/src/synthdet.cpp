#include "alsim/synthdet.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace alsim {
namespace {

// Amplitude of the zero-sum perturbation mixed into class distributions.
// Scaled by w * (1 - w) so both extremes stay exact: uniform at w = 0 and
// one-hot at w = 1.
constexpr double kProbNoise = 0.2;

double clamp01(double v) {
    return std::min(1.0, std::max(0.0, v));
}

void require_range(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string("synthetic detector: ") + name + " must lie in [0, 1]");
    }
}

// Blend of one-hot on true_class, uniform, and a zero-mean perturbation,
// clamped to stay nonnegative and renormalized.
ClassDistribution blended_distribution(std::size_t true_class,
                                       std::size_t n_categories,
                                       double weight,
                                       DetRng& rng) {
    std::vector<double> noise(n_categories);
    double noise_mean = 0.0;
    for (double& u : noise) {
        u = rng.next_double();
        noise_mean += u;
    }
    noise_mean /= static_cast<double>(n_categories);

    const double amplitude = kProbNoise * weight * (1.0 - weight);
    const double base = (1.0 - weight) / static_cast<double>(n_categories);
    std::vector<double> probs(n_categories);
    double sum = 0.0;
    for (std::size_t d = 0; d < n_categories; ++d) {
        double p = (d == true_class ? weight : 0.0) + base + amplitude * (noise[d] - noise_mean);
        p = std::max(p, 0.0);
        probs[d] = p;
        sum += p;
    }
    // sum >= weight + base - amplitude > 0 for every valid weight.
    if (sum != 1.0) {
        for (double& p : probs) {
            p /= sum;
        }
    }
    return ClassDistribution::validated(std::move(probs), "synthetic detection");
}

// Center/size perturbation scaled by the box's own dimensions. jitter == 0
// keeps the exact input geometry; the draws are consumed either way so the
// stream layout does not depend on skill.
BoxGeometry jittered_geometry(const BoxGeometry& box, double jitter, DetRng& rng) {
    const double dx = rng.next_signed() * jitter * box.width();
    const double dy = rng.next_signed() * jitter * box.height();
    const double scale_w = std::max(0.05, 1.0 + rng.next_signed() * jitter);
    const double scale_h = std::max(0.05, 1.0 + rng.next_signed() * jitter);
    if (jitter == 0.0) {
        return box;
    }
    const double cx = 0.5 * (box.x_min + box.x_max) + dx;
    const double cy = 0.5 * (box.y_min + box.y_max) + dy;
    const double half_w = 0.5 * box.width() * scale_w;
    const double half_h = 0.5 * box.height() * scale_h;
    return BoxGeometry{cx - half_w, cy - half_h, cx + half_w, cy + half_h};
}

// A spurious box derived from a real one: shifted by up to 1.5 box sizes and
// rescaled by a factor in [0.5, 1.5).
BoxGeometry false_positive_geometry(const BoxGeometry& box, DetRng& rng) {
    const double dx = rng.next_signed() * 1.5 * box.width();
    const double dy = rng.next_signed() * 1.5 * box.height();
    const double scale_w = std::max(0.05, 0.5 + rng.next_double());
    const double scale_h = std::max(0.05, 0.5 + rng.next_double());
    const double cx = 0.5 * (box.x_min + box.x_max) + dx;
    const double cy = 0.5 * (box.y_min + box.y_max) + dy;
    const double half_w = 0.5 * box.width() * scale_w;
    const double half_h = 0.5 * box.height() * scale_h;
    return BoxGeometry{cx - half_w, cy - half_h, cx + half_w, cy + half_h};
}

}  // namespace

void SynthDetectorParams::validate() const {
    require_range(skill_floor, "skill_floor");
    require_range(skill_ceiling, "skill_ceiling");
    if (skill_floor > skill_ceiling) {
        throw ConfigError("synthetic detector: skill_floor must not exceed skill_ceiling");
    }
    require_range(box_jitter, "box_jitter");
    require_range(miss_rate_at_floor, "miss_rate_at_floor");
    require_range(false_positive_rate_at_floor, "false_positive_rate_at_floor");
    if (!(concentration_at_ceiling > 0.0)) {
        throw ConfigError("synthetic detector: concentration_at_ceiling must be positive");
    }
}

double skill_at(double fraction, const SynthDetectorParams& params) {
    const double f = clamp01(fraction);
    return params.skill_floor + (params.skill_ceiling - params.skill_floor) * std::sqrt(f);
}

double skill_at(std::size_t n_labeled, std::size_t n_total, const SynthDetectorParams& params) {
    if (n_total < 1 || n_labeled > n_total) {
        throw std::domain_error("skill requires 0 <= n_labeled <= n_total with n_total >= 1");
    }
    return skill_at(static_cast<double>(n_labeled) / static_cast<double>(n_total), params);
}

SkillProfile make_skill_profile(const SynthDetectorParams& params,
                                const DatasetIndex& train,
                                const std::vector<GroundTruthAnnotation>& labeled) {
    const std::size_t n_categories = train.categories.size();
    SkillProfile profile;
    profile.per_class.assign(n_categories, 0.0);

    if (!params.class_conditional) {
        const std::size_t total = train.images.size();
        const double fraction =
            total == 0 ? 0.0 : static_cast<double>(labeled.size()) / static_cast<double>(total);
        const double s = skill_at(fraction, params);
        std::fill(profile.per_class.begin(), profile.per_class.end(), s);
        profile.overall = s;
        return profile;
    }

    std::vector<std::size_t> total_boxes(n_categories, 0);
    std::vector<std::size_t> labeled_boxes(n_categories, 0);
    for (const auto& [image_id, annotation] : train.annotations) {
        for (const GroundTruthBox& box : annotation.boxes) {
            total_boxes[static_cast<std::size_t>(box.category - 1)]++;
        }
    }
    for (const GroundTruthAnnotation& annotation : labeled) {
        for (const GroundTruthBox& box : annotation.boxes) {
            labeled_boxes[static_cast<std::size_t>(box.category - 1)]++;
        }
    }

    double sum = 0.0;
    for (std::size_t d = 0; d < n_categories; ++d) {
        const double fraction =
            total_boxes[d] == 0
                ? 0.0
                : static_cast<double>(labeled_boxes[d]) / static_cast<double>(total_boxes[d]);
        profile.per_class[d] = skill_at(fraction, params);
        sum += profile.per_class[d];
    }
    profile.overall = n_categories == 0 ? 0.0 : sum / static_cast<double>(n_categories);
    return profile;
}

ImagePrediction synth_predict(const GroundTruthAnnotation& annotation,
                              std::size_t n_categories,
                              const SkillProfile& profile,
                              const SynthDetectorParams& params,
                              std::size_t n_labeled) {
    if (n_categories < 2) {
        throw ValidationError("synthetic detector requires at least two categories");
    }
    if (profile.per_class.size() != n_categories) {
        throw ValidationError("skill profile size does not match category count");
    }

    DetRng rng = DetRng::derive(params.seed, annotation.image_id, n_labeled);
    ImagePrediction prediction;
    prediction.image_id = annotation.image_id;

    for (const GroundTruthBox& box : annotation.boxes) {
        const std::size_t cls = static_cast<std::size_t>(box.category - 1);
        const double s = profile.per_class[cls];

        const bool missed = rng.next_double() < params.miss_rate_at_floor * (1.0 - s);
        if (!missed) {
            const BoxGeometry geometry =
                jittered_geometry(box.geometry, params.box_jitter * (1.0 - s), rng);
            const double weight = clamp01(s * params.concentration_at_ceiling);
            prediction.detections.push_back(
                Detection::make(geometry, blended_distribution(cls, n_categories, weight, rng)));
        }

        const bool spurious =
            rng.next_double() < params.false_positive_rate_at_floor * (1.0 - profile.overall);
        if (spurious) {
            const std::size_t fp_class = rng.next_index(n_categories);
            const BoxGeometry geometry = false_positive_geometry(box.geometry, rng);
            const double weight =
                clamp01(profile.per_class[fp_class] * params.concentration_at_ceiling) * 0.5;
            prediction.detections.push_back(
                Detection::make(geometry, blended_distribution(fp_class, n_categories, weight, rng)));
        }
    }
    return prediction;
}

SyntheticDetector::SyntheticDetector(SynthDetectorParams params,
                                     const DatasetIndex& train,
                                     const DatasetIndex& val)
    : params_(params), train_(train), val_(val) {
    params_.validate();
}

AdapterOutput SyntheticDetector::predict(const std::vector<GroundTruthAnnotation>& labeled,
                                         const std::vector<std::string>& pool_ids) {
    const SkillProfile profile = make_skill_profile(params_, train_, labeled);
    const std::size_t n_categories = train_.categories.size();
    const std::size_t n_labeled = labeled.size();

    AdapterOutput output;
    output.pool.reserve(pool_ids.size());
    for (const std::string& image_id : pool_ids) {
        output.pool.push_back(synth_predict(train_.annotation_for(image_id), n_categories, profile,
                                            params_, n_labeled));
    }
    output.validation.reserve(val_.images.size());
    for (const std::string& image_id : val_.images) {
        output.validation.push_back(synth_predict(val_.annotation_for(image_id), n_categories,
                                                  profile, params_, n_labeled));
    }
    return output;
}

}  // namespace alsim
