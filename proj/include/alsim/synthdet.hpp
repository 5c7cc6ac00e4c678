#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alsim/adapter.hpp"
#include "alsim/rng.hpp"
#include "alsim/types.hpp"

namespace alsim {

// Degradation knobs for the simulated detector. Every defect rate scales with
// (1 - skill), so a fully trained detector reproduces the ground truth and an
// untrained one is maximally noisy.
struct SynthDetectorParams {
    double skill_floor = 0.15;
    double skill_ceiling = 0.95;
    double box_jitter = 0.25;
    double miss_rate_at_floor = 0.6;
    double false_positive_rate_at_floor = 0.4;
    double concentration_at_ceiling = 1.0;
    std::uint64_t seed = 1234;
    bool class_conditional = false;

    // Throws ConfigError when a knob is out of range.
    void validate() const;
};

// Skill rises with the square root of labeling progress, so early labels help
// the most. fraction outside [0, 1] is clamped.
double skill_at(double fraction, const SynthDetectorParams& params);

// Count form: floor + (ceiling - floor) * sqrt(n_labeled / n_total).
// Requires 0 <= n_labeled <= n_total and n_total >= 1.
double skill_at(std::size_t n_labeled, std::size_t n_total, const SynthDetectorParams& params);

// Per-class skill plus an overall level used for rates that are not tied to a
// particular class (false positive frequency).
struct SkillProfile {
    std::vector<double> per_class;
    double overall = 0.0;
};

// size_only: every class shares one skill driven by the labeled image count.
// class_conditional: class d is driven by the fraction of that class's
// training boxes already labeled; a class absent from the training set stays
// at the floor.
SkillProfile make_skill_profile(const SynthDetectorParams& params,
                                const DatasetIndex& train,
                                const std::vector<GroundTruthAnnotation>& labeled);

// Simulates detector output for one image: per ground-truth box a possible
// miss, a jittered geometry, a class distribution blended between one-hot and
// uniform, and a possible false positive spawned near the box. All draws come
// from a stream derived from (params.seed, image id, n_labeled), so output
// depends only on those values and never on scheduling order.
ImagePrediction synth_predict(const GroundTruthAnnotation& annotation,
                              std::size_t n_categories,
                              const SkillProfile& profile,
                              const SynthDetectorParams& params,
                              std::size_t n_labeled);

// In-process adapter over synth_predict for a fixed train/validation pair.
class SyntheticDetector : public DetectorAdapter {
public:
    SyntheticDetector(SynthDetectorParams params, const DatasetIndex& train, const DatasetIndex& val);

    AdapterOutput predict(const std::vector<GroundTruthAnnotation>& labeled,
                          const std::vector<std::string>& pool_ids) override;

private:
    SynthDetectorParams params_;
    const DatasetIndex& train_;
    const DatasetIndex& val_;
};

}  // namespace alsim
