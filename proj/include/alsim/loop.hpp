#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alsim/accumulate.hpp"
#include "alsim/adapter.hpp"
#include "alsim/dataset_io.hpp"
#include "alsim/evaluation.hpp"
#include "alsim/scoring.hpp"
#include "alsim/synthdet.hpp"
#include "alsim/types.hpp"

namespace alsim {

// Labeled images with their annotations, in labeling order.
class LabeledSet {
public:
    bool contains(const std::string& image_id) const { return index_.count(image_id) != 0; }
    std::size_t size() const { return ordered_.size(); }

    // Duplicate insertion is a ValidationError; the set must stay disjoint
    // from the pool.
    void insert(GroundTruthAnnotation annotation);

    const std::vector<GroundTruthAnnotation>& in_order() const { return ordered_; }
    std::vector<std::string> ids() const;

private:
    std::vector<GroundTruthAnnotation> ordered_;
    std::set<std::string> index_;
};

// Images requested in cycle `cycle` (1-based): 10 * cycle + 10.
std::size_t schedule(int cycle);

// Returns exact, complete ground truth for the requested ids, in request
// order. Requesting an unknown id is a ValidationError; requesting an id
// twice or one that is already labeled is a ProtocolError.
std::vector<GroundTruthAnnotation> oracle_label(const std::vector<std::string>& ids,
                                                const DatasetIndex& train,
                                                const LabeledSet& labeled);

// Which detector backs the loop: the built-in synthetic one, or an external
// command speaking the file protocol (see README).
struct DetectorSpec {
    enum class Kind { kSynthetic, kCommand };

    Kind kind = Kind::kSynthetic;
    SynthDetectorParams synthetic;
    std::string command;   // invoked as `<command> <workdir>`
    std::string workdir;   // optional fixed exchange directory
};

struct ExperimentConfig {
    ScorerKind scorer = ScorerKind::kMargin;
    AccumulatorKind accumulator = AccumulatorKind::kMax;
    std::size_t initial_size = 10;
    int cycles = 5;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    double confidence_threshold = 0.05;
    double empty_image_score = 0.0;
    double iou_threshold = 0.5;
    ApInterpolation interpolation = ApInterpolation::kAllPoints;
    DetectorSpec detector;

    // Throws ConfigError; dataset_size is the training pool size.
    void validate(std::size_t dataset_size) const;
};

// Mutable per-seed loop state. pool keeps dataset index order; together with
// the labeled set it always partitions the training images.
struct ExperimentState {
    std::uint64_t seed = 0;
    int next_cycle = 1;
    LabeledSet labeled;
    std::vector<std::string> pool;
};

// Draws the initial labeled set uniformly without replacement, driven only by
// the experiment seed.
ExperimentState initialize_experiment(const DatasetIndex& train,
                                      const ExperimentConfig& config,
                                      std::uint64_t seed);

// One full cycle: score the pool with the current detector, select the top
// schedule(cycle) images (all remaining if fewer), label them through the
// oracle, then retrain and evaluate on the validation split. The returned
// record carries the post-labeling mAP.
CycleRecord run_cycle(ExperimentState& state,
                      const ExperimentConfig& config,
                      const DatasetIndex& train,
                      const DatasetIndex& val,
                      DetectorAdapter& adapter);

// Runs all configured seeds and cycles, stopping a seed early once its pool
// is exhausted. Records are ordered by (seed position, cycle).
std::vector<CycleRecord> run_experiment(const ExperimentConfig& config,
                                        const DatasetIndex& train,
                                        const DatasetIndex& val,
                                        DetectorAdapter& adapter);

// Memoizes the most recent exchange, keyed on the labeled-set ids. The
// post-labeling evaluation of one cycle and the scoring pass of the next see
// the same detector state, so each state costs one exchange.
class CachingDetector : public DetectorAdapter {
public:
    explicit CachingDetector(DetectorAdapter& inner) : inner_(inner) {}

    AdapterOutput predict(const std::vector<GroundTruthAnnotation>& labeled,
                          const std::vector<std::string>& pool_ids) override;

    std::size_t exchange_count() const { return exchanges_; }

private:
    DetectorAdapter& inner_;
    std::vector<std::string> key_;
    std::optional<AdapterOutput> cached_;
    std::size_t exchanges_ = 0;
};

// Builds the adapter described by `spec` over the given datasets.
std::unique_ptr<DetectorAdapter> make_adapter(const DetectorSpec& spec,
                                              const DatasetIndex& train,
                                              const DatasetIndex& val);

}  // namespace alsim
