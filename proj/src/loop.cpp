#include "alsim/loop.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "alsim/external_adapter.hpp"
#include "alsim/rng.hpp"

namespace alsim {

void LabeledSet::insert(GroundTruthAnnotation annotation) {
    if (!index_.insert(annotation.image_id).second) {
        throw ValidationError("image labeled twice: " + annotation.image_id);
    }
    ordered_.push_back(std::move(annotation));
}

std::vector<std::string> LabeledSet::ids() const {
    std::vector<std::string> out;
    out.reserve(ordered_.size());
    for (const GroundTruthAnnotation& annotation : ordered_) {
        out.push_back(annotation.image_id);
    }
    return out;
}

std::size_t schedule(int cycle) {
    if (cycle < 1) {
        throw std::domain_error("cycle index must be at least 1");
    }
    return static_cast<std::size_t>(10 * cycle + 10);
}

std::vector<GroundTruthAnnotation> oracle_label(const std::vector<std::string>& ids,
                                                const DatasetIndex& train,
                                                const LabeledSet& labeled) {
    std::set<std::string> seen;
    std::vector<GroundTruthAnnotation> out;
    out.reserve(ids.size());
    for (const std::string& image_id : ids) {
        if (!train.has_image(image_id)) {
            throw ValidationError("oracle asked for unknown image: " + image_id);
        }
        if (labeled.contains(image_id)) {
            throw ProtocolError("oracle asked for already labeled image: " + image_id);
        }
        if (!seen.insert(image_id).second) {
            throw ProtocolError("oracle asked for image twice in one request: " + image_id);
        }
        out.push_back(train.annotation_for(image_id));
    }
    return out;
}

void ExperimentConfig::validate(std::size_t dataset_size) const {
    if (initial_size < 1) {
        throw ConfigError("initial_size must be at least 1");
    }
    if (dataset_size < initial_size) {
        throw ConfigError("training set smaller than initial_size");
    }
    if (cycles < 1) {
        throw ConfigError("cycles must be at least 1");
    }
    if (seeds.empty()) {
        throw ConfigError("at least one seed is required");
    }
    std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
    if (unique_seeds.size() != seeds.size()) {
        throw ConfigError("seeds must be distinct");
    }
    if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
        throw ConfigError("confidence_threshold must lie in [0, 1]");
    }
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw ConfigError("iou_threshold must lie in (0, 1]");
    }
    if (!std::isfinite(empty_image_score)) {
        throw ConfigError("empty_image_score must be finite");
    }
    if (detector.kind == DetectorSpec::Kind::kSynthetic) {
        detector.synthetic.validate();
    } else if (detector.command.empty()) {
        throw ConfigError("external detector requires a command");
    }
}

ExperimentState initialize_experiment(const DatasetIndex& train,
                                      const ExperimentConfig& config,
                                      std::uint64_t seed) {
    if (train.images.size() < config.initial_size) {
        throw ConfigError("training set smaller than initial_size");
    }

    // Partial Fisher-Yates: the first initial_size slots are a uniform draw
    // without replacement, in draw order.
    std::vector<std::string> ids = train.images;
    DetRng rng = DetRng::derive(seed, "initial-selection");
    for (std::size_t i = 0; i < config.initial_size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_index(ids.size() - i));
        std::swap(ids[i], ids[j]);
    }

    ExperimentState state;
    state.seed = seed;
    std::set<std::string> drawn(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(config.initial_size));
    for (std::size_t i = 0; i < config.initial_size; ++i) {
        state.labeled.insert(train.annotation_for(ids[i]));
    }
    for (const std::string& image_id : train.images) {
        if (drawn.count(image_id) == 0) {
            state.pool.push_back(image_id);
        }
    }
    return state;
}

namespace {

// Reorders adapter output to pool order, insisting on full coverage. Extra
// predictions are tolerated and dropped.
std::vector<ImagePrediction> pool_predictions_in_order(const AdapterOutput& output,
                                                       const std::vector<std::string>& pool_ids) {
    std::map<std::string, const ImagePrediction*> by_id;
    for (const ImagePrediction& prediction : output.pool) {
        if (!by_id.emplace(prediction.image_id, &prediction).second) {
            throw ProtocolError("adapter returned two predictions for image: " + prediction.image_id);
        }
    }
    std::string missing;
    std::vector<ImagePrediction> ordered;
    ordered.reserve(pool_ids.size());
    for (const std::string& image_id : pool_ids) {
        const auto it = by_id.find(image_id);
        if (it == by_id.end()) {
            missing += missing.empty() ? image_id : ", " + image_id;
        } else {
            ordered.push_back(*it->second);
        }
    }
    if (!missing.empty()) {
        throw ProtocolError("adapter returned no prediction for pool images: " + missing);
    }
    return ordered;
}

}  // namespace

CycleRecord run_cycle(ExperimentState& state,
                      const ExperimentConfig& config,
                      const DatasetIndex& train,
                      const DatasetIndex& val,
                      DetectorAdapter& adapter) {
    const AdapterOutput before = adapter.predict(state.labeled.in_order(), state.pool);
    const std::vector<ImagePrediction> pool_predictions =
        pool_predictions_in_order(before, state.pool);

    PoolScoringOptions options;
    options.scorer = config.scorer;
    options.accumulator = config.accumulator;
    options.confidence_threshold = config.confidence_threshold;
    options.empty_image_score = config.empty_image_score;
    const RankedPool ranked = rank(score_pool(pool_predictions, options, state.seed));

    const std::size_t requested = schedule(state.next_cycle);
    const std::vector<std::string> selected = select_top(ranked, requested);

    for (GroundTruthAnnotation& annotation : oracle_label(selected, train, state.labeled)) {
        state.labeled.insert(std::move(annotation));
    }
    const std::set<std::string> removed(selected.begin(), selected.end());
    state.pool.erase(std::remove_if(state.pool.begin(), state.pool.end(),
                                    [&](const std::string& id) { return removed.count(id) != 0; }),
                     state.pool.end());

    const AdapterOutput after = adapter.predict(state.labeled.in_order(), state.pool);
    EvaluationOptions eval_options;
    eval_options.iou_threshold = config.iou_threshold;
    eval_options.interpolation = config.interpolation;
    const EvaluationResult evaluation = evaluate_predictions(val, after.validation, eval_options);

    CycleRecord record;
    record.seed = state.seed;
    record.cycle = state.next_cycle;
    record.requested = requested;
    record.selected_ids = selected;
    record.n_labeled = state.labeled.size();
    record.map = evaluation.map;
    record.scorer = to_string(config.scorer);
    record.accumulator = to_string(config.accumulator);

    state.next_cycle++;
    return record;
}

std::vector<CycleRecord> run_experiment(const ExperimentConfig& config,
                                        const DatasetIndex& train,
                                        const DatasetIndex& val,
                                        DetectorAdapter& adapter) {
    config.validate(train.images.size());

    std::vector<CycleRecord> records;
    for (const std::uint64_t seed : config.seeds) {
        ExperimentState state = initialize_experiment(train, config, seed);
        CachingDetector cached(adapter);
        for (int cycle = 1; cycle <= config.cycles; ++cycle) {
            if (state.pool.empty()) {
                break;
            }
            records.push_back(run_cycle(state, config, train, val, cached));
            const CycleRecord& record = records.back();
            if (record.selected_ids.size() < record.requested) {
                break;  // pool exhausted mid-cycle
            }
        }
    }
    return records;
}

AdapterOutput CachingDetector::predict(const std::vector<GroundTruthAnnotation>& labeled,
                                       const std::vector<std::string>& pool_ids) {
    std::vector<std::string> key;
    key.reserve(labeled.size());
    for (const GroundTruthAnnotation& annotation : labeled) {
        key.push_back(annotation.image_id);
    }
    if (!cached_ || key != key_) {
        cached_ = inner_.predict(labeled, pool_ids);
        key_ = std::move(key);
        exchanges_++;
    }
    return *cached_;
}

std::unique_ptr<DetectorAdapter> make_adapter(const DetectorSpec& spec,
                                              const DatasetIndex& train,
                                              const DatasetIndex& val) {
    if (spec.kind == DetectorSpec::Kind::kSynthetic) {
        return std::make_unique<SyntheticDetector>(spec.synthetic, train, val);
    }
    return std::make_unique<ExternalCommandAdapter>(spec.command, train, val, spec.workdir);
}

}  // namespace alsim
