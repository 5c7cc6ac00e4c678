#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "alsim/accumulate.hpp"
#include "alsim/config.hpp"
#include "alsim/datagen.hpp"
#include "alsim/dataset_io.hpp"
#include "alsim/evaluation.hpp"
#include "alsim/loop.hpp"
#include "alsim/report.hpp"
#include "alsim/scoring.hpp"
#include "alsim/types.hpp"

namespace {

using namespace alsim;

std::string format_score(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

// Runs `fn` against stdout or, when a path is given, a binary-mode file.
void with_output(const std::string& out_path, const std::function<void(std::ostream&)>& fn) {
    if (out_path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + out_path + "' for writing");
    }
    fn(out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing '" + out_path + "'");
    }
}

std::vector<std::string> read_id_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open id list '" + path + "'");
    }
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            ids.push_back(line);
        }
    }
    return ids;
}

// Experiment settings shared by `cycle` and `simulate`: a config file plus
// per-key command-line overrides, merged with the command line winning.
struct ConfigCli {
    std::string config_path;
    ConfigMap overrides;

    void add_key_option(CLI::App* cmd, const std::string& flag, const std::string& key,
                        const std::string& desc) {
        cmd->add_option(flag, desc)->each([this, key](const std::string& value) {
            overrides[key] = value;
        });
    }

    void attach_common(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key = value settings file");
        add_key_option(cmd, "--scorer", "scorer", "margin|variance|entropy|random");
        add_key_option(cmd, "--accumulator", "accumulator", "mean|sum|max");
        add_key_option(cmd, "--confidence-threshold", "confidence_threshold",
                       "drop detections below this confidence before scoring");
        add_key_option(cmd, "--empty-image-score", "empty_image_score",
                       "score assigned to images with no surviving detections");
    }

    void attach_experiment(CLI::App* cmd) {
        add_key_option(cmd, "--initial-size", "initial_size", "size of the seed labeled set");
        add_key_option(cmd, "--cycles", "cycles", "number of labeling cycles");
        add_key_option(cmd, "--iou", "iou_threshold", "IoU threshold for matching");
        add_key_option(cmd, "--interpolation", "interpolation",
                       "average-precision interpolation: all|11point");
        add_key_option(cmd, "--detector", "detector.kind", "synthetic|command");
        add_key_option(cmd, "--detector-command", "detector.command",
                       "external detector command, invoked as `<command> <workdir>`");
        add_key_option(cmd, "--detector-workdir", "detector.workdir",
                       "fixed exchange directory for the external detector");
        add_key_option(cmd, "--detector-seed", "detector.seed", "synthetic detector seed");
        cmd->add_flag("--class-conditional",
                      "synthetic detector skill tracks per-class labeled box counts")
            ->each([this](const std::string&) {
                overrides["detector.class_conditional"] = "true";
            });
        add_key_option(cmd, "--skill-floor", "detector.skill_floor",
                       "synthetic detector skill with no labels");
        add_key_option(cmd, "--skill-ceiling", "detector.skill_ceiling",
                       "synthetic detector skill with every label");
        add_key_option(cmd, "--box-jitter", "detector.box_jitter",
                       "box perturbation as a fraction of box size, at the skill floor");
        add_key_option(cmd, "--miss-rate", "detector.miss_rate_at_floor",
                       "per-box miss probability at the skill floor");
        add_key_option(cmd, "--fp-rate", "detector.false_positive_rate_at_floor",
                       "per-box false-positive rate at the skill floor");
        add_key_option(cmd, "--concentration", "detector.concentration_at_ceiling",
                       "how sharply class distributions peak as skill grows");
    }

    ConfigMap merged() const {
        ConfigMap values;
        if (!config_path.empty()) {
            values = load_config_file(config_path);
        }
        for (const auto& [key, value] : overrides) {
            values[key] = value;
        }
        return values;
    }
};

struct ScoreArgs {
    std::string gt;
    std::string pred;
    std::string out;
    std::uint64_t seed = 1;
    std::size_t top = 0;
    ConfigCli config;
};

RankedPool ranked_pool_from_args(const ScoreArgs& args) {
    const ExperimentConfig config = make_experiment_config(args.config.merged());
    const DatasetIndex index = load_ground_truth(args.gt);
    const std::vector<ImagePrediction> predictions = load_predictions(args.pred, index);

    PoolScoringOptions options;
    options.scorer = config.scorer;
    options.accumulator = config.accumulator;
    options.confidence_threshold = config.confidence_threshold;
    options.empty_image_score = config.empty_image_score;
    return rank(score_pool(predictions, options, args.seed));
}

int cmd_score(const ScoreArgs& args) {
    const RankedPool ranked = ranked_pool_from_args(args);
    with_output(args.out, [&](std::ostream& out) {
        out << "rank,image_id,score,n_boxes\n";
        for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
            const ImageScore& entry = ranked.entries[i];
            out << i + 1 << ',' << entry.image_id << ',' << format_score(entry.value) << ','
                << entry.n_boxes << '\n';
        }
    });
    return 0;
}

int cmd_rank(const ScoreArgs& args) {
    const RankedPool ranked = ranked_pool_from_args(args);
    const std::size_t top = args.top == 0 ? ranked.entries.size() : args.top;
    const std::vector<std::string> selected =
        top == 0 ? std::vector<std::string>{} : select_top(ranked, top);
    with_output(args.out, [&](std::ostream& out) {
        for (const std::string& image_id : selected) {
            out << image_id << '\n';
        }
    });
    return 0;
}

struct CycleArgs {
    std::string gt;
    std::string val_gt;
    std::string labeled_path;
    std::string out;
    std::string selected_out;
    std::string labeled_out;
    std::uint64_t seed = 1;
    int cycle = 1;
    ConfigCli config;
};

int cmd_cycle(const CycleArgs& args) {
    const ExperimentConfig config = make_experiment_config(args.config.merged());
    const DatasetIndex train = load_ground_truth(args.gt);
    const DatasetIndex val = load_ground_truth(args.val_gt);

    ExperimentState state;
    if (args.labeled_path.empty()) {
        state = initialize_experiment(train, config, args.seed);
    } else {
        state.seed = args.seed;
        for (const std::string& image_id : read_id_lines(args.labeled_path)) {
            if (!train.has_image(image_id)) {
                throw ValidationError("labeled list names unknown image: " + image_id);
            }
            state.labeled.insert(train.annotation_for(image_id));
        }
        for (const std::string& image_id : train.images) {
            if (!state.labeled.contains(image_id)) {
                state.pool.push_back(image_id);
            }
        }
    }
    state.next_cycle = args.cycle;

    const std::unique_ptr<DetectorAdapter> adapter = make_adapter(config.detector, train, val);
    const CycleRecord record = run_cycle(state, config, train, val, *adapter);

    with_output(args.out, [&](std::ostream& out) {
        write_report({record}, out);
    });
    if (!args.selected_out.empty()) {
        with_output(args.selected_out, [&](std::ostream& out) {
            for (const std::string& image_id : record.selected_ids) {
                out << image_id << '\n';
            }
        });
    }
    if (!args.labeled_out.empty()) {
        with_output(args.labeled_out, [&](std::ostream& out) {
            for (const std::string& image_id : state.labeled.ids()) {
                out << image_id << '\n';
            }
        });
    }
    return 0;
}

struct SimulateArgs {
    std::string gt;
    std::string val_gt;
    std::string out = "report.csv";
    std::string summary_out = "summary.csv";
    ConfigCli config;
};

// `all` on the scorer axis expands to the three uncertainty scorers crossed
// with the accumulators, plus one random baseline (accumulation does not
// change a random ranking, so the baseline runs once, as random/mean).
std::vector<std::pair<ScorerKind, AccumulatorKind>> expand_strategies(
    const std::string& scorer_text, const std::string& accumulator_text) {
    std::vector<ScorerKind> scorers;
    if (scorer_text == "all") {
        scorers = {ScorerKind::kMargin, ScorerKind::kVariance, ScorerKind::kEntropy};
    } else {
        const auto parsed = parse_scorer(scorer_text);
        if (!parsed) {
            throw ConfigError("unknown scorer: " + scorer_text);
        }
        scorers = {*parsed};
    }
    std::vector<AccumulatorKind> accumulators;
    if (accumulator_text == "all") {
        accumulators = {AccumulatorKind::kMean, AccumulatorKind::kSum, AccumulatorKind::kMax};
    } else {
        const auto parsed = parse_accumulator(accumulator_text);
        if (!parsed) {
            throw ConfigError("unknown accumulator: " + accumulator_text);
        }
        accumulators = {*parsed};
    }

    std::vector<std::pair<ScorerKind, AccumulatorKind>> pairs;
    for (const ScorerKind scorer : scorers) {
        for (const AccumulatorKind accumulator : accumulators) {
            pairs.emplace_back(scorer, accumulator);
        }
    }
    if (scorer_text == "all") {
        pairs.emplace_back(ScorerKind::kRandom, AccumulatorKind::kMean);
    }
    return pairs;
}

int cmd_simulate(const SimulateArgs& args) {
    ConfigMap values = args.config.merged();
    std::string scorer_text = "margin";
    std::string accumulator_text = "max";
    if (const auto it = values.find("scorer"); it != values.end()) {
        scorer_text = it->second;
        values.erase(it);
    }
    if (const auto it = values.find("accumulator"); it != values.end()) {
        accumulator_text = it->second;
        values.erase(it);
    }
    ExperimentConfig config = make_experiment_config(values);

    const DatasetIndex train = load_ground_truth(args.gt);
    const DatasetIndex val = load_ground_truth(args.val_gt);
    const auto strategies = expand_strategies(scorer_text, accumulator_text);

    // Surface config mistakes before the first (possibly slow) cycle.
    config.validate(train.images.size());

    const std::unique_ptr<DetectorAdapter> adapter = make_adapter(config.detector, train, val);
    std::vector<CycleRecord> records;
    for (const auto& [scorer, accumulator] : strategies) {
        config.scorer = scorer;
        config.accumulator = accumulator;
        std::vector<CycleRecord> batch = run_experiment(config, train, val, *adapter);
        records.insert(records.end(), std::make_move_iterator(batch.begin()),
                       std::make_move_iterator(batch.end()));
    }

    std::map<std::tuple<std::string, std::string, std::uint64_t>, int> per_seed;
    for (const CycleRecord& record : records) {
        per_seed[{record.scorer, record.accumulator, record.seed}]++;
    }
    bool truncated = false;
    for (const auto& [key, count] : per_seed) {
        if (count < config.cycles) {
            truncated = true;
        }
    }
    for (const CycleRecord& record : records) {
        if (record.selected_ids.size() < record.requested) {
            truncated = true;
        }
    }
    if (truncated) {
        std::cerr << "warning: pool exhausted before the requested number of cycles; "
                     "learning curves are truncated\n";
    }

    write_report(records, std::filesystem::path(args.out));
    write_summary(summarize(records), std::filesystem::path(args.summary_out));
    std::cout << "report: " << args.out << " (" << records.size() << " rows)\n"
              << "summary: " << args.summary_out << '\n';
    return 0;
}

struct EvalArgs {
    std::string gt;
    std::string pred;
    std::string out;
    std::string interpolation = "all";
    double iou_threshold = 0.5;
};

int cmd_eval(const EvalArgs& args) {
    const DatasetIndex index = load_ground_truth(args.gt);
    const std::vector<ImagePrediction> predictions = load_predictions(args.pred, index);
    EvaluationOptions options;
    options.iou_threshold = args.iou_threshold;
    const auto interp = parse_interpolation(args.interpolation);
    if (!interp) {
        throw ConfigError("unknown interpolation: " + args.interpolation);
    }
    options.interpolation = *interp;
    const EvaluationResult result = evaluate_predictions(index, predictions, options);

    with_output(args.out, [&](std::ostream& out) {
        for (const ClassAp& entry : result.per_class) {
            out << entry.category << " gt=" << entry.gt_count << " ap="
                << (entry.ap ? format_score(*entry.ap) : "undefined") << '\n';
        }
        out << "map=" << format_score(result.map) << '\n';
    });
    return 0;
}

struct ReportArgs {
    std::string in;
    std::string out;
};

int cmd_report(const ReportArgs& args) {
    const std::vector<CurveSummary> summaries = summarize(read_report(args.in));
    with_output(args.out, [&](std::ostream& out) {
        write_summary(summaries, out);
    });
    return 0;
}

struct GenArgs {
    std::string out;
    DatasetGenParams params;
    bool uniform_classes = false;
};

int cmd_gen(const GenArgs& args) {
    DatasetGenParams params = args.params;
    params.skewed_classes = !args.uniform_classes;
    write_ground_truth(generate_dataset(params), args.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-cost active-learning simulator for object detection"};
    app.require_subcommand(1);

    ScoreArgs score_args;
    CLI::App* score = app.add_subcommand("score", "rank pool images by informativeness");
    score->add_option("--gt", score_args.gt, "ground-truth JSON")->required();
    score->add_option("--pred", score_args.pred, "predictions JSONL")->required();
    score->add_option("--seed", score_args.seed, "seed for the random scorer");
    score->add_option("--out", score_args.out, "output CSV (default: stdout)");
    score_args.config.attach_common(score);

    ScoreArgs rank_args;
    CLI::App* rank_cmd = app.add_subcommand("rank", "emit the top-L image ids by informativeness");
    rank_cmd->add_option("--gt", rank_args.gt, "ground-truth JSON")->required();
    rank_cmd->add_option("--pred", rank_args.pred, "predictions JSONL")->required();
    rank_cmd->add_option("--seed", rank_args.seed, "seed for the random scorer");
    rank_cmd->add_option("--top", rank_args.top, "how many ids to emit (default: all)");
    rank_cmd->add_option("--out", rank_args.out, "output file (default: stdout)");
    rank_args.config.attach_common(rank_cmd);

    CycleArgs cycle_args;
    CLI::App* cycle = app.add_subcommand("cycle", "run one labeling cycle");
    cycle->add_option("--gt", cycle_args.gt, "training ground-truth JSON")->required();
    cycle->add_option("--val-gt", cycle_args.val_gt, "validation ground-truth JSON")->required();
    cycle->add_option("--labeled", cycle_args.labeled_path,
                      "already labeled ids, one per line (default: draw the initial set)");
    cycle->add_option("--cycle", cycle_args.cycle, "1-based cycle index (sets the batch size)");
    cycle->add_option("--seed", cycle_args.seed, "experiment seed");
    cycle->add_option("--out", cycle_args.out, "report row CSV (default: stdout)");
    cycle->add_option("--selected-out", cycle_args.selected_out, "write selected ids here");
    cycle->add_option("--labeled-out", cycle_args.labeled_out, "write the updated labeled list here");
    cycle_args.config.attach_common(cycle);
    cycle_args.config.attach_experiment(cycle);

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "run full annotation campaigns");
    simulate->add_option("--gt", simulate_args.gt, "training ground-truth JSON")->required();
    simulate->add_option("--val-gt", simulate_args.val_gt, "validation ground-truth JSON")
        ->required();
    simulate->add_option("--out", simulate_args.out, "report CSV path");
    simulate->add_option("--summary-out", simulate_args.summary_out, "summary CSV path");
    CLI::Option* seeds_opt =
        simulate->add_option("--seeds", "comma-separated experiment seeds (default: 1,2,3,4,5)");
    seeds_opt->each([&simulate_args](const std::string& value) {
        simulate_args.config.overrides["seeds"] = value;
    });
    simulate->add_option("--seed", "single experiment seed")
        ->each([&simulate_args](const std::string& value) {
            simulate_args.config.overrides["seeds"] = value;
        })
        ->excludes(seeds_opt);
    simulate_args.config.attach_common(simulate);
    simulate_args.config.attach_experiment(simulate);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "evaluate predictions against ground truth");
    eval->add_option("--gt", eval_args.gt, "ground-truth JSON")->required();
    eval->add_option("--pred", eval_args.pred, "predictions JSONL")->required();
    eval->add_option("--iou", eval_args.iou_threshold, "IoU threshold for matching");
    eval->add_option("--interpolation", eval_args.interpolation,
                     "average-precision interpolation: all|11point");
    eval->add_option("--out", eval_args.out, "output file (default: stdout)");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "summarize a report CSV across seeds");
    report->add_option("--in", report_args.in, "report CSV produced by simulate")->required();
    report->add_option("--out", report_args.out, "summary CSV (default: stdout)");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic annotated dataset");
    gen->add_option("--out", gen_args.out, "ground-truth JSON path")->required();
    gen->add_option("--images", gen_args.params.n_images, "number of images");
    gen->add_option("--categories", gen_args.params.n_categories, "number of categories");
    gen->add_option("--seed", gen_args.params.seed, "generator seed");
    gen->add_option("--prefix", gen_args.params.id_prefix, "image id prefix");
    gen->add_option("--canvas", gen_args.params.canvas, "canvas side length");
    gen->add_option("--min-box", gen_args.params.min_box, "minimum box side");
    gen->add_option("--max-box", gen_args.params.max_box, "maximum box side");
    gen->add_option("--max-objects", gen_args.params.max_objects, "maximum objects per image");
    gen->add_flag("--uniform-classes", gen_args.uniform_classes,
                  "draw categories uniformly instead of skewed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) {
            return cmd_score(score_args);
        }
        if (rank_cmd->parsed()) {
            return cmd_rank(rank_args);
        }
        if (cycle->parsed()) {
            return cmd_cycle(cycle_args);
        }
        if (simulate->parsed()) {
            return cmd_simulate(simulate_args);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_args);
        }
        if (report->parsed()) {
            return cmd_report(report_args);
        }
        if (gen->parsed()) {
            return cmd_gen(gen_args);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
