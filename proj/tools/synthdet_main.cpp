#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "alsim/dataset_io.hpp"
#include "alsim/synthdet.hpp"
#include "alsim/types.hpp"

namespace {

using namespace alsim;

std::vector<std::string> read_pool_ids(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ProtocolError("cannot open pool list '" + path.string() + "'");
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

}  // namespace

// Stand-alone simulated detector speaking the engine's file protocol: reads
// labeled.json and pool.txt from the work directory, writes predictions.jsonl
// for the pool and val_predictions.jsonl for the validation split.
int main(int argc, char** argv) {
    CLI::App app{"simulated object detector (file-protocol adapter)"};

    std::string gt_path;
    std::string val_gt_path;
    std::string workdir;
    SynthDetectorParams params;
    app.add_option("--gt", gt_path, "full training ground-truth JSON")->required();
    app.add_option("--val-gt", val_gt_path, "validation ground-truth JSON")->required();
    app.add_option("--seed", params.seed, "detector seed");
    app.add_flag("--class-conditional", params.class_conditional,
                 "skill tracks per-class labeled box counts");
    app.add_option("--skill-floor", params.skill_floor, "skill with no labels");
    app.add_option("--skill-ceiling", params.skill_ceiling, "skill with every label");
    app.add_option("--box-jitter", params.box_jitter,
                   "box perturbation as a fraction of box size, at the skill floor");
    app.add_option("--miss-rate", params.miss_rate_at_floor, "per-box miss probability at the floor");
    app.add_option("--fp-rate", params.false_positive_rate_at_floor,
                   "per-box false-positive rate at the floor");
    app.add_option("--concentration", params.concentration_at_ceiling,
                   "how sharply class distributions peak as skill grows");
    app.add_option("workdir", workdir, "exchange directory prepared by the engine")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const std::filesystem::path dir(workdir);
        const DatasetIndex train = load_ground_truth(gt_path);
        const DatasetIndex val = load_ground_truth(val_gt_path);
        const DatasetIndex labeled_index = load_ground_truth(dir / "labeled.json");
        if (labeled_index.categories.names != train.categories.names) {
            throw ProtocolError("labeled.json categories do not match the training set");
        }

        std::vector<GroundTruthAnnotation> labeled;
        labeled.reserve(labeled_index.images.size());
        for (const std::string& image_id : labeled_index.images) {
            if (!train.has_image(image_id)) {
                throw ProtocolError("labeled.json names unknown image: " + image_id);
            }
            labeled.push_back(labeled_index.annotation_for(image_id));
        }

        const std::vector<std::string> pool_ids = read_pool_ids(dir / "pool.txt");
        for (const std::string& image_id : pool_ids) {
            if (!train.has_image(image_id)) {
                throw ProtocolError("pool.txt names unknown image: " + image_id);
            }
        }

        SyntheticDetector detector(params, train, val);
        const AdapterOutput output = detector.predict(labeled, pool_ids);
        write_predictions(output.pool, dir / "predictions.jsonl");
        write_predictions(output.validation, dir / "val_predictions.jsonl");
        return 0;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
}
