#include "alsim/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace alsim {

namespace {

using nlohmann::json;

double require_number(const json& object, const char* key, const std::string& context) {
    auto it = object.find(key);
    if (it == object.end() || !it->is_number()) {
        throw FormatError(context + ": missing numeric field '" + key + "'");
    }
    return it->get<double>();
}

BoxGeometry parse_box(const json& object, const std::string& context) {
    BoxGeometry box;
    box.x_min = require_number(object, "x_min", context);
    box.y_min = require_number(object, "y_min", context);
    box.x_max = require_number(object, "x_max", context);
    box.y_max = require_number(object, "y_max", context);
    if (!box.valid()) {
        throw ValidationError(context + ": degenerate box [" + std::to_string(box.x_min) +
                              ", " + std::to_string(box.y_min) + ", " +
                              std::to_string(box.x_max) + ", " + std::to_string(box.y_max) +
                              "]");
    }
    return box;
}

json box_to_json(const BoxGeometry& box) {
    return json{{"x_min", box.x_min},
                {"y_min", box.y_min},
                {"x_max", box.x_max},
                {"y_max", box.y_max}};
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

}  // namespace

DatasetIndex load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open ground-truth file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("ground truth '" + path.string() + "': " + e.what());
    }
    if (!doc.is_object()) {
        throw FormatError("ground truth '" + path.string() + "': top level is not an object");
    }

    DatasetIndex index;
    if (!doc.contains("categories") || !doc["categories"].is_array()) {
        throw FormatError("ground truth: missing 'categories' array");
    }
    for (const auto& name : doc["categories"]) {
        if (!name.is_string()) {
            throw FormatError("ground truth: category names must be strings");
        }
        index.categories.names.push_back(name.get<std::string>());
    }
    if (!doc.contains("images") || !doc["images"].is_array()) {
        throw FormatError("ground truth: missing 'images' array");
    }
    for (const auto& id : doc["images"]) {
        if (!id.is_string()) {
            throw FormatError("ground truth: image ids must be strings");
        }
        index.images.push_back(id.get<std::string>());
    }
    if (doc.contains("annotations")) {
        if (!doc["annotations"].is_array()) {
            throw FormatError("ground truth: 'annotations' must be an array");
        }
        for (const auto& record : doc["annotations"]) {
            if (!record.is_object() || !record.contains("image_id") ||
                !record["image_id"].is_string()) {
                throw FormatError("ground truth: annotation record without string image_id");
            }
            GroundTruthAnnotation annotation;
            annotation.image_id = record["image_id"].get<std::string>();
            const std::string context = "annotation for image '" + annotation.image_id + "'";
            if (record.contains("boxes")) {
                for (const auto& entry : record["boxes"]) {
                    GroundTruthBox box;
                    box.geometry = parse_box(entry, context);
                    auto it = entry.find("category");
                    if (it == entry.end() || !it->is_number_integer()) {
                        throw FormatError(context + ": box without integer category");
                    }
                    box.category = it->get<int>();
                    annotation.boxes.push_back(box);
                }
            }
            if (index.annotations.count(annotation.image_id) != 0) {
                throw ValidationError("duplicate annotation record for image '" +
                                      annotation.image_id + "'");
            }
            index.annotations.emplace(annotation.image_id, std::move(annotation));
        }
    }
    index.validate();
    return index;
}

void write_ground_truth(const DatasetIndex& index, const std::filesystem::path& path) {
    json doc;
    doc["categories"] = index.categories.names;
    doc["images"] = index.images;
    json annotations = json::array();
    for (const auto& image_id : index.images) {
        auto it = index.annotations.find(image_id);
        if (it == index.annotations.end()) {
            continue;
        }
        json boxes = json::array();
        for (const auto& box : it->second.boxes) {
            json entry = box_to_json(box.geometry);
            entry["category"] = box.category;
            boxes.push_back(std::move(entry));
        }
        annotations.push_back(json{{"image_id", image_id}, {"boxes", std::move(boxes)}});
    }
    doc["annotations"] = std::move(annotations);
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
}

std::vector<ImagePrediction> load_predictions(const std::filesystem::path& path,
                                              const DatasetIndex& index) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open prediction file '" + path.string() + "'");
    }
    std::vector<ImagePrediction> predictions;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_number = 0;
    const std::size_t category_count = index.categories.size();
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError("predictions line " + std::to_string(line_number) + ": " +
                              e.what());
        }
        if (!record.is_object() || !record.contains("image_id") ||
            !record["image_id"].is_string()) {
            throw FormatError("predictions line " + std::to_string(line_number) +
                              ": record without string image_id");
        }
        ImagePrediction prediction;
        prediction.image_id = record["image_id"].get<std::string>();
        const std::string context =
            "prediction for image '" + prediction.image_id + "' (line " +
            std::to_string(line_number) + ")";
        if (!index.has_image(prediction.image_id)) {
            throw ValidationError(context + ": unknown image id");
        }
        if (!seen.insert(prediction.image_id).second) {
            throw ValidationError(context + ": duplicate prediction record");
        }
        if (record.contains("detections")) {
            for (const auto& entry : record["detections"]) {
                BoxGeometry geometry = parse_box(entry, context);
                auto it = entry.find("probs");
                if (it == entry.end() || !it->is_array()) {
                    throw FormatError(context + ": detection without 'probs' array");
                }
                std::vector<double> probs;
                for (const auto& p : *it) {
                    if (!p.is_number()) {
                        throw FormatError(context + ": non-numeric probability");
                    }
                    probs.push_back(p.get<double>());
                }
                if (probs.size() != category_count) {
                    throw ValidationError(context + ": probability vector has length " +
                                          std::to_string(probs.size()) + ", expected " +
                                          std::to_string(category_count));
                }
                prediction.detections.push_back(
                    Detection::make(geometry, ClassDistribution::validated(probs, context)));
            }
        }
        predictions.push_back(std::move(prediction));
    }
    return predictions;
}

void write_predictions(const std::vector<ImagePrediction>& predictions,
                       const std::filesystem::path& path) {
    auto out = open_for_write(path);
    for (const auto& prediction : predictions) {
        json record;
        record["image_id"] = prediction.image_id;
        json detections = json::array();
        for (const auto& det : prediction.detections) {
            json entry = box_to_json(det.geometry);
            entry["probs"] = det.distribution.probs;
            detections.push_back(std::move(entry));
        }
        record["detections"] = std::move(detections);
        out << record.dump() << '\n';
    }
}

void write_report(const std::vector<CycleRecord>& records, std::ostream& out) {
    if (records.empty()) {
        throw ValidationError("refusing to write an empty report");
    }
    std::vector<const CycleRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& record : records) {
        ordered.push_back(&record);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const CycleRecord* a, const CycleRecord* b) {
                         if (a->seed != b->seed) return a->seed < b->seed;
                         return a->cycle < b->cycle;
                     });
    out << "seed,cycle,n_labeled,scorer,accumulator,map\n";
    char buffer[64];
    for (const CycleRecord* record : ordered) {
        std::snprintf(buffer, sizeof(buffer), "%.6f", record->map);
        out << record->seed << ',' << record->cycle << ',' << record->n_labeled << ','
            << record->scorer << ',' << record->accumulator << ',' << buffer << '\n';
    }
}

void write_report(const std::vector<CycleRecord>& records, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    write_report(records, out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing report file '" + path.string() + "'");
    }
}

std::vector<CycleRecord> read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open report file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("report '" + path.string() + "' is empty");
    }
    if (line != "seed,cycle,n_labeled,scorer,accumulator,map") {
        throw FormatError("report '" + path.string() + "' has an unexpected header");
    }
    std::vector<CycleRecord> records;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) {
            continue;
        }
        std::stringstream fields(line);
        std::string field;
        std::vector<std::string> parts;
        while (std::getline(fields, field, ',')) {
            parts.push_back(field);
        }
        if (parts.size() != 6) {
            throw FormatError("report line " + std::to_string(line_number) +
                              ": expected 6 fields, found " + std::to_string(parts.size()));
        }
        CycleRecord record;
        try {
            record.seed = std::stoull(parts[0]);
            record.cycle = std::stoi(parts[1]);
            record.n_labeled = std::stoull(parts[2]);
            record.scorer = parts[3];
            record.accumulator = parts[4];
            record.map = std::stod(parts[5]);
        } catch (const std::exception&) {
            throw FormatError("report line " + std::to_string(line_number) +
                              ": malformed field");
        }
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace alsim
