#include "alsim/config.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace alsim {
namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
        begin++;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
        end--;
    }
    return text.substr(begin, end - begin);
}

std::uint64_t to_uint64(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        if (!value.empty() && value[0] == '-') {
            throw std::invalid_argument("negative");
        }
        const std::uint64_t parsed = std::stoull(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not an unsigned integer: " + value);
    }
}

int to_int(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const int parsed = std::stoi(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not an integer: " + value);
    }
}

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: " + value);
    }
}

bool to_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    throw ConfigError("config key " + key + ": not a boolean (true/false/1/0): " + value);
}

}  // namespace

ConfigMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    ConfigMap values;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        line_number++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) {
            line.resize(comment);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const std::size_t equals = stripped.find('=');
        if (equals == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected `key = value`");
        }
        const std::string key = trim(stripped.substr(0, equals));
        const std::string value = trim(stripped.substr(equals + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
        }
        if (!values.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": duplicate key " + key);
        }
    }
    return values;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t comma = text.find(',', begin);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        const std::string item = trim(text.substr(begin, end - begin));
        if (item.empty()) {
            throw ConfigError("seed list has an empty entry: " + text);
        }
        seeds.push_back(to_uint64(item, "seeds"));
        if (comma == std::string::npos) {
            break;
        }
        begin = comma + 1;
    }
    if (seeds.empty()) {
        throw ConfigError("seed list is empty");
    }
    return seeds;
}

ExperimentConfig make_experiment_config(const ConfigMap& values) {
    ExperimentConfig config;
    for (const auto& [key, value] : values) {
        if (key == "scorer") {
            const auto parsed = parse_scorer(value);
            if (!parsed) {
                throw ConfigError("config key scorer: unknown scorer: " + value);
            }
            config.scorer = *parsed;
        } else if (key == "accumulator") {
            const auto parsed = parse_accumulator(value);
            if (!parsed) {
                throw ConfigError("config key accumulator: unknown accumulator: " + value);
            }
            config.accumulator = *parsed;
        } else if (key == "initial_size") {
            config.initial_size = static_cast<std::size_t>(to_uint64(value, key));
        } else if (key == "cycles") {
            config.cycles = to_int(value, key);
        } else if (key == "seeds") {
            config.seeds = parse_seed_list(value);
        } else if (key == "confidence_threshold") {
            config.confidence_threshold = to_double(value, key);
        } else if (key == "empty_image_score") {
            config.empty_image_score = to_double(value, key);
        } else if (key == "iou_threshold") {
            config.iou_threshold = to_double(value, key);
        } else if (key == "interpolation") {
            const auto parsed = parse_interpolation(value);
            if (!parsed) {
                throw ConfigError("config key interpolation: expected all or 11point, got " + value);
            }
            config.interpolation = *parsed;
        } else if (key == "detector.kind") {
            if (value == "synthetic") {
                config.detector.kind = DetectorSpec::Kind::kSynthetic;
            } else if (value == "command") {
                config.detector.kind = DetectorSpec::Kind::kCommand;
            } else {
                throw ConfigError("config key detector.kind: expected synthetic or command, got " +
                                  value);
            }
        } else if (key == "detector.command") {
            config.detector.command = value;
        } else if (key == "detector.workdir") {
            config.detector.workdir = value;
        } else if (key == "detector.seed") {
            config.detector.synthetic.seed = to_uint64(value, key);
        } else if (key == "detector.class_conditional") {
            config.detector.synthetic.class_conditional = to_bool(value, key);
        } else if (key == "detector.skill_floor") {
            config.detector.synthetic.skill_floor = to_double(value, key);
        } else if (key == "detector.skill_ceiling") {
            config.detector.synthetic.skill_ceiling = to_double(value, key);
        } else if (key == "detector.box_jitter") {
            config.detector.synthetic.box_jitter = to_double(value, key);
        } else if (key == "detector.miss_rate_at_floor") {
            config.detector.synthetic.miss_rate_at_floor = to_double(value, key);
        } else if (key == "detector.false_positive_rate_at_floor") {
            config.detector.synthetic.false_positive_rate_at_floor = to_double(value, key);
        } else if (key == "detector.concentration_at_ceiling") {
            config.detector.synthetic.concentration_at_ceiling = to_double(value, key);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    return config;
}

}  // namespace alsim
