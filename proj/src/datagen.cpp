#include "alsim/datagen.hpp"

#include <cmath>
#include <cstdio>

#include "alsim/rng.hpp"

namespace alsim {
namespace {

std::string padded_id(const std::string& prefix, std::size_t index) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%05zu", index);
    return prefix + buffer;
}

int draw_category(std::size_t n_categories, bool skewed, DetRng& rng) {
    if (!skewed) {
        return static_cast<int>(rng.next_index(n_categories)) + 1;
    }
    // Weights 1, 1/2, 1/4, ...; total = 2 - 2^(1 - D).
    const double total = 2.0 - std::ldexp(1.0, -static_cast<int>(n_categories) + 1);
    double u = rng.next_double() * total;
    double weight = 1.0;
    for (std::size_t d = 0; d + 1 < n_categories; ++d) {
        if (u < weight) {
            return static_cast<int>(d) + 1;
        }
        u -= weight;
        weight *= 0.5;
    }
    return static_cast<int>(n_categories);
}

}  // namespace

void DatasetGenParams::validate() const {
    if (n_images == 0) {
        throw ConfigError("dataset generator: n_images must be positive");
    }
    if (n_categories < 2) {
        throw ConfigError("dataset generator: at least two categories are required");
    }
    if (max_objects == 0) {
        throw ConfigError("dataset generator: max_objects must be positive");
    }
    if (!(min_box > 0.0 && min_box <= max_box && max_box <= canvas)) {
        throw ConfigError("dataset generator: need 0 < min_box <= max_box <= canvas");
    }
}

DatasetIndex generate_dataset(const DatasetGenParams& params) {
    params.validate();

    DatasetIndex index;
    for (std::size_t d = 0; d < params.n_categories; ++d) {
        index.categories.names.push_back("class_" + std::to_string(d + 1));
    }

    for (std::size_t i = 0; i < params.n_images; ++i) {
        GroundTruthAnnotation annotation;
        annotation.image_id = padded_id(params.id_prefix, i);
        DetRng rng = DetRng::derive(params.seed, annotation.image_id);

        const double u = rng.next_double();
        const std::size_t n_objects =
            1 + static_cast<std::size_t>(std::floor(static_cast<double>(params.max_objects) * u * u));
        for (std::size_t k = 0; k < n_objects; ++k) {
            const double width = params.min_box + rng.next_double() * (params.max_box - params.min_box);
            const double height = params.min_box + rng.next_double() * (params.max_box - params.min_box);
            const double x = rng.next_double() * (params.canvas - width);
            const double y = rng.next_double() * (params.canvas - height);
            GroundTruthBox box;
            box.geometry = BoxGeometry{x, y, x + width, y + height};
            box.category = draw_category(params.n_categories, params.skewed_classes, rng);
            annotation.boxes.push_back(box);
        }

        index.images.push_back(annotation.image_id);
        index.annotations[annotation.image_id] = std::move(annotation);
    }

    index.validate();
    return index;
}

}  // namespace alsim
