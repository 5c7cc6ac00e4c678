#pragma once

#include <cstdint>
#include <string>

#include "alsim/types.hpp"

namespace alsim {

// Synthetic annotated dataset on a square canvas. Object counts per image are
// skewed toward small (1 + floor(max_objects * u^2)), and with skewed_classes
// category d is drawn with weight 2^-d, so later classes are rare.
struct DatasetGenParams {
    std::size_t n_images = 100;
    std::size_t n_categories = 5;
    std::uint64_t seed = 7;
    std::string id_prefix = "img_";
    double canvas = 1000.0;
    double min_box = 40.0;
    double max_box = 200.0;
    std::size_t max_objects = 8;
    bool skewed_classes = true;

    void validate() const;  // throws ConfigError
};

DatasetIndex generate_dataset(const DatasetGenParams& params);

}  // namespace alsim
