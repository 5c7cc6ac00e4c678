#pragma once

#include <string>
#include <vector>

#include "alsim/types.hpp"

namespace alsim {

// One detector exchange: predictions for the current unlabeled pool plus
// predictions for the validation split, both produced by a detector trained
// on the given labeled set.
struct AdapterOutput {
    std::vector<ImagePrediction> pool;
    std::vector<ImagePrediction> validation;
};

class DetectorAdapter {
public:
    virtual ~DetectorAdapter() = default;

    virtual AdapterOutput predict(const std::vector<GroundTruthAnnotation>& labeled,
                                  const std::vector<std::string>& pool_ids) = 0;
};

}  // namespace alsim
