#pragma once

#include <filesystem>
#include <string>

#include "alsim/adapter.hpp"
#include "alsim/types.hpp"

namespace alsim {

// Drives an out-of-process detector through files. Per exchange the engine
// writes labeled.json (ground-truth format) and pool.txt (one unlabeled id
// per line) into the work directory, runs `<command> <workdir>`, and reads
// predictions.jsonl plus val_predictions.jsonl back. A nonzero exit or a
// missing output file is a ProtocolError.
class ExternalCommandAdapter : public DetectorAdapter {
public:
    // An empty workdir means a fresh temporary directory, removed on
    // destruction; a caller-supplied one is created if needed and kept.
    ExternalCommandAdapter(std::string command,
                           const DatasetIndex& train,
                           const DatasetIndex& val,
                           const std::filesystem::path& workdir = {});
    ~ExternalCommandAdapter() override;

    ExternalCommandAdapter(const ExternalCommandAdapter&) = delete;
    ExternalCommandAdapter& operator=(const ExternalCommandAdapter&) = delete;

    AdapterOutput predict(const std::vector<GroundTruthAnnotation>& labeled,
                          const std::vector<std::string>& pool_ids) override;

    const std::filesystem::path& workdir() const { return workdir_; }

private:
    std::string command_;
    const DatasetIndex& train_;
    const DatasetIndex& val_;
    std::filesystem::path workdir_;
    bool owns_workdir_ = false;
};

}  // namespace alsim
