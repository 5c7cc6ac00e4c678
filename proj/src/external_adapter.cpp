#include "alsim/external_adapter.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <string>
#include <system_error>

#include "alsim/dataset_io.hpp"

namespace alsim {
namespace {

std::filesystem::path fresh_temp_dir() {
    static std::atomic<unsigned> counter{0};
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() /
        ("alsim-adapter-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

// Single-quote for sh; embedded quotes become '\''.
std::string shell_quote(const std::string& raw) {
    std::string quoted = "'";
    for (const char c : raw) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    return quoted;
}

void write_lines(const std::vector<std::string>& lines, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ProtocolError("cannot write " + path.string());
    }
    for (const std::string& line : lines) {
        out << line << '\n';
    }
    out.flush();
    if (!out) {
        throw ProtocolError("failed writing " + path.string());
    }
}

}  // namespace

ExternalCommandAdapter::ExternalCommandAdapter(std::string command,
                                               const DatasetIndex& train,
                                               const DatasetIndex& val,
                                               const std::filesystem::path& workdir)
    : command_(std::move(command)), train_(train), val_(val) {
    if (command_.empty()) {
        throw ConfigError("external detector requires a command");
    }
    if (workdir.empty()) {
        workdir_ = fresh_temp_dir();
        owns_workdir_ = true;
    } else {
        workdir_ = workdir;
        std::filesystem::create_directories(workdir_);
    }
}

ExternalCommandAdapter::~ExternalCommandAdapter() {
    if (owns_workdir_) {
        std::error_code ec;
        std::filesystem::remove_all(workdir_, ec);
    }
}

AdapterOutput ExternalCommandAdapter::predict(const std::vector<GroundTruthAnnotation>& labeled,
                                              const std::vector<std::string>& pool_ids) {
    DatasetIndex labeled_index;
    labeled_index.categories = train_.categories;
    for (const GroundTruthAnnotation& annotation : labeled) {
        labeled_index.images.push_back(annotation.image_id);
        labeled_index.annotations[annotation.image_id] = annotation;
    }
    write_ground_truth(labeled_index, workdir_ / "labeled.json");
    write_lines(pool_ids, workdir_ / "pool.txt");

    // Stale outputs from a previous exchange must not mask a silent command.
    const std::filesystem::path pool_path = workdir_ / "predictions.jsonl";
    const std::filesystem::path val_path = workdir_ / "val_predictions.jsonl";
    std::filesystem::remove(pool_path);
    std::filesystem::remove(val_path);

    const std::string invocation = command_ + " " + shell_quote(workdir_.string());
    const int status = std::system(invocation.c_str());
    if (status == -1) {
        throw ProtocolError("failed to launch detector command: " + invocation);
    }
    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : status;
    if (exit_code != 0) {
        throw ProtocolError("detector command exited with status " + std::to_string(exit_code) +
                            ": " + invocation);
    }

    if (!std::filesystem::exists(pool_path)) {
        throw ProtocolError("detector command wrote no predictions.jsonl in " + workdir_.string());
    }
    if (!std::filesystem::exists(val_path)) {
        throw ProtocolError("detector command wrote no val_predictions.jsonl in " +
                            workdir_.string());
    }

    AdapterOutput output;
    output.pool = load_predictions(pool_path, train_);
    output.validation = load_predictions(val_path, val_);
    return output;
}

}  // namespace alsim
