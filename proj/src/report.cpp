#include "alsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

namespace alsim {
namespace {

std::string format_map(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

}  // namespace

std::vector<CurveSummary> summarize(const std::vector<CycleRecord>& records) {
    using Key = std::tuple<int, int, std::size_t>;
    std::map<Key, std::vector<double>> groups;
    for (const CycleRecord& record : records) {
        const auto scorer = parse_scorer(record.scorer);
        const auto accumulator = parse_accumulator(record.accumulator);
        if (!scorer || !accumulator) {
            throw ValidationError("record names unknown strategy: " + record.scorer + "/" +
                                  record.accumulator);
        }
        groups[Key{static_cast<int>(*scorer), static_cast<int>(*accumulator), record.n_labeled}]
            .push_back(record.map);
    }

    std::vector<CurveSummary> out;
    out.reserve(groups.size());
    for (const auto& [key, maps] : groups) {
        CurveSummary summary;
        summary.scorer = static_cast<ScorerKind>(std::get<0>(key));
        summary.accumulator = static_cast<AccumulatorKind>(std::get<1>(key));
        summary.n_labeled = std::get<2>(key);
        summary.seeds = maps.size();

        double sum = 0.0;
        for (const double v : maps) {
            sum += v;
        }
        summary.mean_map = sum / static_cast<double>(maps.size());
        if (maps.size() >= 2) {
            double squares = 0.0;
            for (const double v : maps) {
                const double dev = v - summary.mean_map;
                squares += dev * dev;
            }
            summary.std_map = std::sqrt(squares / static_cast<double>(maps.size() - 1));
        }
        out.push_back(std::move(summary));
    }
    // The map key already sorts by (scorer, accumulator, n_labeled).
    return out;
}

void write_summary(const std::vector<CurveSummary>& summaries, std::ostream& out) {
    if (summaries.empty()) {
        throw ValidationError("refusing to write an empty summary");
    }
    out << "scorer,accumulator,n_labeled,mean_map,std_map,seeds\n";
    for (const CurveSummary& summary : summaries) {
        out << to_string(summary.scorer) << ',' << to_string(summary.accumulator) << ','
            << summary.n_labeled << ',' << format_map(summary.mean_map) << ','
            << (summary.std_map ? format_map(*summary.std_map) : "") << ',' << summary.seeds
            << '\n';
    }
}

void write_summary(const std::vector<CurveSummary>& summaries,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write summary file: " + path.string());
    }
    write_summary(summaries, out);
    out.flush();
    if (!out) {
        throw ValidationError("failed writing summary file: " + path.string());
    }
}

}  // namespace alsim
