#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "othpo/harness.hpp"

namespace othpo {

// One JSON object per line:
//   {benchmark, method, seed, task, iteration, context_feature,
//    config: {name: value}, objective, cum_best, direction}
nlohmann::ordered_json record_to_json(const Record& record,
                              const std::vector<std::string>& dimension_names,
                              Direction direction);
void write_jsonl(std::ostream& out, const ResultsTable& table);
// Throws ParseError (with line number) on malformed lines.
ResultsTable read_jsonl(std::istream& in);
ResultsTable read_jsonl_file(const std::filesystem::path& path);

// Sidecar metadata: plan summary, aborted runs, and metric conventions.
nlohmann::json results_metadata(const ResultsTable& table,
                                const std::vector<std::string>& methods,
                                const std::vector<std::uint64_t>& seeds);

}  // namespace othpo
