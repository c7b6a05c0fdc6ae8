#include "othpo/results_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "othpo/errors.hpp"

namespace othpo {

nlohmann::ordered_json record_to_json(const Record& r,
                              const std::vector<std::string>& dimension_names,
                              Direction direction) {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < r.config.size(); ++i) {
    config[dimension_names.at(i)] = r.config[i];
  }
  nlohmann::ordered_json j;
  j["benchmark"] = r.benchmark;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["task"] = r.task;
  j["iteration"] = r.iteration;
  j["context_feature"] = r.context_feature;
  j["config"] = std::move(config);
  j["objective"] = r.objective;
  j["cum_best"] = r.cum_best;
  j["direction"] = std::string(direction_name(direction));
  return j;
}

void write_jsonl(std::ostream& out, const ResultsTable& table) {
  for (const auto& r : table.records) {
    out << record_to_json(r, table.dimension_names, table.direction).dump()
        << '\n';
  }
}

ResultsTable read_jsonl(std::istream& in) {
  ResultsTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::ordered_json::parse(line);
      Record r;
      r.benchmark = j.at("benchmark").get<std::string>();
      r.method = j.at("method").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.task = j.at("task").get<int>();
      r.iteration = j.at("iteration").get<int>();
      r.context_feature = j.at("context_feature").get<double>();
      r.objective = j.at("objective").get<double>();
      r.cum_best = j.at("cum_best").get<double>();
      const Direction direction =
          parse_direction(j.value("direction", std::string("minimize")));
      std::vector<std::string> names;
      std::vector<double> values;
      for (const auto& [name, value] : j.at("config").items()) {
        names.push_back(name);
        values.push_back(value.get<double>());
      }
      r.config = Configuration(std::move(values));
      if (first) {
        table.benchmark = r.benchmark;
        table.direction = direction;
        table.dimension_names = std::move(names);
        first = false;
      } else if (direction != table.direction || r.benchmark != table.benchmark) {
        throw ParseError("records mix benchmarks or directions", line_no);
      }
      table.budget = std::max(table.budget, r.iteration);
      table.records.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

ResultsTable read_jsonl_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return read_jsonl(in);
}

nlohmann::json results_metadata(const ResultsTable& table,
                                const std::vector<std::string>& methods,
                                const std::vector<std::uint64_t>& seeds) {
  nlohmann::json aborted = nlohmann::json::array();
  for (const auto& a : table.aborted) {
    aborted.push_back({{"method", a.method}, {"seed", a.seed}, {"error", a.error}});
  }
  return {
      {"benchmark", table.benchmark},
      {"direction", direction_name(table.direction)},
      {"budget", table.budget},
      {"methods", methods},
      {"seeds", seeds},
      {"records", table.records.size()},
      {"aborted_runs", table.aborted.size()},
      {"aborted", aborted},
      {"best_reference", "best mean cumulative-best loss at the final iteration "
                         "across the compared methods"},
  };
}

}  // namespace othpo
