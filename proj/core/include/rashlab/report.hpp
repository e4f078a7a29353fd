#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rashlab/experiment.hpp"

namespace rashlab {

struct ReportOptions {
  std::filesystem::path output_dir = ".";
  bool stats_battery = false;  // additionally emit the full test battery CSV
};

struct ReportFiles {
  std::vector<std::filesystem::path> written;
};

/// Builds the report CSVs for one mode (rq1, rq5 or rq6) from a results
/// store produced by run_experiment. rq6 additionally reads the sibling
/// complexity_profiles.csv.
ReportFiles report(const std::filesystem::path& results_jsonl, const std::string& mode,
                   const ReportOptions& options = {});

}  // namespace rashlab
