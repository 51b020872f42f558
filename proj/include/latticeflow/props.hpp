#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latticeflow/grid.hpp"
#include "latticeflow/real_function.hpp"

namespace latticeflow {

struct PropSpec {
  std::string id;
  std::string claim;    // one-line statement of what the check verifies
  std::string csv_doc;  // CSV column documentation; empty when no CSV is produced
};

const std::vector<PropSpec>& prop_registry();

struct PropResult {
  bool pass = false;
  ordered_json report;  // embeds the full configuration for reproducibility
  std::optional<std::pair<std::string, std::string>> csv;  // filename, content
};

// Default inputs used when a proposition is run without a job document.
ordered_json default_inputs(const std::string& prop_id);

PropResult run_prop(const std::string& id, const ordered_json& inputs);

// Job document: {"prop": id, "inputs": {...}, "grid": "lo,hi,n" | {...},
// "eps": [e1, e2, ...]}. grid/eps override the corresponding input fields.
PropResult run_job_document(const ordered_json& job);

// Shared spec parsers (job fields, CLI flags).
GridSpec grid_from_json(const ordered_json& j);
std::vector<double> eps_from_json(const ordered_json& j);

}  // namespace latticeflow
