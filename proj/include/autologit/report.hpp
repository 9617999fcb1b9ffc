#pragma once

#include <filesystem>
#include <string>

#include "autologit/estimator.hpp"
#include "autologit/selector.hpp"

namespace autologit {

// JSON and text renderings of results. Schemas are described in
// docs/schemas.md.
std::string fit_result_json(const FitResult& fit, const std::string& graph_label);
std::string fit_result_table(const FitResult& fit, const std::string& graph_label);

std::string selection_report_json(const SelectionReport& report);
// One row per candidate in candidate order.
void write_selection_csv(const std::filesystem::path& path, const SelectionReport& report);

}  // namespace autologit
