#pragma once

#include <string>
#include <vector>

#include "etsim/experiments.hpp"

namespace etsim {

json to_json(const SimMetrics& m, bool with_nodes = true);

/// Aligned two-column summary.
std::string metrics_text(const SimMetrics& m);

/// One row per node: energy ledger.
std::string ledger_csv(const SimMetrics& m);

/// Leading "# config: {...}" line, then the table.
std::string sweep_csv(const std::vector<SweepRow>& rows, const json& config);
std::string bound_compare_csv(const std::vector<BoundRow>& rows, const json& config);
std::string controller_csv(const std::vector<ControllerRow>& rows, const json& config);

json to_json(const std::vector<SweepRow>& rows);
json to_json(const std::vector<BoundRow>& rows);
json to_json(const std::vector<ControllerRow>& rows);
json to_json(const BoundSummary& b);

/// CSV of a square matrix; infinity as "inf", kNoNode as "-".
std::string matrix_csv(const SquareMatrix<double>& m);
std::string matrix_csv(const SquareMatrix<int>& m);
std::string tables_csv(const RoutingTables& rt);

/// Fixed-precision formatting for text/CSV output.
std::string fmt(double v, int precision = 6);

}  // namespace etsim
