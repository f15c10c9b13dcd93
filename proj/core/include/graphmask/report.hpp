#pragma once

#include <string>
#include <vector>

#include "graphmask/experiment.hpp"
#include "graphmask/metrics.hpp"

namespace graphmask {

/// Fixed-width text table. Cells are left as given; columns are padded to
/// their widest cell and separated by two spaces.
std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

/// Number formatting used by every report: %.6g, "nan" for NaN.
std::string format_number(double v);

std::string sweep_table_text(const SweepTable& t);
/// Tab-separated columns, one header line.
std::string sweep_table_tsv(const SweepTable& t);
std::string sweep_table_json(const SweepTable& t);
SweepTable sweep_table_from_json(const std::string& text);

/// One polyline per method of `metric` against the swept value. Throws
/// ValidationError for an unknown metric. `log_x` uses a log10 axis.
std::string sweep_svg(const SweepTable& t, const std::string& metric, bool log_x = false);

/// Per-method rows of precision / recall / F-score / MSE / mask F for one instance.
std::string trial_text(const std::vector<TrialMetrics>& trial);
std::string trial_json(const std::vector<TrialMetrics>& trial);

std::string weather_result_text(const WeatherExperimentResult& r);
std::string weather_result_json(const WeatherExperimentResult& r);

std::string office_result_text(const OfficeExperimentResult& r);
std::string office_result_json(const OfficeExperimentResult& r);

}  // namespace graphmask
