#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nearsir/degree_model.hpp"
#include "nearsir/giant_component.hpp"
#include "nearsir/sir_dynamics.hpp"

namespace nearsir {

//! Shortest text that parses back to exactly the same double. Non-finite
//! values come out as inf/-inf/nan (the JSON writers map those to null).
std::string format_double(double x);

//! A formatted value. Number holds a ready numeral, Text is quoted on
//! output, Raw is spliced verbatim into JSON (for pre-serialized spec
//! echoes) and printed verbatim in CSV metadata.
struct Cell {
    enum class Kind { Number, Text, Raw };
    Kind kind = Kind::Text;
    std::string text;
};

Cell cell(double x);
Cell cell(std::int64_t x);
Cell cell(int x);
Cell cell(std::string s);
Cell raw_cell(std::string json_text);

using Metadata = std::vector<std::pair<std::string, Cell>>;

//! Row-shaped report. The same table writes as CSV and as JSON; numerals are
//! shared between the two, so the formats agree digit for digit.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

//! Header row plus RFC-4180-quoted records. Metadata rides above the header
//! as "# key: value" comment lines.
void write_csv(const Table& table, std::ostream& os, const Metadata& metadata = {});

//! {"meta": {...}, "columns": [...], "rows": [[...], ...]}.
void write_json(const Table& table, std::ostream& os, const Metadata& metadata = {});

//! Flat object with keys r0, alpha, alpha_bar, nu_proxy, regime, xi, sigma2,
//! kappa, predicted_size, p_small, p_small_corrected.
std::string prediction_report_json(const CriticalityReport& report,
                                   const FinalSizePrediction& prediction,
                                   double p_small, double p_small_corrected);

//! Same numbers as one CSV row.
Table prediction_report_table(const CriticalityReport& report,
                              const FinalSizePrediction& prediction,
                              double p_small, double p_small_corrected);

std::string giant_report_json(const GiantLawReport& report);

//! Per-degree rows; the scalar summaries ride in the returned metadata.
std::pair<Table, Metadata> giant_report_table(const GiantLawReport& report);

//! Columns t, X_S, X_I, X_R, f_S, f_I, f_R, then one S_k column per degree
//! present in the configuration. Empty f columns render as nan.
Table trajectory_table(const TrajectoryRecord& record, const DegreeConfiguration& config);

Table diagnostics_table(const std::vector<Diagnostic>& diagnostics);

} // namespace nearsir
