#include "nearsir/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace nearsir {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

Cell cell(double x) { return Cell{Cell::Kind::Number, format_double(x)}; }

Cell cell(std::int64_t x) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return Cell{Cell::Kind::Number, std::string(buf, res.ptr)};
}

Cell cell(int x) { return cell(static_cast<std::int64_t>(x)); }

Cell cell(std::string s) { return Cell{Cell::Kind::Text, std::move(s)}; }

Cell raw_cell(std::string json_text) { return Cell{Cell::Kind::Raw, std::move(json_text)}; }

namespace {

bool csv_needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

void write_csv_field(const std::string& s, std::ostream& os) {
    if (!csv_needs_quotes(s)) {
        os << s;
        return;
    }
    os << '"';
    for (char c : s) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

void write_json_string(const std::string& s, std::ostream& os) {
    os << '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\b': os << "\\b"; break;
            case '\f': os << "\\f"; break;
            case '\n': os << "\\n"; break;
            case '\r': os << "\\r"; break;
            case '\t': os << "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    os << buf;
                } else {
                    os << static_cast<char>(c);
                }
        }
    }
    os << '"';
}

bool numeral_is_finite(const std::string& s) {
    return s != "inf" && s != "-inf" && s != "nan" && s != "-nan";
}

void write_json_cell(const Cell& c, std::ostream& os) {
    switch (c.kind) {
        case Cell::Kind::Number:
            if (numeral_is_finite(c.text)) {
                os << c.text;
            } else {
                os << "null";
            }
            break;
        case Cell::Kind::Raw:
            os << c.text;
            break;
        case Cell::Kind::Text:
            write_json_string(c.text, os);
            break;
    }
}

} // namespace

void write_csv(const Table& table, std::ostream& os, const Metadata& metadata) {
    for (const auto& [key, value] : metadata) {
        os << "# " << key << ": " << value.text << "\n";
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i > 0) os << ',';
        write_csv_field(table.columns[i], os);
    }
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) os << ',';
            write_csv_field(row[i].text, os);
        }
        os << "\n";
    }
}

void write_json(const Table& table, std::ostream& os, const Metadata& metadata) {
    os << "{\n  \"meta\": {";
    for (std::size_t i = 0; i < metadata.size(); ++i) {
        os << (i ? ",\n    " : "\n    ");
        write_json_string(metadata[i].first, os);
        os << ": ";
        write_json_cell(metadata[i].second, os);
    }
    os << (metadata.empty() ? "}" : "\n  }") << ",\n  \"columns\": [";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) os << ", ";
        write_json_string(table.columns[i], os);
    }
    os << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        os << (r ? ",\n    " : "\n    ") << '[';
        const auto& row = table.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ", ";
            write_json_cell(row[i], os);
        }
        os << ']';
    }
    os << (table.rows.empty() ? "]" : "\n  ]") << "\n}\n";
}

std::string prediction_report_json(const CriticalityReport& report,
                                   const FinalSizePrediction& prediction,
                                   double p_small, double p_small_corrected) {
    nlohmann::ordered_json j;
    j["r0"] = report.r0;
    j["alpha"] = report.alpha;
    j["alpha_bar"] = report.alpha_bar;
    j["nu_proxy"] = report.nu;
    j["regime"] = regime_name(report.regime);
    j["xi"] = report.xi;
    j["sigma2"] = report.sigma2;
    j["kappa"] = report.kappa;
    j["predicted_size"] = prediction.predicted_size;
    j["p_small"] = p_small;
    j["p_small_corrected"] = p_small_corrected;
    return j.dump(2) + "\n";
}

Table prediction_report_table(const CriticalityReport& report,
                              const FinalSizePrediction& prediction,
                              double p_small, double p_small_corrected) {
    Table t;
    t.columns = {"r0",     "alpha",  "alpha_bar",      "nu_proxy",
                 "regime", "xi",     "sigma2",         "kappa",
                 "predicted_size",   "p_small",        "p_small_corrected"};
    t.rows.push_back({cell(report.r0), cell(report.alpha), cell(report.alpha_bar),
                      cell(report.nu), cell(std::string(regime_name(report.regime))),
                      cell(report.xi), cell(report.sigma2), cell(report.kappa),
                      cell(prediction.predicted_size), cell(p_small),
                      cell(p_small_corrected)});
    return t;
}

std::string giant_report_json(const GiantLawReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["alpha"] = report.alpha;
    j["lambda"] = report.lambda;
    j["gamma"] = report.gamma;
    j["reps"] = report.reps;
    auto ratio = [](const RatioEstimate& r) {
        return nlohmann::ordered_json{{"mean", r.mean}, {"stderr", r.std_error}};
    };
    j["c1_over_nalpha"] = ratio(report.c1_over_nalpha);
    j["c2_over_nalpha"] = ratio(report.c2_over_nalpha);
    j["e1_over_nalpha"] = ratio(report.e1_over_nalpha);
    j["predicted_c1"] = report.predicted_c1;
    j["per_degree"] = nlohmann::ordered_json::array();
    for (const auto& d : report.per_degree) {
        j["per_degree"].push_back(nlohmann::ordered_json{{"degree", d.degree},
                                                         {"mean", d.mean},
                                                         {"stderr", d.std_error},
                                                         {"predicted", d.predicted}});
    }
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

std::pair<Table, Metadata> giant_report_table(const GiantLawReport& report) {
    Metadata meta;
    meta.emplace_back("n", cell(report.n));
    meta.emplace_back("alpha", cell(report.alpha));
    meta.emplace_back("lambda", cell(report.lambda));
    meta.emplace_back("gamma", cell(report.gamma));
    meta.emplace_back("reps", cell(static_cast<std::int64_t>(report.reps)));
    meta.emplace_back("c1_over_nalpha_mean", cell(report.c1_over_nalpha.mean));
    meta.emplace_back("c1_over_nalpha_stderr", cell(report.c1_over_nalpha.std_error));
    meta.emplace_back("c2_over_nalpha_mean", cell(report.c2_over_nalpha.mean));
    meta.emplace_back("c2_over_nalpha_stderr", cell(report.c2_over_nalpha.std_error));
    meta.emplace_back("e1_over_nalpha_mean", cell(report.e1_over_nalpha.mean));
    meta.emplace_back("e1_over_nalpha_stderr", cell(report.e1_over_nalpha.std_error));
    meta.emplace_back("predicted_c1", cell(report.predicted_c1));
    if (!report.warnings.empty()) {
        std::string joined;
        for (const auto& w : report.warnings) {
            if (!joined.empty()) joined += "; ";
            joined += w;
        }
        meta.emplace_back("warnings", cell(joined));
    }

    Table t;
    t.columns = {"degree", "mean", "stderr", "predicted"};
    for (const auto& d : report.per_degree) {
        t.rows.push_back({cell(d.degree), cell(d.mean), cell(d.std_error), cell(d.predicted)});
    }
    return {std::move(t), std::move(meta)};
}

Table trajectory_table(const TrajectoryRecord& record, const DegreeConfiguration& config) {
    std::vector<int> degrees;
    std::size_t max_k = std::max({config.n_s.size(), config.n_i.size(), config.n_r.size()});
    for (std::size_t k = 0; k < max_k; ++k) {
        std::int64_t total = 0;
        if (k < config.n_s.size()) total += config.n_s[k];
        if (k < config.n_i.size()) total += config.n_i[k];
        if (k < config.n_r.size()) total += config.n_r[k];
        if (total > 0) degrees.push_back(static_cast<int>(k));
    }

    Table t;
    t.columns = {"t", "X_S", "X_I", "X_R", "f_S", "f_I", "f_R"};
    for (int k : degrees) t.columns.push_back("S_" + std::to_string(k));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < record.grid.size(); ++i) {
        std::vector<Cell> row;
        row.reserve(t.columns.size());
        row.push_back(cell(record.grid[i]));
        row.push_back(cell(record.x_s[i]));
        row.push_back(cell(record.x_i[i]));
        row.push_back(cell(record.x_r[i]));
        row.push_back(cell(i < record.f_s.size() ? record.f_s[i] : nan));
        row.push_back(cell(i < record.f_i.size() ? record.f_i[i] : nan));
        row.push_back(cell(i < record.f_r.size() ? record.f_r[i] : nan));
        for (int k : degrees) {
            std::int64_t v = 0;
            if (static_cast<std::size_t>(k) < record.s_k[i].size()) {
                v = record.s_k[i][static_cast<std::size_t>(k)];
            }
            row.push_back(cell(v));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table diagnostics_table(const std::vector<Diagnostic>& diagnostics) {
    Table t;
    t.columns = {"name", "value", "level", "note"};
    for (const auto& d : diagnostics) {
        const char* level = d.level == Diagnostic::Level::Pass   ? "pass"
                            : d.level == Diagnostic::Level::Warn ? "warn"
                                                                 : "fail";
        t.rows.push_back({cell(d.name), cell(d.value), cell(std::string(level)), cell(d.note)});
    }
    return t;
}

} // namespace nearsir
