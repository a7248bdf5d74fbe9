// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Result table with CSV and JSON export.

#ifndef STBEM_REPORT_HPP
#define STBEM_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "stbem/errors.hpp"

namespace stbem {

struct ResultRow {
  std::string experiment;
  double snr_db = 0.0;
  std::string method;
  std::string metric;
  double value = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string format_g9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace detail

struct ResultTable {
  std::vector<ResultRow> rows;

  void add(const ResultRow& row) {
    if (!std::isfinite(row.value) || row.value < 0.0)
      throw numerical_error("result metric '" + row.metric +
                            "' is not finite and non-negative");
    if (row.metric == "ber" && row.value > 1.0)
      throw numerical_error("ber metric out of [0, 1]");
    rows.push_back(row);
  }

  void write_csv(std::ostream& out) const {
    out << "experiment,snr_db,method,metric,value,trials,seed\n";
    for (const auto& r : rows)
      out << r.experiment << ',' << detail::format_g9(r.snr_db) << ','
          << r.method << ',' << r.metric << ',' << detail::format_g9(r.value)
          << ',' << r.trials << ',' << r.seed << '\n';
  }

  void write_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file '" + path + "'");
    write_csv(out);
  }

  void write_json_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file '" + path + "'");
    out << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << "  {\"experiment\": \"" << r.experiment
          << "\", \"snr_db\": " << detail::format_g9(r.snr_db)
          << ", \"method\": \"" << r.method << "\", \"metric\": \"" << r.metric
          << "\", \"value\": " << detail::format_g9(r.value)
          << ", \"trials\": " << r.trials << ", \"seed\": " << r.seed << "}"
          << (i + 1 < rows.size() ? "," : "") << '\n';
    }
    out << "]\n";
  }
};

}  // namespace stbem

#endif  // STBEM_REPORT_HPP
