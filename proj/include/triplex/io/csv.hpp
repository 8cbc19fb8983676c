#pragma once

// CSV dumps. Numbers are written in shortest round-trip form, so equal
// inputs give byte-identical files.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "triplex/errors.hpp"
#include "triplex/evolution/energy.hpp"
#include "triplex/quantize/grid.hpp"
#include "triplex/symmetrizer/symmetrizer.hpp"

namespace triplex {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw InvalidArgument("CSV table needs at least one column");
  }

  void add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
      throw InvalidArgument("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                            std::to_string(header_.size()));
    rows_.push_back(row);
  }

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  void write(std::ostream& out) const {
    for (std::size_t j = 0; j < header_.size(); ++j) out << (j ? "," : "") << header_[j];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << format_number(r[j]);
      out << '\n';
    }
  }

  std::string str() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline void write_csv(const std::string& path, const CsvTable& table) { write_text_file(path, table.str()); }

inline CsvTable energy_trace_table(const EnergyTrace& tr) {
  CsvTable tab({"t", "E", "dE_dt", "rhs_bound", "margin", "n1sq", "n2sq", "aU3U3", "norm"});
  for (std::size_t i = 0; i < tr.size(); ++i)
    tab.add_row({tr.t[i], tr.E[i], tr.dE_dt[i], tr.rhs_bound[i], tr.margin[i], tr.n1sq[i], tr.n2sq[i], tr.aU3U3[i],
                 tr.norm[i]});
  return tab;
}

/// Per-point symmetrizer dump.
inline CsvTable symmetrizer_table(const SymmetrizerBound& b) {
  CsvTable tab({"t", "x", "xi", "a", "b", "mineig_S", "delta_sym_local"});
  for (const auto& r : b.rows) tab.add_row({r.p.t, r.p.x, r.p.xi, r.a, r.b, r.mineig_S, r.delta_sym_local});
  return tab;
}

/// Dense matrix, row-major, each entry as a "re,im" pair. No header line.
inline std::string matrix_csv(const CMat& m) {
  std::ostringstream ss;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      ss << (j ? "," : "") << format_number(m(i, j).real()) << ',' << format_number(m(i, j).imag());
    ss << '\n';
  }
  return ss.str();
}

}  // namespace triplex
