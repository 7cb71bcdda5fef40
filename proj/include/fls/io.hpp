#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fls/path.hpp"

namespace fls {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_number(const std::string& tok, int line, int col) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw DataError("parse error at line " + std::to_string(line) + ", column " +
                    std::to_string(col) + ": '" + tok + "' is not a number");
  return v;
}

}  // namespace detail

// Dense CSV, last column is the response.
inline std::pair<Mat, Vec> read_dense_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',')) row.push_back(detail::parse_number(tok, lineno, ++col));
    if (rows.empty()) {
      width = row.size();
      if (width < 3) throw DataError("need at least 2 feature columns plus a response");
    } else if (row.size() != width) {
      throw DataError("ragged row at line " + std::to_string(lineno) + ": expected " +
                      std::to_string(width) + " fields, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no rows in " + path);
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(width - 1);
  Mat X(n, p);
  Vec y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) X(i, j) = rows[i][j];
    y[i] = rows[i][width - 1];
  }
  return {std::move(X), std::move(y)};
}

// "label idx:val idx:val ..." with 1-based strictly increasing indices per
// line; densified. dims_override sets p when the max index understates it.
inline std::pair<Mat, Vec> read_sparse_labeled(const std::string& path, Index dims_override = 0) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<double> labels;
  std::vector<std::vector<std::pair<Index, double>>> entries;
  std::string line;
  int lineno = 0;
  Index max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    labels.push_back(detail::parse_number(tok, lineno, 1));
    std::vector<std::pair<Index, double>> row;
    Index prev = 0;
    int col = 1;
    while (ss >> tok) {
      ++col;
      const auto pos = tok.find(':');
      if (pos == std::string::npos)
        throw DataError("parse error at line " + std::to_string(lineno) + ": expected idx:val, got '" + tok + "'");
      const double idxd = detail::parse_number(tok.substr(0, pos), lineno, col);
      const Index idx = static_cast<Index>(idxd);
      if (idx < 1 || static_cast<double>(idx) != idxd)
        throw DataError("bad feature index at line " + std::to_string(lineno) + ": '" + tok + "' (indices are 1-based integers)");
      if (idx <= prev)
        throw DataError("non-increasing feature index at line " + std::to_string(lineno) + ": '" + tok + "'");
      row.emplace_back(idx, detail::parse_number(tok.substr(pos + 1), lineno, col));
      prev = idx;
      max_index = std::max(max_index, idx);
    }
    entries.push_back(std::move(row));
  }
  if (entries.empty()) throw DataError("no rows in " + path);
  const Index p = dims_override > 0 ? dims_override : max_index;
  if (max_index > p) throw DataError("--dims smaller than largest feature index in the file");
  if (p < 2) throw DataError("need at least 2 feature columns");
  const Index n = static_cast<Index>(entries.size());
  Mat X = Mat::Zero(n, p);
  Vec y(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = labels[i];
    for (auto [idx, val] : entries[i]) X(i, idx - 1) = val;
  }
  return {std::move(X), std::move(y)};
}

struct RunMeta {
  std::string command;
  std::uint64_t seed = 0;
  Index n = 0, p = 0;
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string swap_ext(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
  return path.substr(0, dot) + ext;
}

}  // namespace detail

inline void write_results_json(const std::string& jpath, const std::vector<PathPoint>& records,
                               const RunMeta& meta = {}) {
  nlohmann::ordered_json doc;
  doc["command"] = meta.command;
  doc["seed"] = meta.seed;
  doc["n"] = meta.n;
  doc["p"] = meta.p;
  doc["points"] = nlohmann::ordered_json::array();
  for (const auto& pt : records) {
    nlohmann::ordered_json o;
    o["lambda1"] = pt.lambda1;
    o["lambda2"] = pt.lambda2;
    o["ratio"] = pt.ratio;
    o["n_zero_screened"] = pt.n_zero_screened;
    o["n_fused"] = pt.n_fused;
    o["n_actual_inactive"] = pt.n_actual_inactive;
    o["solve_ms"] = pt.solve_ms;
    o["screen_ms"] = pt.screen_ms;
    o["iterations"] = pt.iterations;
    doc["points"].push_back(std::move(o));
  }
  std::ofstream out(jpath);
  if (!out) throw DataError("cannot write file: " + jpath);
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("write failure: " + jpath);
}

inline void write_results_csv(const std::string& cpath, const std::vector<PathPoint>& records) {
  std::ofstream out(cpath);
  if (!out) throw DataError("cannot write file: " + cpath);
  out << "lambda1,lambda2,ratio,n_zero_screened,n_fused,n_actual_inactive,solve_ms,screen_ms,iterations\n";
  for (const auto& pt : records) {
    out << detail::fmt17(pt.lambda1) << ',' << detail::fmt17(pt.lambda2) << ','
        << detail::fmt17(pt.ratio) << ',' << pt.n_zero_screened << ',' << pt.n_fused << ','
        << pt.n_actual_inactive << ',' << detail::fmt17(pt.solve_ms) << ','
        << detail::fmt17(pt.screen_ms) << ',' << pt.iterations << '\n';
  }
  if (!out) throw DataError("write failure: " + cpath);
}

// Same records in both formats, <stem>.json and <stem>.csv.
inline void write_results(const std::string& path, const std::vector<PathPoint>& records,
                          const RunMeta& meta = {}) {
  write_results_json(detail::swap_ext(path, ".json"), records, meta);
  write_results_csv(detail::swap_ext(path, ".csv"), records);
}

inline std::vector<PathPoint> read_results(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw DataError("cannot open file: " + json_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad results JSON: ") + e.what());
  }
  std::vector<PathPoint> out;
  for (const auto& o : doc.at("points")) {
    PathPoint pt;
    pt.lambda1 = o.at("lambda1").get<double>();
    pt.lambda2 = o.at("lambda2").get<double>();
    pt.ratio = o.at("ratio").get<double>();
    pt.n_zero_screened = o.at("n_zero_screened").get<Index>();
    pt.n_fused = o.at("n_fused").get<Index>();
    pt.n_actual_inactive = o.at("n_actual_inactive").get<Index>();
    pt.solve_ms = o.at("solve_ms").get<double>();
    pt.screen_ms = o.at("screen_ms").get<double>();
    pt.iterations = o.at("iterations").get<long>();
    out.push_back(std::move(pt));
  }
  return out;
}

// Dense design + response back out as CSV (the simulate subcommand's output).
inline void write_dense_csv(const std::string& path, const Mat& X, const Vec& y) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) out << detail::fmt17(X(i, j)) << ',';
    out << detail::fmt17(y[i]) << '\n';
  }
  if (!out) throw DataError("write failure: " + path);
}

}  // namespace fls
