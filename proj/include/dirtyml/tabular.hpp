// Copyright 2026 The dirtyml Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "dirtyml/error.hpp"
#include "dirtyml/random.hpp"

namespace dirtyml {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

// One column of raw text cells. `missing[i]` is set once missing-value tokens
// have been resolved; the loader leaves it all-false.
struct Column {
  std::string name;
  std::vector<std::string> cells;
  std::vector<std::uint8_t> missing;

  Column() = default;
  Column(std::string n, std::vector<std::string> c)
      : name(std::move(n)), cells(std::move(c)), missing(cells.size(), 0) {}
  Column(std::string n, std::vector<std::string> c, std::vector<std::uint8_t> m)
      : name(std::move(n)), cells(std::move(c)), missing(std::move(m)) {}

  std::size_t size() const noexcept { return cells.size(); }
  bool is_missing(std::size_t row) const noexcept { return missing[row] != 0; }
};

/// Immutable columnar table of text cells with an optional target column.
///
/// Cells stay text until type inference runs; numeric parsing is deferred so
/// that mixed-type columns survive ingestion untouched.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<Column> columns, std::optional<std::string> target = std::nullopt)
      : columns_(std::move(columns)), target_(std::move(target)) {
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    std::unordered_set<std::string> seen;
    for (const auto& col : columns_) {
      if (col.cells.size() != n_rows_ || col.missing.size() != n_rows_) {
        throw DataError("column '" + col.name + "' has " + std::to_string(col.cells.size()) +
                        " cells, expected " + std::to_string(n_rows_));
      }
      if (!seen.insert(col.name).second) {
        throw DataError("duplicate column name '" + col.name + "'");
      }
    }
    if (target_ && !seen.contains(*target_)) {
      throw DataError("target column '" + *target_ + "' does not exist");
    }
  }

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return columns_.size(); }
  // Feature count M: all columns except the target.
  std::size_t n_features() const noexcept { return columns_.size() - (target_ ? 1 : 0); }

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    return std::nullopt;
  }

  const Column& column(std::string_view name) const {
    if (auto i = find(name)) return columns_[*i];
    throw DataError("no column named '" + std::string(name) + "'");
  }

  const std::optional<std::string>& target() const noexcept { return target_; }
  bool is_target(std::string_view name) const noexcept { return target_ && *target_ == name; }

  Dataset with_target(std::optional<std::string> target) const {
    return Dataset(columns_, std::move(target));
  }

  // Copy of the given rows, in the given order.
  Dataset take_rows(std::span<const std::size_t> rows) const {
    std::vector<Column> out;
    out.reserve(columns_.size());
    for (const auto& col : columns_) {
      Column c;
      c.name = col.name;
      c.cells.reserve(rows.size());
      c.missing.reserve(rows.size());
      for (const auto r : rows) {
        c.cells.push_back(col.cells.at(r));
        c.missing.push_back(col.missing.at(r));
      }
      out.push_back(std::move(c));
    }
    return Dataset(std::move(out), target_);
  }

  bool operator==(const Dataset& other) const {
    if (target_ != other.target_ || columns_.size() != other.columns_.size()) return false;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const auto& a = columns_[i];
      const auto& b = other.columns_[i];
      if (a.name != b.name || a.cells != b.cells || a.missing != b.missing) return false;
    }
    return true;
  }

 private:
  std::vector<Column> columns_;
  std::optional<std::string> target_;
  std::size_t n_rows_ = 0;
};

// ---------------------------------------------------------------------------
// CSV (RFC 4180)
// ---------------------------------------------------------------------------

struct CsvOptions {
  char delimiter = ',';
  char quote = '"';
  bool header = true;
};

namespace detail {

inline bool valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range scalars.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

// Splits RFC 4180 text into records. Quoted fields may contain delimiters,
// doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text,
                                                               const CsvOptions& opts) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == opts.quote) {
        if (i + 1 < text.size() && text[i + 1] == opts.quote) {
          field.push_back(opts.quote);
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == opts.quote && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
      record_has_content = true;
    } else if (c == opts.delimiter) {
      end_field();
      record_has_content = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (!record_has_content && field.empty()) {
        // Blank line: only tolerated as trailing noise, see below.
        records.emplace_back();
        continue;
      }
      end_record();
    } else {
      field.push_back(c);
      record_has_content = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field at end of input");
  if (record_has_content || !field.empty()) end_record();

  while (!records.empty() && records.back().empty()) records.pop_back();
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].empty()) records[r].emplace_back();  // interior blank line = one empty field
  }
  return records;
}

inline bool needs_quoting(std::string_view cell, const CsvOptions& opts, bool single_column) {
  if (cell.empty()) return single_column;
  return cell.find_first_of(std::string{opts.delimiter, opts.quote, '\r', '\n'}) !=
         std::string_view::npos;
}

}  // namespace detail

inline Dataset parse_csv(std::string_view text, const CsvOptions& opts = {}) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  if (!detail::valid_utf8(text)) throw DataError("input is not valid UTF-8");
  auto records = detail::parse_csv_records(text, opts);
  if (records.empty()) throw DataError("empty CSV input");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (opts.header) {
    names = records.front();
    first_data = 1;
  } else {
    for (std::size_t j = 0; j < records.front().size(); ++j) {
      names.push_back("col_" + std::to_string(j + 1));
    }
  }
  const std::size_t width = names.size();
  std::vector<std::vector<std::string>> cells(width);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw DataError("ragged CSV: record " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " fields, expected " +
                      std::to_string(width));
    }
    for (std::size_t j = 0; j < width; ++j) cells[j].push_back(std::move(records[r][j]));
  }
  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t j = 0; j < width; ++j) columns.emplace_back(names[j], std::move(cells[j]));
  return Dataset(std::move(columns));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
  const std::string text = read_file(path);
  if (text.empty()) throw DataError("empty file '" + path + "'");
  return parse_csv(text, opts);
}

inline void write_csv(std::ostream& out, const Dataset& data, const CsvOptions& opts = {}) {
  const bool single = data.n_cols() == 1;
  auto put = [&](std::string_view cell) {
    if (!detail::needs_quoting(cell, opts, single)) {
      out << cell;
      return;
    }
    out << opts.quote;
    for (const char c : cell) {
      if (c == opts.quote) out << opts.quote;
      out << c;
    }
    out << opts.quote;
  };
  for (std::size_t j = 0; j < data.n_cols(); ++j) {
    if (j) out << opts.delimiter;
    put(data.column(j).name);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
      if (j) out << opts.delimiter;
      put(data.column(j).cells[i]);
    }
    out << '\n';
  }
}

inline std::string to_csv(const Dataset& data, const CsvOptions& opts = {}) {
  std::ostringstream out;
  write_csv(out, data, opts);
  return std::move(out).str();
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

enum class SplitKind { holdout, kfold };

/// Deterministic row partition. For holdout, assignment 1 marks the test
/// share; for k-fold, the assignment is the fold index.
struct SplitPlan {
  SplitKind kind = SplitKind::holdout;
  double fraction = 0.25;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;

  std::size_t n_rows() const noexcept { return assignments.size(); }
  std::size_t n_folds() const noexcept { return kind == SplitKind::holdout ? 1 : k; }

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    const std::size_t tag = kind == SplitKind::holdout ? 1 : fold;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] == tag) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    const std::size_t tag = kind == SplitKind::holdout ? 1 : fold;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] != tag) out.push_back(i);
    }
    return out;
  }

  bool operator==(const SplitPlan&) const = default;
};

// Round-half-up share of n.
inline std::size_t holdout_test_size(std::size_t n, double fraction) noexcept {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

inline SplitPlan make_holdout(std::size_t n_rows, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw UsageError("holdout fraction must lie in (0, 1)");
  }
  const std::size_t n_test = holdout_test_size(n_rows, fraction);
  if (n_test == 0 || n_test == n_rows) {
    throw UsageError("holdout of " + std::to_string(n_rows) + " rows leaves an empty partition");
  }
  std::vector<std::size_t> order(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  SplitPlan plan{SplitKind::holdout, fraction, 1, seed, std::vector<std::size_t>(n_rows, 0)};
  for (std::size_t p = 0; p < n_test; ++p) plan.assignments[order[p]] = 1;
  return plan;
}

// Stratified holdout: each class contributes round-half-up(fraction * n_c)
// rows to the test share.
inline SplitPlan make_stratified_holdout(std::span<const int> labels, double fraction,
                                         std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw UsageError("holdout fraction must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  SplitPlan plan{SplitKind::holdout, fraction, 1, seed,
                 std::vector<std::size_t>(labels.size(), 0)};
  Rng rng(seed);
  std::size_t n_test = 0;
  for (auto& [cls, rows] : by_class) {
    rng.shuffle(std::span(rows));
    const std::size_t take = holdout_test_size(rows.size(), fraction);
    for (std::size_t p = 0; p < take; ++p) plan.assignments[rows[p]] = 1;
    n_test += take;
  }
  if (n_test == 0 || n_test == labels.size()) {
    throw UsageError("stratified holdout leaves an empty partition");
  }
  return plan;
}

inline SplitPlan make_kfold(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw UsageError("k-fold needs K >= 2");
  if (k > n_rows) throw UsageError("k-fold needs K <= number of rows");
  std::vector<std::size_t> order(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  SplitPlan plan{SplitKind::kfold, 0.0, k, seed, std::vector<std::size_t>(n_rows, 0)};
  for (std::size_t p = 0; p < n_rows; ++p) plan.assignments[order[p]] = p % k;
  return plan;
}

// ---------------------------------------------------------------------------
// Dense matrix and design matrix
// ---------------------------------------------------------------------------

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw UsageError("matrix data size mismatch");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  Matrix take_rows(std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(rows[i] * cols_), cols_,
                  out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
    }
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
  bool operator==(const Triplet&) const = default;
};

struct SparseBlock {
  std::vector<Triplet> entries;
  bool operator==(const SparseBlock&) const = default;
};

/// One encoder's output: `width` columns produced from `source` by `encoder`.
struct Block {
  std::string source;
  std::string encoder;
  std::size_t width = 0;
  std::variant<Matrix, SparseBlock> values;

  bool operator==(const Block&) const = default;

  bool is_sparse() const noexcept { return std::holds_alternative<SparseBlock>(values); }
};

/// Numeric design matrix assembled from encoder blocks.
///
/// Values are finite, except that numeric pass-through blocks may carry NaN
/// as a missing-value marker until an imputer runs.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  DesignMatrix(std::size_t n_rows, std::vector<Block> blocks)
      : n_rows_(n_rows), blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) validate(b);
  }

  static DesignMatrix dense(std::string source, std::string encoder, Matrix values) {
    const std::size_t n = values.rows();
    Block b{std::move(source), std::move(encoder), values.cols(), std::move(values)};
    return DesignMatrix(n, {std::move(b)});
  }

  static DesignMatrix sparse(std::string source, std::string encoder, std::size_t n_rows,
                             std::size_t width, std::vector<Triplet> entries) {
    Block b{std::move(source), std::move(encoder), width, SparseBlock{std::move(entries)}};
    return DesignMatrix(n_rows, {std::move(b)});
  }

  std::size_t n_rows() const noexcept { return n_rows_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  std::size_t total_width() const noexcept {
    std::size_t w = 0;
    for (const auto& b : blocks_) w += b.width;
    return w;
  }

  // "source:encoder:j" for every column, in order.
  std::vector<std::string> column_labels() const {
    std::vector<std::string> out;
    for (const auto& b : blocks_) {
      for (std::size_t j = 0; j < b.width; ++j) {
        out.push_back(b.source + ":" + b.encoder + ":" + std::to_string(j));
      }
    }
    return out;
  }

  Matrix to_dense() const {
    Matrix out(n_rows_, total_width());
    std::size_t offset = 0;
    for (const auto& b : blocks_) {
      if (const auto* m = std::get_if<Matrix>(&b.values)) {
        for (std::size_t i = 0; i < n_rows_; ++i) {
          std::copy(m->row(i).begin(), m->row(i).end(),
                    out.row(i).begin() + static_cast<std::ptrdiff_t>(offset));
        }
      } else {
        for (const auto& t : std::get<SparseBlock>(b.values).entries) {
          out(t.row, offset + t.col) += t.value;
        }
      }
      offset += b.width;
    }
    return out;
  }

  bool operator==(const DesignMatrix&) const = default;

 private:
  void validate(const Block& b) const {
    if (const auto* m = std::get_if<Matrix>(&b.values)) {
      if (m->rows() != n_rows_) {
        throw DataError("block '" + b.source + "' has " + std::to_string(m->rows()) +
                        " rows, expected " + std::to_string(n_rows_));
      }
      if (m->cols() != b.width) throw DataError("block '" + b.source + "' width mismatch");
      for (const double v : m->data()) {
        if (std::isinf(v)) throw DataError("block '" + b.source + "' has an infinite value");
      }
    } else {
      for (const auto& t : std::get<SparseBlock>(b.values).entries) {
        if (t.row >= n_rows_ || t.col >= b.width || !std::isfinite(t.value)) {
          throw DataError("block '" + b.source + "' has an out-of-range sparse entry");
        }
      }
    }
  }

  std::size_t n_rows_ = 0;
  std::vector<Block> blocks_;
};

/// Horizontal concatenation of design matrices, preserving block order.
inline DesignMatrix assemble(std::span<const DesignMatrix> parts) {
  if (parts.empty()) throw UsageError("assemble needs at least one block");
  const std::size_t n = parts.front().n_rows();
  std::vector<Block> blocks;
  for (const auto& p : parts) {
    if (p.n_rows() != n) {
      throw DataError("cannot assemble blocks with " + std::to_string(p.n_rows()) + " and " +
                      std::to_string(n) + " rows");
    }
    blocks.insert(blocks.end(), p.blocks().begin(), p.blocks().end());
  }
  return DesignMatrix(n, std::move(blocks));
}

inline DesignMatrix assemble(std::initializer_list<DesignMatrix> parts) {
  return assemble(std::span<const DesignMatrix>(parts.begin(), parts.size()));
}

}  // namespace dirtyml
