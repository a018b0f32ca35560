#include "rgml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rgml {

LabeledDataset::LabeledDataset(std::string name, Matrix features, std::vector<int> labels, int num_classes)
    : name_(std::move(name)), features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (static_cast<Index>(labels_.size()) != features_.rows()) {
    throw InvalidInput("LabeledDataset: label count does not match the number of rows");
  }
  if (num_classes_ < 1) throw InvalidInput("LabeledDataset: need at least one class");
  if (!features_.allFinite()) throw InvalidInput("LabeledDataset: non-finite feature values");
  std::vector<int> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int y : labels_) {
    if (y < 1 || y > num_classes_) throw InvalidInput("LabeledDataset: label out of range 1..K");
    ++counts[static_cast<std::size_t>(y - 1)];
  }
  for (int k = 0; k < num_classes_; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      throw InvalidInput("LabeledDataset: class " + std::to_string(k + 1) + " is empty");
    }
  }
}

std::vector<Index> LabeledDataset::class_indices(int label) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(static_cast<Index>(i));
  }
  return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<Index>& rows) const {
  LabeledDataset out;
  out.name_ = name_;
  out.num_classes_ = num_classes_;
  out.features_.resize(static_cast<Index>(rows.size()), dim());
  out.labels_.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features_.row(static_cast<Index>(i)) = features_.row(rows[i]);
    out.labels_.push_back(labels_[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

LabeledDataset LabeledDataset::with_labels(std::vector<int> labels) const {
  if (labels.size() != labels_.size()) throw InvalidInput("with_labels: size mismatch");
  for (int y : labels) {
    if (y < 1 || y > num_classes_) throw InvalidInput("with_labels: label out of range 1..K");
  }
  LabeledDataset out = *this;
  out.labels_ = std::move(labels);
  return out;
}

LabelColumn LabelColumn::parse(const std::string& spec) {
  int value = 0;
  const char* first = spec.data();
  const char* last = spec.data() + spec.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc() && ptr == last && !spec.empty()) return by_index(value);
  return by_name(spec);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool is_missing(const std::string& s) { return s.empty() || s == "?" || s == "NA" || s == "NaN" || s == "nan"; }

}  // namespace

LabeledDataset load_dataset(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("load_dataset: cannot open " + path.string());

  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_csv_line(line));
  }
  if (rows.empty()) throw InvalidInput("load_dataset: " + path.string() + " is empty");

  const std::size_t ncols = rows.front().second.size();
  if (ncols < 2) throw InvalidInput("load_dataset: need at least one feature column and a label column");

  // Resolve the label column against the first row (which may be a header).
  std::size_t label_idx = 0;
  const std::vector<std::string>& first = rows.front().second;
  if (!label_column.name.empty()) {
    auto it = std::find(first.begin(), first.end(), label_column.name);
    if (it == first.end()) throw InvalidInput("load_dataset: no column named '" + label_column.name + "'");
    label_idx = static_cast<std::size_t>(it - first.begin());
  } else {
    const int n = static_cast<int>(ncols);
    const int idx = label_column.index < 0 ? n + label_column.index : label_column.index;
    if (idx < 0 || idx >= n) throw InvalidInput("load_dataset: label column index out of range");
    label_idx = static_cast<std::size_t>(idx);
  }

  // The first row is a header when any of its feature fields is not numeric.
  bool has_header = !label_column.name.empty();
  if (!has_header) {
    for (std::size_t c = 0; c < ncols; ++c) {
      double v = 0;
      if (c != label_idx && !is_missing(first[c]) && !parse_double(first[c], v)) has_header = true;
    }
  }

  const std::size_t start = has_header ? 1 : 0;
  const std::size_t m = rows.size() - start;
  const Index p = static_cast<Index>(ncols - 1);
  Matrix features(static_cast<Index>(m), p);
  std::vector<int> labels;
  labels.reserve(m);
  std::map<std::string, int> label_ids;
  std::vector<std::size_t> missing_rows;

  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& [lno, fields] = rows[r];
    if (fields.size() != ncols) {
      throw InvalidInput("load_dataset: line " + std::to_string(lno) + " has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(ncols));
    }
    bool row_missing = false;
    Index col = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == label_idx) continue;
      double v = 0;
      if (is_missing(fields[c])) {
        row_missing = true;
      } else if (!parse_double(fields[c], v)) {
        throw InvalidInput("load_dataset: non-numeric feature '" + fields[c] + "' on line " + std::to_string(lno));
      }
      features(static_cast<Index>(r - start), col++) = v;
    }
    if (is_missing(fields[label_idx])) row_missing = true;
    if (row_missing) {
      missing_rows.push_back(lno);
      labels.push_back(0);
      continue;
    }
    auto [it, inserted] = label_ids.emplace(fields[label_idx], static_cast<int>(label_ids.size()) + 1);
    labels.push_back(it->second);
  }

  if (!missing_rows.empty()) {
    std::ostringstream os;
    os << "load_dataset: missing values on line(s)";
    for (std::size_t l : missing_rows) os << ' ' << l;
    throw InvalidInput(os.str());
  }
  if (m == 0) throw InvalidInput("load_dataset: no data rows");
  if (label_ids.size() < 2) throw InvalidInput("load_dataset: need at least two classes, found " +
                                               std::to_string(label_ids.size()));

  return LabeledDataset(path.stem().string(), std::move(features), std::move(labels),
                        static_cast<int>(label_ids.size()));
}

}  // namespace rgml
