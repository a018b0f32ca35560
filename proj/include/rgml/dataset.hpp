#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rgml/spd.hpp"

namespace rgml {

/// m samples in R^p with labels in 1..K. Every class is nonempty and every
/// feature finite.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  /// Throws InvalidInput if labels are outside 1..num_classes, a class is
  /// empty, sizes disagree, or features are non-finite.
  LabeledDataset(std::string name, Matrix features, std::vector<int> labels, int num_classes);

  const std::string& name() const { return name_; }
  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  int num_classes() const { return num_classes_; }
  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }

  /// Row indices of samples labelled `label` (1-based label).
  std::vector<Index> class_indices(int label) const;

  /// Rows `rows` in the given order, same class count.
  LabeledDataset subset(const std::vector<Index>& rows) const;

  /// Copy with replaced labels; class nonemptiness is not re-required since
  /// mislabeling may empty a class in the training split.
  LabeledDataset with_labels(std::vector<int> labels) const;

 private:
  std::string name_;
  Matrix features_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

/// Label column selector for CSV ingestion: a header name or a zero-based
/// index. A negative index counts from the end (-1 is the last column).
struct LabelColumn {
  std::string name;
  int index = -1;

  static LabelColumn by_name(std::string n) { return {std::move(n), 0}; }
  static LabelColumn by_index(int i) { return {{}, i}; }
  /// Integer text selects by index, anything else by name.
  static LabelColumn parse(const std::string& spec);
};

/// Reads a comma-separated file with an optional header row. Labels are
/// remapped to 1..K by first appearance. Throws InvalidInput for unreadable
/// files, ragged or non-numeric rows (reported with 1-based line numbers), and
/// single-class data.
LabeledDataset load_dataset(const std::filesystem::path& path, const LabelColumn& label_column);

}  // namespace rgml
