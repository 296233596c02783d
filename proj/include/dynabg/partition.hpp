#ifndef DYNABG_PARTITION_HPP
#define DYNABG_PARTITION_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dynabg {

// (pixel row j, frame column k) of a stacked pixel matrix.
struct MatrixEntry {
  int pixel = 0;
  int frame = 0;

  bool operator==(const MatrixEntry&) const = default;
};

// Disjoint groups of matrix entries covering all rows x cols positions.
struct GroupPartition {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<MatrixEntry>> groups;

  std::size_t group_count() const { return groups.size(); }
  std::size_t entry_count() const { return static_cast<std::size_t>(rows) * cols; }

  // Disjointness, full coverage, no empty group. Throws std::invalid_argument.
  void validate() const;

  // Group id per matrix entry; requires a valid partition.
  Eigen::MatrixXi labels() const;

  static GroupPartition from_labels(const Eigen::MatrixXi& labels);
  static GroupPartition singletons(int rows, int cols);
  static GroupPartition whole_columns(int rows, int cols);
};

struct PartitionStats {
  std::size_t group_count = 0;
  std::size_t entry_count = 0;
  std::size_t min_size = 0;
  std::size_t max_size = 0;
  double mean_size = 0.0;
  std::map<std::size_t, std::size_t> size_histogram;  // size -> #groups
};

PartitionStats partition_stats(const GroupPartition& partition);

// Text format consumed by the detect pipeline: header "rows cols",
// then one "pixel frame group_id" line per matrix entry.
void save_partition(const GroupPartition& partition, const std::filesystem::path& file);
GroupPartition load_partition(const std::filesystem::path& file);

}  // namespace dynabg

#endif
