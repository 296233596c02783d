#include "dynabg/partition.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dynabg {

void GroupPartition::validate() const {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("partition has empty shape");
  }
  std::vector<char> seen(entry_count(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw std::invalid_argument("group " + std::to_string(g) + " is empty");
    }
    for (const MatrixEntry& e : groups[g]) {
      if (e.pixel < 0 || e.pixel >= rows || e.frame < 0 || e.frame >= cols) {
        std::ostringstream msg;
        msg << "entry (" << e.pixel << "," << e.frame << ") outside " << rows
            << "x" << cols;
        throw std::invalid_argument(msg.str());
      }
      char& flag = seen[static_cast<std::size_t>(e.pixel) * cols + e.frame];
      if (flag) {
        std::ostringstream msg;
        msg << "entry (" << e.pixel << "," << e.frame << ") belongs to two groups";
        throw std::invalid_argument(msg.str());
      }
      flag = 1;
    }
  }
  const auto missing = std::find(seen.begin(), seen.end(), 0);
  if (missing != seen.end()) {
    const std::size_t idx = static_cast<std::size_t>(missing - seen.begin());
    std::ostringstream msg;
    msg << "entry (" << idx / cols << "," << idx % cols << ") is uncovered";
    throw std::invalid_argument(msg.str());
  }
}

Eigen::MatrixXi GroupPartition::labels() const {
  validate();
  Eigen::MatrixXi ids(rows, cols);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const MatrixEntry& e : groups[g]) {
      ids(e.pixel, e.frame) = static_cast<int>(g);
    }
  }
  return ids;
}

GroupPartition GroupPartition::from_labels(const Eigen::MatrixXi& labels) {
  GroupPartition p;
  p.rows = static_cast<int>(labels.rows());
  p.cols = static_cast<int>(labels.cols());
  const int max_label = labels.maxCoeff();
  if (labels.minCoeff() < 0) {
    throw std::invalid_argument("negative group label");
  }
  p.groups.resize(static_cast<std::size_t>(max_label) + 1);
  for (int j = 0; j < p.rows; ++j) {
    for (int k = 0; k < p.cols; ++k) {
      p.groups[static_cast<std::size_t>(labels(j, k))].push_back({j, k});
    }
  }
  // drop label ids that never occurred
  std::erase_if(p.groups, [](const auto& g) { return g.empty(); });
  p.validate();
  return p;
}

GroupPartition GroupPartition::singletons(int rows, int cols) {
  GroupPartition p;
  p.rows = rows;
  p.cols = cols;
  p.groups.reserve(static_cast<std::size_t>(rows) * cols);
  for (int j = 0; j < rows; ++j) {
    for (int k = 0; k < cols; ++k) {
      p.groups.push_back({{j, k}});
    }
  }
  return p;
}

GroupPartition GroupPartition::whole_columns(int rows, int cols) {
  GroupPartition p;
  p.rows = rows;
  p.cols = cols;
  p.groups.resize(static_cast<std::size_t>(cols));
  for (int k = 0; k < cols; ++k) {
    auto& g = p.groups[static_cast<std::size_t>(k)];
    g.reserve(static_cast<std::size_t>(rows));
    for (int j = 0; j < rows; ++j) {
      g.push_back({j, k});
    }
  }
  return p;
}

PartitionStats partition_stats(const GroupPartition& partition) {
  partition.validate();
  PartitionStats stats;
  stats.group_count = partition.group_count();
  stats.entry_count = partition.entry_count();
  stats.min_size = partition.entry_count();
  for (const auto& g : partition.groups) {
    stats.min_size = std::min(stats.min_size, g.size());
    stats.max_size = std::max(stats.max_size, g.size());
    ++stats.size_histogram[g.size()];
  }
  stats.mean_size = static_cast<double>(stats.entry_count) /
                    static_cast<double>(stats.group_count);
  return stats;
}

void save_partition(const GroupPartition& partition, const std::filesystem::path& file) {
  partition.validate();
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write: " + file.string());
  out << partition.rows << " " << partition.cols << "\n";
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    for (const MatrixEntry& e : partition.groups[g]) {
      out << e.pixel << " " << e.frame << " " << g << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

GroupPartition load_partition(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  GroupPartition p;
  if (!(in >> p.rows >> p.cols)) {
    throw std::runtime_error("bad partition header: " + file.string());
  }
  std::unordered_map<long long, std::size_t> index;  // file id -> group slot
  int pixel = 0, frame = 0;
  long long id = 0;
  while (in >> pixel >> frame >> id) {
    auto [it, inserted] = index.try_emplace(id, p.groups.size());
    if (inserted) p.groups.emplace_back();
    p.groups[it->second].push_back({pixel, frame});
  }
  if (!in.eof()) {
    throw std::runtime_error("bad partition line in " + file.string());
  }
  p.validate();
  return p;
}

}  // namespace dynabg
