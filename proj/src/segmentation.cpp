#include "dynabg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "dynabg/parallel.hpp"

namespace dynabg {

void SegmentationConfig::validate() const {
  if (target_superpixels < 1) {
    throw std::invalid_argument("superpixels must be >= 1");
  }
  if (!(compactness > 0.0)) {
    throw std::invalid_argument("compactness must be > 0");
  }
  if (merge_threshold < 0.0) {
    throw std::invalid_argument("merge-threshold must be >= 0");
  }
  if (center_threshold < 0.0) {
    throw std::invalid_argument("center-threshold must be >= 0");
  }
  if (similarity_threshold < 0.0) {
    throw std::invalid_argument("similarity-threshold must be >= 0");
  }
}

namespace {

struct ClusterCenter {
  double x = 0.0;
  double y = 0.0;
  double intensity = 0.0;
};

// Largest-component relabeling: every final label is one 4-connected
// region; fragments are absorbed into an already-relabeled neighbor.
std::vector<int> enforce_connectivity(const std::vector<int>& labels, int width,
                                      int height, int* out_count) {
  const int n = width * height;
  std::vector<int> component(n, -1);
  std::vector<int> comp_label;
  std::vector<int> comp_size;
  std::deque<int> queue;

  for (int start = 0; start < n; ++start) {
    if (component[start] >= 0) continue;
    const int id = static_cast<int>(comp_label.size());
    comp_label.push_back(labels[start]);
    comp_size.push_back(0);
    component[start] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop_front();
      ++comp_size[id];
      const int x = p % width, y = p / width;
      const int neighbors[4] = {x > 0 ? p - 1 : -1, x + 1 < width ? p + 1 : -1,
                                y > 0 ? p - width : -1, y + 1 < height ? p + width : -1};
      for (int q : neighbors) {
        if (q >= 0 && component[q] < 0 && labels[q] == labels[start]) {
          component[q] = id;
          queue.push_back(q);
        }
      }
    }
  }

  // largest component per label keeps it; scan order breaks size ties
  const int label_count = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> best_component(label_count, -1);
  for (std::size_t c = 0; c < comp_label.size(); ++c) {
    int& best = best_component[static_cast<std::size_t>(comp_label[c])];
    if (best < 0 || comp_size[c] > comp_size[best]) best = static_cast<int>(c);
  }

  std::vector<int> relabeled(n, -1);
  std::vector<int> component_new_label(comp_label.size(), -1);
  int next_label = 0;
  for (int p = 0; p < n; ++p) {
    const int c = component[p];
    if (component_new_label[c] >= 0) {
      relabeled[p] = component_new_label[c];
      continue;
    }
    int assigned;
    if (best_component[static_cast<std::size_t>(comp_label[c])] == c) {
      assigned = next_label++;
    } else {
      // fragment: absorb into the left/up neighbor seen first in scan order
      const int x = p % width, y = p / width;
      if (x > 0 && relabeled[p - 1] >= 0) {
        assigned = relabeled[p - 1];
      } else if (y > 0 && relabeled[p - width] >= 0) {
        assigned = relabeled[p - width];
      } else {
        assigned = next_label++;  // fragment at the origin corner
      }
    }
    component_new_label[c] = assigned;
    relabeled[p] = assigned;
    // fill the rest of this component immediately so later fragments can
    // absorb into it
    std::deque<int> fill{p};
    while (!fill.empty()) {
      const int q = fill.front();
      fill.pop_front();
      const int qx = q % width, qy = q / width;
      const int neighbors[4] = {qx > 0 ? q - 1 : -1, qx + 1 < width ? q + 1 : -1,
                                qy > 0 ? q - width : -1,
                                qy + 1 < height ? q + width : -1};
      for (int r : neighbors) {
        if (r >= 0 && component[r] == c && relabeled[r] < 0) {
          relabeled[r] = assigned;
          fill.push_back(r);
        }
      }
    }
  }
  *out_count = next_label;
  return relabeled;
}

}  // namespace

std::vector<Superpixel> oversegment(const Frame& frame, int target_count,
                                    double compactness) {
  const int n = frame.width * frame.height;
  if (n <= 0) throw std::invalid_argument("empty frame");
  if (target_count < 1) throw std::invalid_argument("superpixels must be >= 1");
  if (target_count > n) {
    throw std::invalid_argument("target_count " + std::to_string(target_count) +
                                " exceeds pixel count " + std::to_string(n));
  }
  if (!(compactness > 0.0)) throw std::invalid_argument("compactness must be > 0");

  // grid of cluster seeds approximating target_count with the frame aspect
  const double aspect = static_cast<double>(frame.width) / frame.height;
  int nx = static_cast<int>(std::lround(std::sqrt(target_count * aspect)));
  nx = std::clamp(nx, 1, frame.width);
  int ny = static_cast<int>(std::lround(static_cast<double>(target_count) / nx));
  ny = std::clamp(ny, 1, frame.height);

  std::vector<ClusterCenter> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      ClusterCenter c;
      c.x = (gx + 0.5) * frame.width / nx;
      c.y = (gy + 0.5) * frame.height / ny;
      const int px = std::min(frame.width - 1, static_cast<int>(c.x));
      const int py = std::min(frame.height - 1, static_cast<int>(c.y));
      c.intensity = frame.at(px, py);
      centers.push_back(c);
    }
  }

  const double interval = std::sqrt(static_cast<double>(n) / centers.size());
  const double spatial_weight = compactness / interval;
  const int search = std::max(1, static_cast<int>(std::ceil(2.0 * interval)));

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  // initial assignment: nearest seed spatially, so no pixel is unlabeled
  for (int p = 0; p < n; ++p) {
    const double x = p % frame.width, y = p / frame.width;
    double best = std::numeric_limits<double>::max();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = (x - centers[c].x) * (x - centers[c].x) +
                       (y - centers[c].y) * (y - centers[c].y);
      if (d < best) {
        best = d;
        labels[static_cast<std::size_t>(p)] = static_cast<int>(c);
      }
    }
  }

  std::vector<double> best_dist(static_cast<std::size_t>(n));
  for (int pass = 0; pass < 10; ++pass) {
    std::fill(best_dist.begin(), best_dist.end(), std::numeric_limits<double>::max());
    std::vector<int> next_labels = labels;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const ClusterCenter& ctr = centers[c];
      const int x0 = std::max(0, static_cast<int>(ctr.x) - search);
      const int x1 = std::min(frame.width - 1, static_cast<int>(ctr.x) + search);
      const int y0 = std::max(0, static_cast<int>(ctr.y) - search);
      const int y1 = std::min(frame.height - 1, static_cast<int>(ctr.y) + search);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * frame.width + x;
          const double dc = frame.data[p] - ctr.intensity;
          const double dx = x - ctr.x, dy = y - ctr.y;
          const double ds2 = dx * dx + dy * dy;
          const double dist = dc * dc + ds2 * spatial_weight * spatial_weight;
          if (dist < best_dist[p]) {
            best_dist[p] = dist;
            next_labels[p] = static_cast<int>(c);
          }
        }
      }
    }
    labels = std::move(next_labels);

    // recompute centers as member means
    std::vector<double> sx(centers.size(), 0.0), sy(centers.size(), 0.0),
        si(centers.size(), 0.0);
    std::vector<int> count(centers.size(), 0);
    for (int p = 0; p < n; ++p) {
      const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(p)]);
      sx[c] += p % frame.width;
      sy[c] += p / frame.width;
      si[c] += frame.data[static_cast<std::size_t>(p)];
      ++count[c];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (count[c] > 0) {
        centers[c].x = sx[c] / count[c];
        centers[c].y = sy[c] / count[c];
        centers[c].intensity = si[c] / count[c];
      }
    }
  }

  int region_count = 0;
  const std::vector<int> final_labels =
      enforce_connectivity(labels, frame.width, frame.height, &region_count);

  std::vector<Superpixel> result(static_cast<std::size_t>(region_count));
  for (int p = 0; p < n; ++p) {
    result[static_cast<std::size_t>(final_labels[static_cast<std::size_t>(p)])]
        .pixels.push_back(p);
  }
  for (Superpixel& sp : result) {
    double sx = 0.0, sy = 0.0, si = 0.0;
    for (int p : sp.pixels) {
      sx += p % frame.width;
      sy += p / frame.width;
      si += frame.data[static_cast<std::size_t>(p)];
    }
    const double count = static_cast<double>(sp.pixels.size());
    sp.centroid_x = sx / count;
    sp.centroid_y = sy / count;
    sp.mean_intensity = si / count;
  }
  return result;
}

namespace {

struct Region {
  std::vector<int> pixels;
  double sum = 0.0;
  double sum_sq = 0.0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  std::set<int> adjacent;
  bool alive = true;

  double mean() const { return sum / pixels.size(); }
  double variance() const {
    const double m = mean();
    return std::max(0.0, sum_sq / pixels.size() - m * m);
  }
};

double feature_distance(double mean_a, double var_a, double mean_b, double var_b) {
  const double dm = mean_a - mean_b;
  const double dv = var_a - var_b;
  return std::sqrt(dm * dm + dv * dv);
}

}  // namespace

std::vector<Subregion> segment_frame(const Frame& frame,
                                     const std::vector<Superpixel>& superpixels,
                                     int frame_index, double merge_threshold) {
  if (merge_threshold < 0.0) throw std::invalid_argument("merge-threshold must be >= 0");
  if (superpixels.empty()) throw std::invalid_argument("no superpixels");
  const int n = frame.width * frame.height;

  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t s = 0; s < superpixels.size(); ++s) {
    for (int p : superpixels[s].pixels) {
      if (p < 0 || p >= n || owner[static_cast<std::size_t>(p)] >= 0) {
        throw std::invalid_argument("superpixels do not partition the frame");
      }
      owner[static_cast<std::size_t>(p)] = static_cast<int>(s);
    }
  }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
    throw std::invalid_argument("superpixels do not cover the frame");
  }

  std::vector<Region> regions(superpixels.size());
  for (std::size_t s = 0; s < superpixels.size(); ++s) {
    Region& r = regions[s];
    r.pixels = superpixels[s].pixels;
    for (int p : r.pixels) {
      const double v = frame.data[static_cast<std::size_t>(p)];
      r.sum += v;
      r.sum_sq += v * v;
      r.sum_x += p % frame.width;
      r.sum_y += p / frame.width;
    }
  }
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const int a = owner[static_cast<std::size_t>(y) * frame.width + x];
      if (x + 1 < frame.width) {
        const int b = owner[static_cast<std::size_t>(y) * frame.width + x + 1];
        if (a != b) {
          regions[static_cast<std::size_t>(a)].adjacent.insert(b);
          regions[static_cast<std::size_t>(b)].adjacent.insert(a);
        }
      }
      if (y + 1 < frame.height) {
        const int b = owner[(static_cast<std::size_t>(y) + 1) * frame.width + x];
        if (a != b) {
          regions[static_cast<std::size_t>(a)].adjacent.insert(b);
          regions[static_cast<std::size_t>(b)].adjacent.insert(a);
        }
      }
    }
  }

  // greedy agglomeration: closest adjacent pair below threshold merges first
  for (;;) {
    double best = std::numeric_limits<double>::max();
    int best_a = -1, best_b = -1;
    for (std::size_t a = 0; a < regions.size(); ++a) {
      if (!regions[a].alive) continue;
      for (int b : regions[a].adjacent) {
        if (static_cast<std::size_t>(b) <= a || !regions[static_cast<std::size_t>(b)].alive) continue;
        const double d = feature_distance(
            regions[a].mean(), regions[a].variance(),
            regions[static_cast<std::size_t>(b)].mean(),
            regions[static_cast<std::size_t>(b)].variance());
        if (d < best) {
          best = d;
          best_a = static_cast<int>(a);
          best_b = b;
        }
      }
    }
    if (best_a < 0 || best >= merge_threshold) break;

    Region& target = regions[static_cast<std::size_t>(best_a)];
    Region& victim = regions[static_cast<std::size_t>(best_b)];
    target.pixels.insert(target.pixels.end(), victim.pixels.begin(), victim.pixels.end());
    target.sum += victim.sum;
    target.sum_sq += victim.sum_sq;
    target.sum_x += victim.sum_x;
    target.sum_y += victim.sum_y;
    victim.alive = false;
    for (int nb : victim.adjacent) {
      if (nb == best_a) continue;
      Region& other = regions[static_cast<std::size_t>(nb)];
      other.adjacent.erase(best_b);
      if (other.alive) {
        other.adjacent.insert(best_a);
        target.adjacent.insert(nb);
      }
    }
    target.adjacent.erase(best_b);
    victim.adjacent.clear();
  }

  std::vector<Subregion> result;
  for (const Region& r : regions) {
    if (!r.alive) continue;
    Subregion sub;
    sub.frame_index = frame_index;
    sub.pixels = r.pixels;
    std::sort(sub.pixels.begin(), sub.pixels.end());
    const double count = static_cast<double>(r.pixels.size());
    sub.centroid_x = r.sum_x / count;
    sub.centroid_y = r.sum_y / count;
    sub.mean_intensity = r.mean();
    sub.intensity_variance = r.variance();
    result.push_back(std::move(sub));
  }
  std::sort(result.begin(), result.end(),
            [](const Subregion& a, const Subregion& b) {
              return a.pixels.front() < b.pixels.front();
            });
  return result;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void merge(int a, int b) { parent[static_cast<std::size_t>(find(b))] = find(a); }
};

}  // namespace

GroupPartition link_frames(const std::vector<std::vector<Subregion>>& per_frame,
                           int pixels_per_frame, double center_threshold,
                           double similarity_threshold) {
  if (per_frame.empty()) throw std::invalid_argument("no frames");
  if (pixels_per_frame <= 0) throw std::invalid_argument("pixels_per_frame must be > 0");

  std::vector<std::pair<int, int>> nodes;  // (frame, index within frame)
  std::vector<int> first_node_of_frame(per_frame.size());
  for (std::size_t k = 0; k < per_frame.size(); ++k) {
    first_node_of_frame[k] = static_cast<int>(nodes.size());
    for (std::size_t i = 0; i < per_frame[k].size(); ++i) {
      nodes.emplace_back(static_cast<int>(k), static_cast<int>(i));
    }
  }

  // candidate links between adjacent frames, closest feature first;
  // pair order itself breaks exact ties deterministically
  struct Candidate {
    double distance;
    int a, b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t k = 0; k + 1 < per_frame.size(); ++k) {
    for (std::size_t i = 0; i < per_frame[k].size(); ++i) {
      const Subregion& ra = per_frame[k][i];
      for (std::size_t j = 0; j < per_frame[k + 1].size(); ++j) {
        const Subregion& rb = per_frame[k + 1][j];
        const double dx = ra.centroid_x - rb.centroid_x;
        const double dy = ra.centroid_y - rb.centroid_y;
        if (std::sqrt(dx * dx + dy * dy) >= center_threshold) continue;
        candidates.push_back(
            {feature_distance(ra.mean_intensity, ra.intensity_variance,
                              rb.mean_intensity, rb.intensity_variance),
             first_node_of_frame[k] + static_cast<int>(i),
             first_node_of_frame[k + 1] + static_cast<int>(j)});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.distance < b.distance;
                   });

  UnionFind uf(nodes.size());
  for (const Candidate& c : candidates) {
    if (c.distance >= similarity_threshold) break;
    if (uf.find(c.a) != uf.find(c.b)) uf.merge(c.a, c.b);
  }

  GroupPartition partition;
  partition.rows = pixels_per_frame;
  partition.cols = static_cast<int>(per_frame.size());
  std::vector<int> root_group(nodes.size(), -1);
  for (std::size_t node = 0; node < nodes.size(); ++node) {
    const int root = uf.find(static_cast<int>(node));
    int& g = root_group[static_cast<std::size_t>(root)];
    if (g < 0) {
      g = static_cast<int>(partition.groups.size());
      partition.groups.emplace_back();
    }
    const auto& [frame, index] = nodes[node];
    const Subregion& sub = per_frame[static_cast<std::size_t>(frame)]
                                    [static_cast<std::size_t>(index)];
    auto& group = partition.groups[static_cast<std::size_t>(g)];
    for (int p : sub.pixels) {
      group.push_back({p, frame});
    }
  }
  partition.validate();
  return partition;
}

GroupPartition video_segmentation(const FrameSequence& seq,
                                  const SegmentationConfig& config) {
  config.validate();
  seq.validate();
  std::vector<std::vector<Subregion>> per_frame(seq.size());
  parallel_for(seq.size(), [&](std::size_t k) {
    const auto superpixels =
        oversegment(seq[k], config.target_superpixels, config.compactness);
    per_frame[k] = segment_frame(seq[k], superpixels, static_cast<int>(k),
                                 config.merge_threshold);
  });
  return link_frames(per_frame, seq.width() * seq.height(),
                     config.center_threshold, config.similarity_threshold);
}

}  // namespace dynabg
