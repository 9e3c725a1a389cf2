#include "kernelseg/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace kernelseg {

SemanticVote instance_semantic_vote(const MatX& soft_masks,
                                    const std::vector<int>& hard_semantics) {
  if (static_cast<size_t>(soft_masks.cols()) != hard_semantics.size()) {
    throw std::invalid_argument("instance_semantic_vote: length mismatch");
  }
  SemanticVote vote;
  for (int k = 0; k < soft_masks.rows(); ++k) {
    std::map<int, int> counts;
    for (int i = 0; i < soft_masks.cols(); ++i) {
      if (soft_masks(k, i) > 0.5) counts[hard_semantics[i]]++;
    }
    if (counts.empty()) {
      vote.labels.push_back(0);
      vote.has_support.push_back(0);
      continue;
    }
    int best_class = counts.begin()->first;
    int best_count = counts.begin()->second;
    for (const auto& [cls, cnt] : counts) {
      if (cnt > best_count) {  // map order gives lowest class on ties
        best_class = cls;
        best_count = cnt;
      }
    }
    vote.labels.push_back(best_class);
    vote.has_support.push_back(1);
  }
  return vote;
}

MatX cost_matrix(const MatX& pred_centroids, const std::vector<int>& pred_classes,
                 const MatX& gt_centroids, const std::vector<int>& gt_classes,
                 double mismatch_penalty) {
  if (mismatch_penalty < 0.0) {
    throw std::invalid_argument("cost_matrix: penalty must be >= 0");
  }
  MatX cost(pred_centroids.rows(), gt_centroids.rows());
  for (int i = 0; i < pred_centroids.rows(); ++i) {
    for (int j = 0; j < gt_centroids.rows(); ++j) {
      cost(i, j) = (pred_centroids.row(i) - gt_centroids.row(j)).norm() +
                   (pred_classes[i] != gt_classes[j] ? mismatch_penalty : 0.0);
    }
  }
  return cost;
}

namespace {

// Potentials method on an n x m matrix with n <= m. Returns column index per
// row.
std::vector<int> solve_rectangular(const MatX& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment hungarian(const MatX& cost) {
  Assignment result;
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) return result;
  if (!cost.allFinite()) {
    throw std::invalid_argument("hungarian: cost matrix must be finite");
  }
  if (rows <= cols) {
    auto row_to_col = solve_rectangular(cost);
    for (int i = 0; i < rows; ++i) result.pairs.emplace_back(i, row_to_col[i]);
  } else {
    auto col_to_row = solve_rectangular(cost.transpose());
    for (int j = 0; j < cols; ++j) result.pairs.emplace_back(col_to_row[j], j);
    std::sort(result.pairs.begin(), result.pairs.end());
  }
  for (const auto& [i, j] : result.pairs) result.total_cost += cost(i, j);
  return result;
}

double iou(const std::vector<char>& a, const std::vector<char>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("iou: length mismatch");
  int inter = 0, uni = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

MaskLossResult mask_loss(const MatX& soft_masks,
                         const std::vector<std::vector<char>>& gt_masks,
                         const Assignment& assignment) {
  const int n = static_cast<int>(soft_masks.cols());
  MaskLossResult result;
  double sum = 0.0;
  for (const auto& [pred, gt] : assignment.pairs) {
    const auto& gt_mask = gt_masks[gt];
    std::vector<char> hard(n);
    for (int i = 0; i < n; ++i) hard[i] = soft_masks(pred, i) > 0.5;
    if (!(iou(hard, gt_mask) > 0.25)) continue;

    double bce = 0.0, dot = 0.0, soft_mass = 0.0, gt_mass = 0.0;
    for (int i = 0; i < n; ++i) {
      double m = soft_masks(pred, i);
      double clamped = std::clamp(m, 1e-7, 1.0 - 1e-7);
      double t = gt_mask[i] ? 1.0 : 0.0;
      bce += -(t * std::log(clamped) + (1.0 - t) * std::log(1.0 - clamped));
      dot += m * t;
      soft_mass += m;
      gt_mass += t;
    }
    double dice = 1.0 - 2.0 * dot / (soft_mass + gt_mass);
    sum += bce / n + dice;
    ++result.matched;
  }
  result.value = result.matched > 0 ? sum / result.matched : 0.0;
  return result;
}

double semantic_loss(const MatX& scores, const std::vector<int>& gt_labels) {
  if (static_cast<size_t>(scores.rows()) != gt_labels.size()) {
    throw std::invalid_argument("semantic_loss: length mismatch");
  }
  const int n = static_cast<int>(scores.rows());
  double ce = 0.0, dot = 0.0, pred_mass = 0.0, gt_mass = 0.0;
  for (int i = 0; i < n; ++i) {
    double p = std::max(scores(i, gt_labels[i]), 1e-12);
    ce += -std::log(p);
    dot += scores(i, gt_labels[i]);
    pred_mass += scores.row(i).squaredNorm();
    gt_mass += 1.0;
  }
  double dice = 1.0 - 2.0 * dot / (pred_mass + gt_mass);
  return ce / n + dice;
}

double offset_loss(const MatX& offsets, const MatX& target,
                   const std::vector<char>& is_instance) {
  if (offsets.rows() != target.rows() ||
      static_cast<size_t>(offsets.rows()) != is_instance.size()) {
    throw std::invalid_argument("offset_loss: length mismatch");
  }
  constexpr double kMinNorm = 1e-8;
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < offsets.rows(); ++i) {
    if (!is_instance[i]) continue;
    ++count;
    Vec3 o = offsets.row(i).transpose();
    Vec3 t = target.row(i).transpose();
    if (o == t) continue;  // both terms vanish exactly
    sum += (o - t).norm();
    if (o.norm() >= kMinNorm && t.norm() >= kMinNorm) {
      double cosine = std::clamp(o.dot(t) / (o.norm() * t.norm()), -1.0, 1.0);
      sum += 1.0 - cosine;
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

}  // namespace kernelseg
