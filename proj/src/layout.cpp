// Layout heuristics: reading order, table detection, graphics filtering.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "docsray/ingestion.hpp"

namespace docsray {
namespace {

using T = IngestionThresholds;

double horizontal_extent(std::span<const LayoutBlock> blocks) {
  if (blocks.empty()) return 0.0;
  double lo = blocks.front().bbox.x0;
  double hi = blocks.front().bbox.x1;
  for (const auto& b : blocks) {
    lo = std::min(lo, b.bbox.x0);
    hi = std::max(hi, b.bbox.x1);
  }
  return hi - lo;
}

bool reading_before(const LayoutBlock& a, const LayoutBlock& b) {
  if (a.bbox.y0 != b.bbox.y0) return a.bbox.y0 < b.bbox.y0;
  return a.bbox.x0 < b.bbox.x0;
}

std::vector<LayoutBlock> sorted_by_y(std::vector<LayoutBlock> blocks) {
  std::stable_sort(blocks.begin(), blocks.end(), reading_before);
  return blocks;
}

// Lloyd iterations for k=2 on a line, seeded at the extremes. Returns false
// when the data do not support two non-empty clusters.
bool two_means(const std::vector<double>& xs, double& c0, double& c1, std::vector<int>& label) {
  c0 = *std::min_element(xs.begin(), xs.end());
  c1 = *std::max_element(xs.begin(), xs.end());
  if (!(c1 > c0)) return false;
  label.assign(xs.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    double s0 = 0, s1 = 0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      int l = std::abs(xs[i] - c1) < std::abs(xs[i] - c0) ? 1 : 0;
      if (l != label[i]) changed = true;
      label[i] = l;
      (l ? s1 : s0) += xs[i];
      ++(l ? n1 : n0);
    }
    if (n0 == 0 || n1 == 0) return false;
    c0 = s0 / static_cast<double>(n0);
    c1 = s1 / static_cast<double>(n1);
    if (!changed) break;
  }
  return true;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Number of x-starts in `a` matched one-to-one by x-starts in `b` within `tol`.
std::size_t aligned_starts(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  std::size_t i = 0, j = 0, matched = 0;
  while (i < a.size() && j < b.size()) {
    if (std::abs(a[i] - b[j]) <= tol) {
      ++matched;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return matched;
}

}  // namespace

std::vector<LayoutBlock> detect_columns(std::span<const LayoutBlock> blocks,
                                        std::optional<double> page_width) {
  std::vector<LayoutBlock> all(blocks.begin(), blocks.end());
  if (all.size() < 2) return all;

  const double width = page_width.value_or(horizontal_extent(blocks));
  std::vector<double> xs;
  xs.reserve(all.size());
  for (const auto& b : all) xs.push_back(b.bbox.center_x());

  double c0 = 0, c1 = 0;
  std::vector<int> label;
  if (width <= 0.0 || !two_means(xs, c0, c1, label) ||
      !(std::abs(c1 - c0) > T::kColumnSeparation * width))
    return sorted_by_y(std::move(all));

  const int left = c0 <= c1 ? 0 : 1;
  std::vector<LayoutBlock> left_col, right_col;
  for (std::size_t i = 0; i < all.size(); ++i)
    (label[i] == left ? left_col : right_col).push_back(std::move(all[i]));
  auto out = sorted_by_y(std::move(left_col));
  auto right = sorted_by_y(std::move(right_col));
  out.insert(out.end(), std::make_move_iterator(right.begin()), std::make_move_iterator(right.end()));
  return out;
}

std::vector<TableRegion> detect_tables(std::span<const LayoutBlock> blocks,
                                       std::optional<double> page_width) {
  std::vector<TableRegion> tables;
  if (blocks.size() < 2 * T::kMinTableRows) return tables;

  const double width = page_width.value_or(horizontal_extent(blocks));
  const double x_tol = T::kColumnTolerance * width;
  std::vector<double> heights;
  for (const auto& b : blocks) heights.push_back(b.bbox.height());
  const double y_tol = T::kRowTolerance * median(heights);

  // 1. rows by y-center
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return blocks[a].bbox.center_y() < blocks[b].bbox.center_y();
  });
  std::vector<std::vector<std::size_t>> rows;
  double anchor = 0.0;
  for (std::size_t idx : order) {
    const double cy = blocks[idx].bbox.center_y();
    if (rows.empty() || cy - anchor > y_tol) {
      rows.push_back({idx});
      anchor = cy;
    } else {
      rows.back().push_back(idx);
    }
  }
  for (auto& row : rows) {
    std::stable_sort(row.begin(), row.end(), [&](std::size_t a, std::size_t b) {
      return blocks[a].bbox.x0 < blocks[b].bbox.x0;
    });
  }
  auto starts = [&](const std::vector<std::size_t>& row) {
    std::vector<double> xs;
    for (std::size_t i : row) xs.push_back(blocks[i].bbox.x0);
    return xs;
  };

  // 2-4. runs of consecutive multi-span rows with matching column starts
  auto flush = [&](std::vector<std::size_t>& run) {
    if (run.size() >= T::kMinTableRows) {
      TableRegion t;
      bool first = true;
      for (std::size_t r : run) {
        t.rows.push_back(rows[r]);
        for (std::size_t i : rows[r]) {
          const auto& bb = blocks[i].bbox;
          if (first) {
            t.bbox = bb;
            first = false;
          } else {
            t.bbox.x0 = std::min(t.bbox.x0, bb.x0);
            t.bbox.y0 = std::min(t.bbox.y0, bb.y0);
            t.bbox.x1 = std::max(t.bbox.x1, bb.x1);
            t.bbox.y1 = std::max(t.bbox.y1, bb.y1);
          }
          t.members.push_back(i);
        }
      }
      if (t.bbox.width() > T::kMinTableWidth && t.bbox.height() > T::kMinTableHeight) {
        std::sort(t.members.begin(), t.members.end());
        tables.push_back(std::move(t));
      }
    }
    run.clear();
  };

  std::vector<std::size_t> run;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() < 2) {
      flush(run);
      continue;
    }
    if (!run.empty()) {
      const auto prev = starts(rows[run.back()]);
      const auto cur = starts(rows[r]);
      const std::size_t m = aligned_starts(prev, cur, x_tol);
      if (m < 2 || m < std::min(prev.size(), cur.size())) flush(run);
    }
    run.push_back(r);
  }
  flush(run);
  return tables;
}

std::string linearize_table(std::span<const LayoutBlock> blocks, const TableRegion& table) {
  std::string out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out += '\n';
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) out += " | ";
      out += blocks[table.rows[r][c]].text;
    }
  }
  return out;
}

std::string_view to_string(GraphicsDecision decision) {
  switch (decision) {
    case GraphicsDecision::keep: return "keep";
    case GraphicsDecision::drop: return "drop";
    case GraphicsDecision::render_whole_page: return "render_whole_page";
  }
  return "unknown";
}

GraphicsDecision filter_vector_graphics(const ImageMeta& m) {
  if (m.width_px < T::kMinGraphicSide || m.height_px < T::kMinGraphicSide)
    return GraphicsDecision::drop;
  if (m.unique_color_ratio < T::kMinUniqueColorRatio) return GraphicsDecision::drop;
  if (m.white_ratio > T::kMaxWhiteRatio) return GraphicsDecision::drop;
  const double w = m.width_px;
  const double h = m.height_px;
  if (std::max(w, h) / std::min(w, h) > T::kMaxElongation) return GraphicsDecision::drop;
  if (m.drawing_command_count > T::kRenderDrawingCommands || m.path_count > T::kRenderPaths)
    return GraphicsDecision::render_whole_page;
  return GraphicsDecision::keep;
}

std::pair<int, int> downscaled_size(int width, int height) {
  const int longest = std::max(width, height);
  if (longest <= T::kMaxImageSide || longest <= 0) return {width, height};
  const double s = static_cast<double>(T::kMaxImageSide) / longest;
  return {std::max(1, static_cast<int>(std::lround(width * s))),
          std::max(1, static_cast<int>(std::lround(height * s)))};
}

}  // namespace docsray
