/*
 * Copyright 2026 The occtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "occtrack/panoptic_metrics.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>

#include "occtrack/error.h"
#include "occtrack/parallel.h"

namespace occtrack {
namespace {

using TrackKey = std::uint64_t;

TrackKey KeyOf(const PanopticLabel& label) {
  return (static_cast<std::uint64_t>(label.semantic) << 32) | label.instance;
}
std::uint16_t ClassOf(TrackKey key) { return static_cast<std::uint16_t>(key >> 32); }

void CheckShapes(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt) {
  if (pred.size() != gt.size()) {
    throw ShapeError("prediction has " + std::to_string(pred.size()) +
                     " frames, ground truth " + std::to_string(gt.size()));
  }
  for (std::size_t f = 0; f < gt.size(); ++f) {
    if (!pred[f].config().SameLattice(gt[f].panoptic.config())) {
      throw ShapeError("frame " + std::to_string(f) + ": grid configurations differ");
    }
  }
}

// Calls visit(frame, linear) for every evaluated voxel of each frame handled
// by this worker chunk.
template <typename Visit>
void ForEachEvaluated(const TrackedSequence& gt, std::size_t begin, std::size_t end,
                      Visit&& visit) {
  for (std::size_t f = begin; f < end; ++f) {
    const VoxelMask mask = EvalMask(gt[f]);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] && !gt[f].panoptic.at(i).unknown()) visit(f, i);
    }
  }
}

}  // namespace

VoxelMask EvalMask(const TrackedFrame& frame) {
  if (!frame.occlusion.config().SameLattice(frame.panoptic.config())) {
    throw ShapeError("occlusion mask does not match the grid");
  }
  return frame.occlusion.And(frame.fov);
}

SqResult OccSq(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt,
               const ClassPartition& classes) {
  CheckShapes(pred, gt);
  struct Counts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
  };
  using Table = std::map<std::uint16_t, Counts>;
  std::vector<Table> partial(static_cast<std::size_t>(WorkerCount()));
  ParallelFor(gt.size(), [&](std::size_t begin, std::size_t end, std::size_t worker) {
    Table& table = partial[worker];
    ForEachEvaluated(gt, begin, end, [&](std::size_t f, std::size_t i) {
      const std::uint16_t g = gt[f].panoptic.at(i).semantic;
      const std::uint16_t p = pred[f].at(i).semantic;
      if (g == p) {
        if (g != PanopticLabel::kFree) ++table[g].tp;
        return;
      }
      if (g != PanopticLabel::kFree) ++table[g].fn;
      if (p != PanopticLabel::kFree && p != PanopticLabel::kUnknown) ++table[p].fp;
    });
  });
  Table total;
  for (const auto& table : partial) {
    for (const auto& [c, counts] : table) {
      total[c].tp += counts.tp;
      total[c].fp += counts.fp;
      total[c].fn += counts.fn;
    }
  }
  SqResult result;
  double sum = 0.0;
  int present = 0;
  for (const auto& [c, counts] : total) {
    const double iou = static_cast<double>(counts.tp) /
                       static_cast<double>(counts.tp + counts.fp + counts.fn);
    result.per_class[c] = iou;
    if (classes.IsStuff(c) && counts.tp + counts.fn > 0) {
      sum += iou;
      ++present;
    }
  }
  result.overall = present > 0 ? sum / present : 0.0;
  return result;
}

AqResult OccAq(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt,
               const ClassPartition& classes) {
  CheckShapes(pred, gt);
  struct Counts {
    std::map<TrackKey, std::uint64_t> gt_size;
    std::map<TrackKey, std::uint64_t> pred_size;
    std::map<std::pair<TrackKey, TrackKey>, std::uint64_t> overlap;
  };
  const auto is_track = [&](const PanopticLabel& label) {
    return label.instance != 0 && classes.IsThing(label.semantic);
  };
  std::vector<Counts> partial(static_cast<std::size_t>(WorkerCount()));
  ParallelFor(gt.size(), [&](std::size_t begin, std::size_t end, std::size_t worker) {
    Counts& counts = partial[worker];
    ForEachEvaluated(gt, begin, end, [&](std::size_t f, std::size_t i) {
      const PanopticLabel& g = gt[f].panoptic.at(i);
      const PanopticLabel& p = pred[f].at(i);
      const bool g_track = is_track(g);
      const bool p_track = is_track(p);
      if (g_track) ++counts.gt_size[KeyOf(g)];
      if (p_track) ++counts.pred_size[KeyOf(p)];
      if (g_track && p_track) ++counts.overlap[{KeyOf(g), KeyOf(p)}];
    });
  });
  Counts total;
  for (const auto& c : partial) {
    for (const auto& [k, n] : c.gt_size) total.gt_size[k] += n;
    for (const auto& [k, n] : c.pred_size) total.pred_size[k] += n;
    for (const auto& [k, n] : c.overlap) total.overlap[k] += n;
  }
  std::map<TrackKey, double> weighted;
  for (const auto& [keys, inter] : total.overlap) {
    const auto [g, p] = keys;
    const double n = static_cast<double>(inter);
    const double uni = static_cast<double>(total.gt_size[g] + total.pred_size[p] - inter);
    weighted[g] += n * n / uni;
  }
  std::map<std::uint16_t, std::pair<double, int>> by_class;
  for (const auto& [g, size] : total.gt_size) {
    auto& [sum, count] = by_class[ClassOf(g)];
    sum += weighted[g] / static_cast<double>(size);
    ++count;
  }
  AqResult result;
  double sum = 0.0;
  for (const auto& [c, entry] : by_class) {
    result.per_class[c] = entry.first / entry.second;
    sum += result.per_class[c];
  }
  result.overall = by_class.empty() ? 0.0 : sum / static_cast<double>(by_class.size());
  return result;
}

double OccStq(double sq, double aq) {
  if (sq < 0.0 || aq < 0.0) throw DomainError("quality values must be non-negative");
  return std::sqrt(sq * aq);
}

MetricReport Evaluate(const std::vector<VoxelGrid>& pred, const TrackedSequence& gt,
                      const ClassPartition& classes) {
  MetricReport report;
  report.sq = OccSq(pred, gt, classes);
  report.aq = OccAq(pred, gt, classes);
  report.stq = OccStq(report.sq.overall, report.aq.overall);
  return report;
}

void WriteReport(std::ostream& out, const MetricReport& report) {
  std::vector<std::pair<std::string, double>> entries = {
      {"occ_sq", report.sq.overall},
      {"occ_aq", report.aq.overall},
      {"occ_stq", report.stq}};
  for (const auto& [c, v] : report.sq.per_class) {
    entries.emplace_back("sq/" + std::to_string(c), v);
  }
  for (const auto& [c, v] : report.aq.per_class) {
    entries.emplace_back("aq/" + std::to_string(c), v);
  }
  out << "{\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    char value[32];
    std::snprintf(value, sizeof(value), "%.4f", entries[k].second);
    out << "  \"" << entries[k].first << "\": " << value
        << (k + 1 < entries.size() ? ",\n" : "\n");
  }
  out << "}\n";
}

void WriteReportFile(const std::filesystem::path& path, const MetricReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  WriteReport(out, report);
}

}  // namespace occtrack
