// Copyright 2026 The LOA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "loa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "loa/util.hpp"

namespace loa {

namespace {
constexpr double kTimeSlack = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("bad number '" + std::string(s) + "' in CSV");
  }
  return x;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line);
    pos = end + 1;
  }
}

}  // namespace

std::string_view to_string(Label l) {
  switch (l) {
    case Label::ShiftUp: return "shift_up";
    case Label::NoShift: return "no_shift";
    case Label::ShiftDown: return "shift_down";
  }
  return "?";
}

Label parse_label(std::string_view s) {
  if (s == "shift_up") return Label::ShiftUp;
  if (s == "no_shift") return Label::NoShift;
  if (s == "shift_down") return Label::ShiftDown;
  throw Error("unknown label '" + std::string(s) + "'");
}

std::vector<Label> label_ticks(std::span<const TickRecord> log, double association_window) {
  std::vector<const ShiftEvent*> events;
  for (const auto& r : log) {
    if (r.shift) events.push_back(&*r.shift);
  }
  std::vector<Label> labels(log.size(), Label::NoShift);
  std::size_t next = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const double t = log[i].t;
    while (next < events.size() && events[next]->t < t - kTimeSlack) ++next;
    if (next == events.size()) break;
    // events are time-ordered, so events[next] is the nearest one at or after t
    if (events[next]->t < t + association_window - kTimeSlack) {
      labels[i] = events[next]->direction == ShiftDirection::Up ? Label::ShiftUp : Label::ShiftDown;
    }
  }
  return labels;
}

std::array<std::vector<LabeledExample>, kNumLevels> partition_by_loa(std::span<const LabeledExample> examples) {
  std::array<std::vector<LabeledExample>, kNumLevels> parts;
  for (const auto& e : examples) parts[static_cast<std::size_t>(index(e.loa))].push_back(e);
  return parts;
}

std::vector<LabeledExample> rebalance(std::span<const LabeledExample> examples, const BalanceConfig& cfg) {
  if (!(cfg.majority_share > 0.0 && cfg.majority_share < 1.0)) {
    throw Error("majority_share must lie in (0, 1)");
  }
  std::vector<std::size_t> majority;
  std::size_t minority = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].label == Label::NoShift) majority.push_back(i);
    else ++minority;
  }
  if (minority == 0) throw Error("rebalance: no shift examples, cannot form the class ratio");

  const auto target = static_cast<std::size_t>(
      std::llround(static_cast<double>(minority) * cfg.majority_share / (1.0 - cfg.majority_share)));
  std::vector<bool> keep(examples.size(), true);
  if (target < majority.size()) {
    Rng rng(cfg.seed);
    shuffle(majority, rng);
    for (std::size_t k = target; k < majority.size(); ++k) keep[majority[k]] = false;
  }
  std::vector<LabeledExample> out;
  out.reserve(minority + std::min(target, majority.size()));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (keep[i]) out.push_back(examples[i]);
  }
  return out;
}

std::string_view to_string(StreamGroup g) {
  switch (g) {
    case StreamGroup::H: return "H";
    case StreamGroup::I: return "I";
    case StreamGroup::HIE: return "H+I+E";
  }
  return "?";
}

StreamGroup parse_stream(std::string_view s) {
  if (s == "H") return StreamGroup::H;
  if (s == "I") return StreamGroup::I;
  if (s == "H+I+E" || s == "HIE") return StreamGroup::HIE;
  throw Error("unknown stream group '" + std::string(s) + "'");
}

std::vector<int> stream_columns(StreamGroup g) {
  switch (g) {
    case StreamGroup::H: return {0, 1};
    case StreamGroup::I: return {2, 3};
    case StreamGroup::HIE: return {0, 1, 2, 3, 4};
  }
  return {};
}

FeatureTable to_table(std::span<const LabeledExample> examples) {
  FeatureTable t;
  t.columns.assign(kFeatureColumns.begin(), kFeatureColumns.end());
  t.x.resize(static_cast<Eigen::Index>(examples.size()), 5);
  t.y.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& f = examples[i].features;
    const auto r = static_cast<Eigen::Index>(i);
    t.x(r, 0) = f.input_frequency;
    t.x(r, 1) = f.smoothness.value_or(kNaN);
    t.x(r, 2) = f.complex_agreement;
    t.x(r, 3) = f.simple_agreement;
    t.x(r, 4) = f.obstacle_distance;
    t.y.push_back(examples[i].label);
  }
  return t;
}

FeatureTable select_stream(const FeatureTable& full, StreamGroup g) {
  const auto cols = stream_columns(g);
  if (full.cols() != 5) throw Error("select_stream expects the full five-column table");
  FeatureTable t;
  t.y = full.y;
  t.x.resize(full.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    t.x.col(static_cast<Eigen::Index>(c)) = full.x.col(cols[c]);
    t.columns.push_back(full.columns[static_cast<std::size_t>(cols[c])]);
  }
  return t;
}

FeatureTable select_stream(std::span<const LabeledExample> examples, StreamGroup g) {
  return select_stream(to_table(examples), g);
}

std::array<int, kNumClasses> class_counts(std::span<const Label> labels) {
  std::array<int, kNumClasses> counts{};
  for (auto l : labels) ++counts[static_cast<std::size_t>(index(l))];
  return counts;
}

namespace {

FeatureTable take_rows(const FeatureTable& t, const std::vector<std::size_t>& rows) {
  FeatureTable out;
  out.columns = t.columns;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = t.x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(t.y[rows[i]]);
  }
  return out;
}

void normalize(FeatureTable& t, const Eigen::VectorXd& mean, const Eigen::VectorXd& sd) {
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      const double v = t.x(r, c);
      t.x(r, c) = std::isnan(v) ? 0.0 : (v - mean(c)) / sd(c);
    }
  }
}

}  // namespace

DatasetSplit split(const FeatureTable& table, const SplitFractions& fr, std::uint64_t seed) {
  const double total_fraction = fr.train + fr.validation + fr.test;
  if (fr.train <= 0.0 || fr.validation < 0.0 || fr.test < 0.0 || std::abs(total_fraction - 1.0) > 1e-9) {
    throw Error("split fractions must be non-negative and sum to 1");
  }
  const std::array<double, 3> share = {fr.train, fr.validation, fr.test};

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < table.y.size(); ++i) by_class[static_cast<std::size_t>(index(table.y[i]))].push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (!by_class[c].empty() && by_class[c].size() < 5) {
      throw Error("split: class " + std::string(to_string(static_cast<Label>(c))) +
                  " has fewer than 5 examples, cannot stratify");
    }
  }

  // Per-class floors, then remainders distributed by largest fractional part
  // subject to the global partition sizes.
  const auto n = static_cast<double>(table.y.size());
  std::array<long, 3> target = {std::lround(share[0] * n), std::lround(share[1] * n), 0};
  target[2] = static_cast<long>(table.y.size()) - target[0] - target[1];

  std::array<std::array<long, 3>, kNumClasses> alloc{};
  std::array<long, 3> budget = target;
  struct Frac {
    double frac;
    std::size_t cls;
    std::size_t part;
  };
  std::vector<Frac> fracs;
  std::array<long, kNumClasses> left{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto nc = static_cast<double>(by_class[c].size());
    long used = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      const double ideal = share[p] * nc;
      alloc[c][p] = static_cast<long>(std::floor(ideal + 1e-9));
      used += alloc[c][p];
      budget[p] -= alloc[c][p];
      const double f = ideal - static_cast<double>(alloc[c][p]);
      if (f > 1e-9) fracs.push_back({f, c, p});
    }
    left[c] = static_cast<long>(by_class[c].size()) - used;
  }
  std::stable_sort(fracs.begin(), fracs.end(), [](const Frac& a, const Frac& b) { return a.frac > b.frac; });
  for (const auto& f : fracs) {
    if (left[f.cls] > 0 && budget[f.part] > 0) {
      ++alloc[f.cls][f.part];
      --left[f.cls];
      --budget[f.part];
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (std::size_t p = 0; p < 3 && left[c] > 0; ++p) {
      while (left[c] > 0 && budget[p] > 0) {
        ++alloc[c][p];
        --left[c];
        --budget[p];
      }
    }
  }

  Rng rng(seed);
  std::array<std::vector<std::size_t>, 3> rows;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto idx = by_class[c];
    shuffle(idx, rng);
    std::size_t pos = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      for (long k = 0; k < alloc[c][p]; ++k) rows[p].push_back(idx[pos++]);
    }
  }
  for (auto& r : rows) std::sort(r.begin(), r.end());

  DatasetSplit out;
  out.train = take_rows(table, rows[0]);
  out.validation = take_rows(table, rows[1]);
  out.test = take_rows(table, rows[2]);

  const auto cols = table.cols();
  out.mean = Eigen::VectorXd::Zero(cols);
  out.stddev = Eigen::VectorXd::Ones(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    double sum = 0.0, sq = 0.0;
    long cnt = 0;
    for (Eigen::Index r = 0; r < out.train.rows(); ++r) {
      const double v = out.train.x(r, c);
      if (std::isnan(v)) continue;
      sum += v;
      ++cnt;
    }
    if (cnt == 0) continue;
    const double m = sum / static_cast<double>(cnt);
    for (Eigen::Index r = 0; r < out.train.rows(); ++r) {
      const double v = out.train.x(r, c);
      if (!std::isnan(v)) sq += (v - m) * (v - m);
    }
    const double sd = std::sqrt(sq / static_cast<double>(cnt));
    out.mean(c) = m;
    out.stddev(c) = sd > 0.0 ? sd : 1.0;
  }
  normalize(out.train, out.mean, out.stddev);
  normalize(out.validation, out.mean, out.stddev);
  normalize(out.test, out.mean, out.stddev);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string features_csv_header() { return "t,loa,H_S,H_Omega,I_C,I_S,E_d,label"; }

std::string features_csv_row(const LabeledExample& e) {
  const auto& f = e.features;
  std::string row = format_double(f.t);
  row += ',';
  row += to_string(e.loa);
  row += ',';
  if (f.smoothness) row += format_double(*f.smoothness);
  for (double v : {f.input_frequency, f.complex_agreement, f.simple_agreement, f.obstacle_distance}) {
    row += ',';
    row += format_double(v);
  }
  row += ',';
  row += to_string(e.label);
  return row;
}

std::vector<LabeledExample> read_features_csv(std::string_view text) {
  std::vector<LabeledExample> out;
  bool header = true;
  for_each_line(text, [&](std::string_view line) {
    if (header) {
      if (line != features_csv_header()) throw Error("unexpected feature CSV header");
      header = false;
      return;
    }
    const auto f = split_fields(line);
    if (f.size() != 8) throw Error("feature CSV row needs 8 fields");
    LabeledExample e;
    e.features.t = parse_double(f[0]);
    e.loa = parse_level(f[1]);
    e.features.loa = e.loa;
    if (!f[2].empty()) e.features.smoothness = parse_double(f[2]);
    e.features.input_frequency = parse_double(f[3]);
    e.features.complex_agreement = parse_double(f[4]);
    e.features.simple_agreement = parse_double(f[5]);
    e.features.obstacle_distance = parse_double(f[6]);
    e.features.complete = true;
    e.label = parse_label(f[7]);
    out.push_back(std::move(e));
  });
  return out;
}

std::string table_to_csv(const FeatureTable& t) {
  std::string out;
  for (const auto& c : t.columns) {
    out += c;
    out += ',';
  }
  out += "label\n";
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      if (!std::isnan(t.x(r, c))) out += format_double(t.x(r, c));
      out += ',';
    }
    out += to_string(t.y[static_cast<std::size_t>(r)]);
    out += '\n';
  }
  return out;
}

FeatureTable table_from_csv(std::string_view text) {
  FeatureTable t;
  std::vector<std::vector<double>> rows;
  bool header = true;
  for_each_line(text, [&](std::string_view line) {
    const auto f = split_fields(line);
    if (header) {
      if (f.empty() || f.back() != "label") throw Error("table CSV needs a trailing label column");
      for (std::size_t i = 0; i + 1 < f.size(); ++i) t.columns.emplace_back(f[i]);
      header = false;
      return;
    }
    if (f.size() != t.columns.size() + 1) throw Error("table CSV row has the wrong field count");
    std::vector<double> row;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) row.push_back(f[i].empty() ? kNaN : parse_double(f[i]));
    rows.push_back(std::move(row));
    t.y.push_back(parse_label(f.back()));
  });
  t.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      t.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return t;
}

}  // namespace loa
