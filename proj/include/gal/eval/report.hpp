#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gal/core/csv_io.hpp"
#include "gal/core/recording.hpp"
#include "gal/error.hpp"
#include "gal/eval/roc.hpp"

namespace gal::eval {

using ScoreRow = std::array<double, kNumEvents>;

struct EvalReport {
  std::array<std::optional<double>, kNumEvents> auc{};
  double average_auc = 0.0;
  std::size_t n_windows = 0;
  std::array<std::size_t, kNumEvents> positives{};
  std::size_t stride = 0;  // window stride the scores were produced at (0 = unknown)
  std::string label;       // free-form run description, e.g. "dwt+std / cnn"
  std::vector<std::string> warnings;
  std::array<std::optional<RocCurve>, kNumEvents> curves{};
};

// Per-event AUC; events without both classes are reported as undefined and
// left out of the average.
inline EvalReport evaluate(std::span<const ScoreRow> scores, std::span<const EventVector> targets,
                           std::size_t stride = 0) {
  if (scores.size() != targets.size())
    fail(ErrorKind::LengthMismatch, std::to_string(scores.size()) + " score rows vs " +
                                        std::to_string(targets.size()) + " target rows");
  EvalReport r;
  r.n_windows = scores.size();
  r.stride = stride;
  std::vector<double> s(scores.size());
  std::vector<std::uint8_t> t(scores.size());
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      s[i] = scores[i][e];
      t[i] = targets[i][e];
      r.positives[e] += t[i];
    }
    if (r.positives[e] == 0 || r.positives[e] == scores.size()) {
      r.warnings.push_back(std::string(kEventAbbrev[e]) + ": AUC undefined (" +
                           std::to_string(r.positives[e]) + " positives of " +
                           std::to_string(scores.size()) + "), excluded from average");
      continue;
    }
    auto curve = roc_curve(s, t);
    r.auc[e] = auc(curve);
    r.curves[e] = std::move(curve);
    sum += *r.auc[e];
    ++defined;
  }
  if (defined == 0) fail(ErrorKind::AllSingleClass, "no event has both positive and negative windows");
  r.average_auc = sum / static_cast<double>(defined);
  return r;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["label"] = r.label;
  j["n_windows"] = r.n_windows;
  j["stride"] = r.stride;
  nlohmann::json events = nlohmann::json::array();
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    nlohmann::json ev;
    ev["event"] = std::string(kEventNames[e]);
    ev["abbrev"] = std::string(kEventAbbrev[e]);
    ev["auc"] = r.auc[e] ? nlohmann::json(*r.auc[e]) : nlohmann::json(nullptr);
    ev["positives"] = r.positives[e];
    events.push_back(ev);
  }
  j["events"] = events;
  j["average_auc"] = r.average_auc;
  j["warnings"] = r.warnings;
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.label = j.value("label", "");
    r.n_windows = j.at("n_windows").get<std::size_t>();
    r.stride = j.value("stride", std::size_t{0});
    const auto& events = j.at("events");
    if (events.size() != kNumEvents) fail(ErrorKind::InvalidArgument, "report needs six events");
    for (std::size_t e = 0; e < kNumEvents; ++e) {
      const auto& ev = events[e];
      if (ev.at("event").get<std::string>() != kEventNames[e])
        fail(ErrorKind::InvalidArgument, "report events out of order");
      if (!ev.at("auc").is_null()) r.auc[e] = ev.at("auc").get<double>();
      r.positives[e] = ev.at("positives").get<std::size_t>();
    }
    r.average_auc = j.at("average_auc").get<double>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::InvalidArgument, std::string("malformed report: ") + ex.what());
  }
  return r;
}

namespace detail {
inline std::string fixed3(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}
}  // namespace detail

// Aligned table with one row per report: label | HS FDT BSP LO R BR | Average.
inline std::string format_table(std::span<const EvalReport> reports) {
  std::size_t label_w = 5;
  for (const auto& r : reports) label_w = std::max(label_w, r.label.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  std::string out = pad("Run", label_w);
  for (auto a : kEventAbbrev) out += " | " + pad(std::string(a), 5);
  out += " | Average\n";
  out += std::string(label_w, '-');
  for (std::size_t e = 0; e < kNumEvents; ++e) out += "-+------";
  out += "-+--------\n";
  for (const auto& r : reports) {
    out += pad(r.label, label_w);
    for (std::size_t e = 0; e < kNumEvents; ++e) out += " | " + pad(detail::fixed3(r.auc[e]), 5);
    out += " | " + detail::fixed3(r.average_auc) + "\n";
  }
  return out;
}

inline std::string format_table(const EvalReport& report) {
  return format_table(std::span<const EvalReport>(&report, 1));
}

// event,threshold,fpr,tpr
inline std::string format_roc_csv(std::size_t event, const RocCurve& curve) {
  std::string out = "event,threshold,fpr,tpr\n";
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    out += kEventAbbrev[event];
    out += ',';
    out += std::isinf(curve.thresholds[k]) ? std::string("inf")
                                           : csv::format_double(curve.thresholds[k]);
    out += ',' + csv::format_double(curve.points[k].fpr);
    out += ',' + csv::format_double(curve.points[k].tpr) + '\n';
  }
  return out;
}

}  // namespace gal::eval
