#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "gal/core/recording.hpp"
#include "gal/error.hpp"

namespace gal {

namespace csv {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits on '\n', dropping a trailing '\r' from each line. A final empty line
// (file ending in a newline) is not reported.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::Io, "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace csv

// "subj3_series7_data.csv" -> {"subj3", "series7"}. Names that do not follow
// the dataset convention keep the whole stem as the subject id.
inline std::pair<std::string, std::string> parse_series_name(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  for (std::string_view suffix : {"_data", "_events"}) {
    if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
      stem.resize(stem.size() - suffix.size());
      break;
    }
  }
  auto us = stem.find('_');
  if (us == std::string::npos) return {stem, ""};
  return {stem.substr(0, us), stem.substr(us + 1)};
}

inline Recording parse_data_csv(std::string_view text, double sample_rate = kDefaultSampleRate,
                                std::string subject_id = {}, std::string series_id = {}) {
  auto lines = csv::split_lines(text);
  if (lines.empty()) fail(ErrorKind::MalformedHeader, "empty file");
  auto header = csv::split_cells(lines[0]);
  if (csv::trim(header[0]) != "id") fail(ErrorKind::MalformedHeader, "first column must be 'id'");
  if (header.size() < 2) fail(ErrorKind::MalformedHeader, "no channel columns after 'id'");

  std::vector<std::string> channels;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto name = csv::trim(header[i]);
    if (name.empty()) fail(ErrorKind::MalformedHeader, "empty channel name in column " + std::to_string(i + 1));
    channels.emplace_back(name);
  }

  std::vector<std::vector<double>> samples(channels.size());
  for (auto& row : samples) row.reserve(lines.size() - 1);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    auto cells = csv::split_cells(lines[ln]);
    if (cells.size() != header.size())
      fail(ErrorKind::RaggedRow, "line " + std::to_string(ln + 1) + " has " +
                                     std::to_string(cells.size()) + " columns, expected " +
                                     std::to_string(header.size()));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(cells[c], v))
        fail(ErrorKind::NonNumericCell, "line " + std::to_string(ln + 1) + ", column '" +
                                            channels[c - 1] + "': '" + std::string(cells[c]) + "'");
      samples[c - 1].push_back(v);
    }
  }
  if (samples.front().empty()) fail(ErrorKind::MalformedHeader, "no data rows");
  return Recording(std::move(channels), std::move(samples), sample_rate, std::move(subject_id),
                   std::move(series_id));
}

inline Recording load_data_csv(const std::filesystem::path& path,
                               double sample_rate = kDefaultSampleRate) {
  auto [subject, series] = parse_series_name(path);
  try {
    return parse_data_csv(csv::read_file(path), sample_rate, subject, series);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

inline EventLabels parse_events_csv(std::string_view text, std::size_t expected_samples) {
  auto lines = csv::split_lines(text);
  if (lines.empty()) fail(ErrorKind::WrongEventColumns, "empty events file");
  auto header = csv::split_cells(lines[0]);
  if (header.size() != kNumEvents + 1 || csv::trim(header[0]) != "id")
    fail(ErrorKind::WrongEventColumns, "expected 'id' plus " + std::to_string(kNumEvents) +
                                           " event columns, got " +
                                           std::to_string(header.size()) + " columns");
  for (std::size_t e = 0; e < kNumEvents; ++e)
    if (csv::trim(header[e + 1]) != kEventNames[e])
      fail(ErrorKind::WrongEventColumns, "column " + std::to_string(e + 2) + " is '" +
                                             std::string(header[e + 1]) + "', expected '" +
                                             std::string(kEventNames[e]) + "'");
  if (lines.size() - 1 != expected_samples)
    fail(ErrorKind::LengthMismatch, std::to_string(lines.size() - 1) +
                                        " event rows for a recording of " +
                                        std::to_string(expected_samples) + " samples");

  std::vector<std::vector<std::uint8_t>> flags(kNumEvents,
                                               std::vector<std::uint8_t>(expected_samples, 0));
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    auto cells = csv::split_cells(lines[ln]);
    if (cells.size() != kNumEvents + 1)
      fail(ErrorKind::RaggedRow, "line " + std::to_string(ln + 1) + " has " +
                                     std::to_string(cells.size()) + " columns");
    for (std::size_t e = 0; e < kNumEvents; ++e) {
      auto cell = csv::trim(cells[e + 1]);
      if (cell == "0") continue;
      if (cell == "1") {
        flags[e][ln - 1] = 1;
        continue;
      }
      fail(ErrorKind::NonBinaryCell, "line " + std::to_string(ln + 1) + ", event '" +
                                         std::string(kEventNames[e]) + "': '" +
                                         std::string(cell) + "'");
    }
  }
  return EventLabels(std::move(flags));
}

inline EventLabels load_events_csv(const std::filesystem::path& path, const Recording& recording) {
  try {
    return parse_events_csv(csv::read_file(path), recording.n_samples());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

inline std::string sample_id(const Recording& rec, std::size_t t) {
  std::string id;
  if (!rec.subject_id().empty()) id += rec.subject_id() + "_";
  if (!rec.series_id().empty()) id += rec.series_id() + "_";
  return id + std::to_string(t);
}

inline std::string format_data_csv(const Recording& rec) {
  std::string out = "id";
  for (const auto& ch : rec.channels()) out += "," + ch;
  out += "\n";
  for (std::size_t t = 0; t < rec.n_samples(); ++t) {
    out += sample_id(rec, t);
    for (std::size_t c = 0; c < rec.n_channels(); ++c) {
      out += ',';
      out += csv::format_double(rec.samples()[c][t]);
    }
    out += '\n';
  }
  return out;
}

inline std::string format_events_csv(const Recording& rec, const EventLabels& labels) {
  std::string out = "id";
  for (auto name : kEventNames) {
    out += ',';
    out += name;
  }
  out += "\n";
  for (std::size_t t = 0; t < labels.n_samples(); ++t) {
    out += sample_id(rec, t);
    for (std::size_t e = 0; e < kNumEvents; ++e) out += labels.active(e, t) ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

inline void write_data_csv(const std::filesystem::path& path, const Recording& rec) {
  csv::write_atomic(path, format_data_csv(rec));
}

inline void write_events_csv(const std::filesystem::path& path, const Recording& rec,
                             const EventLabels& labels) {
  csv::write_atomic(path, format_events_csv(rec, labels));
}

}  // namespace gal
