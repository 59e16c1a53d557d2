#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fileio.hpp"
#include "liquidity_metrics.hpp"
#include "reconstruction.hpp"
#include "stats.hpp"
#include "toml_lite.hpp"
#include "types.hpp"

namespace spreadlab {

struct EventWindow {
  std::string name;
  int64_t start_s = 0;
  int64_t end_s = 0;
  int64_t pad_before_s = 3600;
  int64_t pad_after_s = 3600;
};

inline void validate(const EventWindow& event) {
  if (event.start_s >= event.end_s)
    throw ValidationError("event '" + event.name + "': start must precede end");
  if (event.pad_before_s < 0 || event.pad_after_s < 0)
    throw ValidationError("event '" + event.name + "': negative pad");
}

/// Reads an events file, TOML ([[event]] blocks) or JSON (array of objects),
/// each entry carrying name/start/end and optional pads in seconds.
inline std::vector<EventWindow> load_events(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  std::vector<EventWindow> events;
  auto ext = path.extension() == ".gz" ? std::filesystem::path(path).replace_extension("").extension()
                                       : path.extension();
  if (ext == ".json") {
    auto doc = nlohmann::json::parse(content, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed JSON in " + path.string());
    const auto& list = doc.is_object() && doc.contains("events") ? doc.at("events") : doc;
    if (!list.is_array()) throw ParseError("events JSON must be an array");
    for (const auto& item : list) {
      EventWindow e;
      e.name = item.at("name").get<std::string>();
      e.start_s = item.at("start").get<int64_t>();
      e.end_s = item.at("end").get<int64_t>();
      if (item.contains("padBefore")) e.pad_before_s = item.at("padBefore").get<int64_t>();
      if (item.contains("padAfter")) e.pad_after_s = item.at("padAfter").get<int64_t>();
      validate(e);
      events.push_back(std::move(e));
    }
  } else {
    auto doc = parse_toml(content);
    if (!doc.contains("event")) throw ParseError("events TOML needs [[event]] entries");
    for (const auto& item : doc.at("event").as_array()) {
      EventWindow e;
      e.name = item.at("name").as_string();
      e.start_s = item.at("start").as_int();
      e.end_s = item.at("end").as_int();
      if (item.contains("padBefore")) e.pad_before_s = item.at("padBefore").as_int();
      if (item.contains("padAfter")) e.pad_after_s = item.at("padAfter").as_int();
      validate(e);
      events.push_back(std::move(e));
    }
  }
  return events;
}

enum class RecoveryStatus { NeverImpaired, Recovered, NotRecovered };

inline const char* to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::NeverImpaired: return "never_impaired";
    case RecoveryStatus::Recovered: return "recovered";
    case RecoveryStatus::NotRecovered: return "not_recovered";
  }
  return "?";
}

struct RecoveryReport {
  std::string market;
  std::string event_name;
  double baseline_depth = 0;  // mean over the pre-event pad
  double threshold_fraction = 0.75;
  RecoveryStatus status = RecoveryStatus::NeverImpaired;
  int64_t trough_minute = 0;    // first impaired minute (when impaired)
  int recovery_minutes = 0;     // trough -> first minute back at threshold
};

namespace event_detail {

inline void require_full_coverage(const std::map<int64_t, double>& series, int64_t first,
                                  int64_t last, const std::string& what) {
  std::vector<int64_t> missing;
  for (int64_t m = first; m <= last; m += 60)
    if (!series.count(m)) missing.push_back(m);
  if (!missing.empty()) {
    std::string msg = what + ": series gaps at";
    size_t shown = std::min<size_t>(missing.size(), 5);
    for (size_t i = 0; i < shown; ++i) msg += " " + format_rfc3339_minute(missing[i]);
    if (missing.size() > shown)
      msg += " (+" + std::to_string(missing.size() - shown) + " more)";
    throw ComputeError(msg);
  }
}

}  // namespace event_detail

/// Minutes from the first post-event depth impairment until depth regains
/// threshold_fraction of the pre-event mean. A series that never dips
/// reports NeverImpaired with zero minutes.
inline RecoveryReport time_to_recovery(const std::map<int64_t, double>& depth_by_minute,
                                       const EventWindow& event, double threshold_fraction) {
  if (threshold_fraction <= 0 || threshold_fraction > 1)
    throw ValidationError("threshold_fraction must lie in (0, 1]");

  const int64_t first = truncate_minute_s((event.start_s - event.pad_before_s) * 1000);
  const int64_t start = truncate_minute_s(event.start_s * 1000);
  const int64_t end = truncate_minute_s(event.end_s * 1000);
  const int64_t last = truncate_minute_s((event.end_s + event.pad_after_s) * 1000);
  event_detail::require_full_coverage(depth_by_minute, first, last, "event '" + event.name + "'");

  std::vector<double> pre;
  for (int64_t m = first; m < start; m += 60) pre.push_back(depth_by_minute.at(m));
  if (pre.empty()) throw ComputeError("event '" + event.name + "': empty pre-event window");
  double baseline = mean_of(pre);
  if (baseline <= 0) throw ComputeError("event '" + event.name + "': zero baseline depth");

  RecoveryReport report;
  report.event_name = event.name;
  report.baseline_depth = baseline;
  report.threshold_fraction = threshold_fraction;
  const double cut = threshold_fraction * baseline;

  std::optional<int64_t> trough;
  for (int64_t m = start; m <= end; m += 60) {
    if (depth_by_minute.at(m) < cut) {
      trough = m;
      break;
    }
  }
  if (!trough) {
    report.status = RecoveryStatus::NeverImpaired;
    report.recovery_minutes = 0;
    return report;
  }
  report.trough_minute = *trough;
  for (int64_t m = *trough + 60; m <= last; m += 60) {
    if (depth_by_minute.at(m) >= cut) {
      report.status = RecoveryStatus::Recovered;
      report.recovery_minutes = static_cast<int>((m - *trough) / 60);
      return report;
    }
  }
  report.status = RecoveryStatus::NotRecovered;
  report.recovery_minutes = -1;
  return report;
}

struct EventProfileRow {
  int64_t minute = 0;
  Decimal book_bid;
  Decimal book_ask;
  Decimal recon_bid;
  Decimal recon_ask;
  bool breach = false;  // reconstructed demand exceeds the book on a side
};

struct EventDepthProfile {
  std::string market;
  std::string event_name;
  Decimal spread_bps;
  std::vector<EventProfileRow> rows;
  double pre_mean = 0;   // bid+ask book depth over the pre pad
  double post_mean = 0;  // bid+ask book depth over the post pad
  double min_depth = 0;  // lowest bid+ask book depth in the padded window
  int breach_count = 0;
};

/// Book depth vs reconstructed demand across one event's padded window.
inline EventDepthProfile event_depth_profile(const DepthGrid& grid,
                                             std::span<const ReconstructedBook> recon,
                                             const EventWindow& event,
                                             const Decimal& spread_bps) {
  int column = grid.spread_index(spread_bps);
  if (column < 0)
    throw ValidationError("event_depth_profile: spread " + spread_bps.str() + " not in grid");

  std::map<int64_t, double> totals;
  std::map<int64_t, const DepthGridRow*> book_rows;
  for (const auto& row : grid.rows) {
    if (row.one_sided) continue;
    book_rows[row.minute] = &row;
    totals[row.minute] = (row.depths[column].bid_depth_usd + row.depths[column].ask_depth_usd)
                             .to_double();
  }

  const int64_t first = truncate_minute_s((event.start_s - event.pad_before_s) * 1000);
  const int64_t start = truncate_minute_s(event.start_s * 1000);
  const int64_t end = truncate_minute_s(event.end_s * 1000);
  const int64_t last = truncate_minute_s((event.end_s + event.pad_after_s) * 1000);
  event_detail::require_full_coverage(totals, first, last, "event '" + event.name + "'");

  std::map<int64_t, const ReconstructedBook*> demand;
  for (const auto& book : recon) demand[book.key.minute] = &book;

  EventDepthProfile profile;
  profile.event_name = event.name;
  profile.spread_bps = spread_bps;
  if (!grid.rows.empty()) profile.market = grid.rows.front().market;

  std::vector<double> pre, post;
  bool first_row = true;
  for (int64_t m = first; m <= last; m += 60) {
    const DepthGridRow* row = book_rows.at(m);
    EventProfileRow out;
    out.minute = m;
    out.book_bid = row->depths[column].bid_depth_usd;
    out.book_ask = row->depths[column].ask_depth_usd;
    if (auto it = demand.find(m); it != demand.end()) {
      out.recon_bid = it->second->bid_notional;
      out.recon_ask = it->second->ask_notional;
    }
    out.breach = out.recon_bid > out.book_bid || out.recon_ask > out.book_ask;
    if (out.breach) ++profile.breach_count;

    double total = totals.at(m);
    if (first_row || total < profile.min_depth) profile.min_depth = total;
    first_row = false;
    if (m < start) pre.push_back(total);
    if (m > end) post.push_back(total);
    profile.rows.push_back(std::move(out));
  }
  profile.pre_mean = pre.empty() ? 0 : mean_of(pre);
  profile.post_mean = post.empty() ? 0 : mean_of(post);
  return profile;
}

/// Condition on event stress: the book held up across every configured
/// event, allowing at most `tolerance_breaches` breached minutes in total.
inline bool condition4_event_adequacy(std::span<const EventDepthProfile> profiles,
                                      int tolerance_breaches = 0) {
  if (profiles.empty())
    throw ValidationError("condition4_event_adequacy: no event profiles supplied");
  long total = 0;
  for (const auto& p : profiles) total += p.breach_count;
  return total <= tolerance_breaches;
}

}  // namespace spreadlab
