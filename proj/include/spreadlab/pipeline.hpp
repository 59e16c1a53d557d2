#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "calibration.hpp"
#include "event_study.hpp"
#include "liquidity_metrics.hpp"
#include "loaders.hpp"
#include "log.hpp"
#include "reconstruction.hpp"
#include "report.hpp"

namespace spreadlab {

struct RunConfig {
  std::filesystem::path books_path;
  std::filesystem::path trades_path;
  std::filesystem::path markets_path;
  std::filesystem::path events_path;
  std::vector<std::string> market_filter;  // empty = every market present
  std::optional<int64_t> from_day;         // UTC day index, inclusive
  std::optional<int64_t> to_day;
  std::filesystem::path out_dir = "out";
  ReportFormat format = ReportFormat::Csv;
  int jobs = 0;  // 0 = hardware concurrency
  std::string recovery_series = "sum";  // sum | bid | ask
  CalibrationConfig calib;
};

inline int64_t parse_day(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw ParseError("bad date '" + text + "', expected YYYY-MM-DD");
  auto num = [&](size_t pos, size_t len) {
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') throw ParseError("bad date '" + text + "'");
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  return days_from_civil(num(0, 4), static_cast<unsigned>(num(5, 2)),
                         static_cast<unsigned>(num(8, 2)));
}

struct Dataset {
  std::map<std::string, std::vector<OrderBookSnapshot>> books;
  std::map<std::string, std::vector<TradeRecord>> trades;
  std::map<std::string, MarketSpec> specs;
  std::vector<EventWindow> events;
  size_t duplicate_snapshots = 0;
};

inline bool market_selected(const RunConfig& cfg, const std::string& market) {
  if (cfg.market_filter.empty()) return true;
  for (const auto& m : cfg.market_filter)
    if (m == market) return true;
  return false;
}

inline bool day_selected(const RunConfig& cfg, int64_t day) {
  if (cfg.from_day && day < *cfg.from_day) return false;
  if (cfg.to_day && day > *cfg.to_day) return false;
  return true;
}

inline Dataset load_dataset(const RunConfig& cfg, bool need_books, bool need_trades,
                            bool need_specs) {
  Dataset data;
  if (need_books) {
    if (cfg.books_path.empty()) throw ValidationError("no --books file given");
    auto loaded = load_orderbooks(cfg.books_path);
    data.duplicate_snapshots = loaded.duplicate_count;
    if (loaded.duplicate_count > 0)
      log_warn(std::to_string(loaded.duplicate_count) + " duplicate snapshot minute(s) replaced");
    for (auto& book : loaded.snapshots) {
      if (!market_selected(cfg, book.market)) continue;
      if (!day_selected(cfg, day_of(book.ts_minute))) continue;
      data.books[book.market].push_back(std::move(book));
    }
  }
  if (need_trades) {
    if (cfg.trades_path.empty()) throw ValidationError("no --trades file given");
    for (auto& trade : load_trades(cfg.trades_path)) {
      if (trade.market.empty())
        throw ValidationError("trade file has no market column; add one per row");
      if (!market_selected(cfg, trade.market)) continue;
      if (!day_selected(cfg, day_of(trade.created_at_ms / 1000))) continue;
      data.trades[trade.market].push_back(std::move(trade));
    }
  }
  if (need_specs) {
    if (cfg.markets_path.empty()) throw ValidationError("no --markets file given");
    data.specs = load_market_specs(cfg.markets_path);
  }
  if (!cfg.events_path.empty()) data.events = load_events(cfg.events_path);
  return data;
}

/// Runs fn over the keys on a small worker pool; results come back keyed,
/// so output order never depends on scheduling.
template <typename R>
std::map<std::string, R> parallel_by_market(const std::vector<std::string>& markets, int jobs,
                                            const std::function<R(const std::string&)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = std::min<int>(jobs, static_cast<int>(markets.size()));

  std::vector<std::optional<R>> results(markets.size());
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= markets.size()) return;
      try {
        results[i] = fn(markets[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::map<std::string, R> out;
  for (size_t i = 0; i < markets.size(); ++i)
    if (results[i]) out.emplace(markets[i], std::move(*results[i]));
  return out;
}

inline std::vector<Decimal> spread_decimals(const CalibrationConfig& calib) {
  std::vector<Decimal> spreads;
  spreads.reserve(calib.spreads_bps.size());
  for (int s : calib.spreads_bps) spreads.push_back(Decimal::from_int(s));
  return spreads;
}

inline std::string slugify(const std::string& name) {
  std::string out;
  for (char c : name) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
      out += c;
    else if (c >= 'A' && c <= 'Z')
      out += static_cast<char>(c - 'A' + 'a');
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

struct RunOutput {
  std::vector<ManifestEntry> files;
  std::vector<std::string> summary_lines;  // one per market
};

// ---- metrics ----------------------------------------------------------

inline RunOutput run_metrics(const RunConfig& cfg, const Dataset& data) {
  RunOutput out;
  auto spreads = spread_decimals(cfg.calib);

  std::vector<std::string> book_markets;
  for (const auto& [market, books] : data.books) book_markets.push_back(market);

  struct MetricsResult {
    ReportTable grid;
    size_t snapshots = 0;
  };
  auto grids = parallel_by_market<MetricsResult>(
      book_markets, cfg.jobs, [&](const std::string& market) {
        const auto& books = data.books.at(market);
        DepthGrid grid = depth_grid(books, spreads);
        MetricsResult res;
        res.snapshots = books.size();
        res.grid.header = {"minute"};
        for (int s : cfg.calib.spreads_bps) {
          res.grid.header.push_back("bid_" + std::to_string(s));
          res.grid.header.push_back("ask_" + std::to_string(s));
        }
        res.grid.header.push_back("one_sided");
        for (const auto& row : grid.rows) {
          std::vector<std::string> fields{format_rfc3339_minute(row.minute)};
          for (const auto& depth : row.depths) {
            fields.push_back(depth.bid_depth_usd.str());
            fields.push_back(depth.ask_depth_usd.str());
          }
          fields.push_back(row.one_sided ? "1" : "0");
          res.grid.rows.push_back(std::move(fields));
        }
        return res;
      });
  for (const auto& [market, res] : grids) {
    out.files.push_back(emit_table(cfg.out_dir, "grid_" + slugify(market), res.grid, cfg.format));
    out.summary_lines.push_back(market + ": " + std::to_string(res.snapshots) +
                                " snapshots across " +
                                std::to_string(cfg.calib.spreads_bps.size()) + " spreads");
  }

  ReportTable stats_table;
  stats_table.header = {"market", "day", "trade_count", "active_minutes", "mean_notional",
                        "std_notional", "max_notional"};
  for (long long threshold : trade_count_thresholds())
    stats_table.header.push_back("count_above_" + std::to_string(threshold));
  stats_table.header.insert(stats_table.header.end(),
                            {"p95_minute_bid_demand", "p95_minute_ask_demand",
                             "p95_trade_notional"});
  for (const auto& [market, trades] : data.trades) {
    for (const auto& stat : trade_statistics(trades, cfg.calib.rounding)) {
      std::vector<std::string> fields{stat.market,
                                      stat.day_str(),
                                      std::to_string(stat.trade_count),
                                      std::to_string(stat.active_minutes),
                                      shortest_double(stat.mean_notional),
                                      shortest_double(stat.std_notional),
                                      stat.max_notional.str()};
      for (long long threshold : trade_count_thresholds())
        fields.push_back(std::to_string(stat.counts_above.at(threshold)));
      fields.push_back(shortest_double(stat.p95_minute_bid_demand));
      fields.push_back(shortest_double(stat.p95_minute_ask_demand));
      fields.push_back(shortest_double(stat.p95_trade_notional));
      stats_table.rows.push_back(std::move(fields));
    }
  }
  if (!data.trades.empty())
    out.files.push_back(emit_table(cfg.out_dir, "trade_stats", stats_table, cfg.format));
  return out;
}

// ---- reconstruction ----------------------------------------------------

inline RunOutput run_reconstruct(const RunConfig& cfg, const Dataset& data) {
  RunOutput out;
  std::vector<std::string> markets;
  for (const auto& [market, trades] : data.trades) markets.push_back(market);

  struct ReconResult {
    ReportTable table;
    DepthRequirement requirement;
    size_t minutes = 0;
  };
  auto results = parallel_by_market<ReconResult>(
      markets, cfg.jobs, [&](const std::string& market) {
        auto recon = reconstruct_minute_books(data.trades.at(market), cfg.calib.rounding,
                                              cfg.calib.include_liquidations);
        ReconResult res;
        res.minutes = recon.size();
        res.table.header = {"minute", "bid_notional", "ask_notional", "level_count_bid",
                            "level_count_ask"};
        for (const auto& book : recon)
          res.table.rows.push_back({format_rfc3339_minute(book.key.minute),
                                    book.bid_notional.str(), book.ask_notional.str(),
                                    std::to_string(book.bid_levels.size()),
                                    std::to_string(book.ask_levels.size())});
        if (!recon.empty()) res.requirement = estimated_depth_required(recon);
        return res;
      });

  ReportTable summary;
  summary.header = {"market",         "avg_depth_bid",        "avg_depth_ask",
                    "median_depth_bid", "median_depth_ask",   "max_depth_bid",
                    "max_depth_ask",  "ninetyfive_depth_bid", "ninetyfive_depth_ask",
                    "minutes"};
  for (const auto& [market, res] : results) {
    out.files.push_back(
        emit_table(cfg.out_dir, "recon_" + slugify(market), res.table, cfg.format));
    out.summary_lines.push_back(market + ": " + std::to_string(res.minutes) +
                                " trade-active minutes reconstructed");
    if (res.minutes == 0) continue;
    const auto& req = res.requirement;
    summary.rows.push_back({market, shortest_double(req.mean_bid), shortest_double(req.mean_ask),
                            shortest_double(req.median_bid), shortest_double(req.median_ask),
                            shortest_double(req.max_bid), shortest_double(req.max_ask),
                            shortest_double(req.p95_bid), shortest_double(req.p95_ask),
                            std::to_string(req.minutes)});
  }
  if (!summary.rows.empty())
    out.files.push_back(emit_table(cfg.out_dir, "estimated_depth", summary, cfg.format));
  return out;
}

// ---- calibration --------------------------------------------------------

inline nlohmann::json calibration_to_json(const CalibrationResult& result) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : result.verdicts) {
    verdicts.push_back({{"spread_bps", v.spread_bps},
                        {"c1_tick", v.c1_tick},
                        {"c2_mean_depth", v.c2_mean_depth},
                        {"c2_vacuous", v.c2_vacuous},
                        {"c3_stationary", v.c3_stationary},
                        {"c3_degenerate", v.c3_degenerate},
                        {"c4_event_adequate", v.c4_event_adequate},
                        {"c4_vacuous", v.c4_vacuous},
                        {"sd_condition", v.sd_condition},
                        {"rlq_condition", v.rlq_condition},
                        {"mean_bid_depth", v.mean_bid_depth},
                        {"mean_ask_depth", v.mean_ask_depth},
                        {"mean_density_bid", v.mean_density_bid},
                        {"mean_density_ask", v.mean_density_ask},
                        {"mean_rlq_bid", v.mean_rlq_bid},
                        {"mean_rlq_ask", v.mean_rlq_ask},
                        {"adf_statistic", v.adf_statistic},
                        {"insufficiency_pct", v.insufficiency_pct},
                        {"insufficiency_known", v.insufficiency_known}});
  }
  return nlohmann::json{{"market", result.market},
                        {"original_bps", result.original_bps},
                        {"chosen_bps", result.chosen_bps},
                        {"rationale", to_string(result.rationale)},
                        {"min_tick_pct", result.min_tick_pct},
                        {"verdicts", verdicts}};
}

inline RunOutput run_calibrate(const RunConfig& cfg, const Dataset& data) {
  RunOutput out;
  std::vector<std::string> markets;
  for (const auto& [market, books] : data.books) {
    if (!data.specs.count(market)) {
      log_warn("no market spec for " + market + "; skipping calibration");
      continue;
    }
    markets.push_back(market);
  }

  static const std::vector<TradeRecord> no_trades;
  auto results = parallel_by_market<CalibrationResult>(
      markets, cfg.jobs, [&](const std::string& market) {
        auto trades_it = data.trades.find(market);
        const auto& trades = trades_it == data.trades.end() ? no_trades : trades_it->second;
        return sweep_max_spread(data.books.at(market), trades, data.specs.at(market), cfg.calib,
                                data.events);
      });

  std::map<std::pair<std::string, int>, double> insufficiency;
  std::vector<CalibrationResult> ordered;
  for (const auto& [market, result] : results) {
    for (const auto& v : result.verdicts)
      if (v.insufficiency_known) insufficiency[{market, v.spread_bps}] = v.insufficiency_pct;
    ordered.push_back(result);
    nlohmann::json doc = calibration_to_json(result);
    std::string name = "calibration_" + slugify(market) + ".json";
    std::string content = doc.dump(2) + "\n";
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.out_dir.string() + ": " + ec.message());
    atomic_write_file(cfg.out_dir / name, content);
    out.files.push_back({name, result.verdicts.size(), hex64(fnv1a64(content))});
    out.summary_lines.push_back(market + ": chosen " + std::to_string(result.chosen_bps) +
                                " bps (" + to_string(result.rationale) + ")");
  }

  auto brackets = classify_markets(ordered, insufficiency, cfg.calib);
  ReportTable table;
  table.header = {"market", "original_bps", "revised_bps", "rationale"};
  ReportTable backtest;
  backtest.header = {"market", "percentage", "new_percentage"};
  for (const auto& row : brackets) {
    table.rows.push_back({row.market, std::to_string(row.original_bps),
                          std::to_string(row.revised_bps), to_string(row.rationale)});
    backtest.rows.push_back({row.market, shortest_double(row.insufficiency_pct), "-"});
    if (row.widened) {
      // re-tested key carries the widened spread as a percent suffix
      std::string key = row.market + "_" + Decimal::from_int(row.widened_bps).shifted(-2).str();
      backtest.rows.push_back({key, "-", shortest_double(row.widened_pct)});
    }
  }
  out.files.push_back(emit_table(cfg.out_dir, "calibration", table, ReportFormat::Csv));
  out.files.push_back(emit_table(cfg.out_dir, "insufficiency", backtest, ReportFormat::Csv));
  return out;
}

// ---- event study ---------------------------------------------------------

inline RunOutput run_events(const RunConfig& cfg, const Dataset& data) {
  if (data.events.empty()) throw ValidationError("no events file given (--events)");
  RunOutput out;
  auto spreads = spread_decimals(cfg.calib);

  std::vector<std::string> markets;
  for (const auto& [market, books] : data.books) markets.push_back(market);

  struct EventResult {
    std::map<std::string, ReportTable> profiles;  // file stem -> table
    ReportTable recovery_rows;
    size_t covered_events = 0;
  };
  auto results = parallel_by_market<EventResult>(
      markets, cfg.jobs, [&](const std::string& market) {
        const auto& books = data.books.at(market);
        DepthGrid grid = depth_grid(books, spreads);
        static const std::vector<TradeRecord> no_trades;
        auto trades_it = data.trades.find(market);
        const auto& trades = trades_it == data.trades.end() ? no_trades : trades_it->second;
        auto recon = reconstruct_minute_books(trades, cfg.calib.rounding,
                                              cfg.calib.include_liquidations);

        EventResult res;
        res.recovery_rows.header = {"market", "event", "spread_bps", "baseline_depth",
                                    "status", "recovery_minutes"};
        for (const auto& event : data.events) {
          ReportTable profile_table;
          profile_table.header = {"market",   "event",    "spread_bps", "minute",
                                  "book_bid", "book_ask", "recon_bid",  "recon_ask",
                                  "breach"};
          bool covered = true;
          for (size_t si = 0; si < spreads.size(); ++si) {
            try {
              auto profile = event_depth_profile(grid, recon, event, spreads[si]);
              for (const auto& row : profile.rows)
                profile_table.rows.push_back(
                    {market, event.name, std::to_string(cfg.calib.spreads_bps[si]),
                     format_rfc3339_minute(row.minute), row.book_bid.str(), row.book_ask.str(),
                     row.recon_bid.str(), row.recon_ask.str(), row.breach ? "1" : "0"});

              std::map<int64_t, double> series;
              int column = grid.spread_index(spreads[si]);
              for (const auto& grow : grid.rows) {
                if (grow.one_sided) continue;
                double bid = grow.depths[column].bid_depth_usd.to_double();
                double ask = grow.depths[column].ask_depth_usd.to_double();
                series[grow.minute] = cfg.recovery_series == "bid"   ? bid
                                      : cfg.recovery_series == "ask" ? ask
                                                                     : bid + ask;
              }
              auto recovery = time_to_recovery(series, event, cfg.calib.recovery_fraction);
              res.recovery_rows.rows.push_back(
                  {market, event.name, std::to_string(cfg.calib.spreads_bps[si]),
                   shortest_double(recovery.baseline_depth), to_string(recovery.status),
                   std::to_string(recovery.recovery_minutes)});
            } catch (const ComputeError& e) {
              covered = false;
              log_info(market + " / " + event.name + ": " + e.what());
            }
          }
          if (covered && !profile_table.rows.empty()) {
            ++res.covered_events;
            res.profiles["event_" + slugify(event.name) + "_" + slugify(market)] =
                std::move(profile_table);
          }
        }
        return res;
      });

  ReportTable recovery;
  recovery.header = {"market", "event", "spread_bps", "baseline_depth", "status",
                     "recovery_minutes"};
  for (const auto& [market, res] : results) {
    for (const auto& [stem, table] : res.profiles)
      out.files.push_back(emit_table(cfg.out_dir, stem, table, cfg.format));
    for (const auto& row : res.recovery_rows.rows) recovery.rows.push_back(row);
    out.summary_lines.push_back(market + ": " + std::to_string(res.covered_events) + "/" +
                                std::to_string(data.events.size()) + " events covered");
  }
  out.files.push_back(emit_table(cfg.out_dir, "recovery", recovery, ReportFormat::Csv));
  return out;
}

// ---- full report -----------------------------------------------------

inline RunOutput run_report(const RunConfig& cfg, const Dataset& data) {
  RunOutput out;
  auto merge = [&out](RunOutput part) {
    out.files.insert(out.files.end(), part.files.begin(), part.files.end());
    out.summary_lines.insert(out.summary_lines.end(), part.summary_lines.begin(),
                             part.summary_lines.end());
  };
  merge(run_metrics(cfg, data));
  merge(run_reconstruct(cfg, data));
  if (!data.specs.empty()) merge(run_calibrate(cfg, data));
  if (!data.events.empty()) merge(run_events(cfg, data));
  emit_manifest(cfg.out_dir, out.files);
  return out;
}

}  // namespace spreadlab
