#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adf.hpp"
#include "event_study.hpp"
#include "liquidity_metrics.hpp"
#include "market_data.hpp"
#include "reconstruction.hpp"
#include "types.hpp"

namespace spreadlab {

struct CalibrationConfig {
  std::vector<int> spreads_bps{5, 10, 15, 20, 30, 40, 50};
  double volume_coverage_fraction = 0.80;
  double insufficiency_threshold_initial = 0.01;  // acceptable failure share
  double insufficiency_threshold_widen = 0.05;    // at or above: widen and re-test
  double adf_significance = 0.05;                 // 0.01 / 0.05 / 0.10
  double recovery_fraction = 0.75;
  std::vector<int> brackets{15, 20, 30, 40};
  bool draft_mode = false;  // additionally enforce the density and RLQ conditions
  bool condition2_mean_vs_mean = false;
  int condition4_tolerance_breaches = 0;
  MinuteRounding rounding = MinuteRounding::Truncate;
  bool include_liquidations = true;
  bool zero_fill = false;
  int adf_max_lag = -1;  // auto
};

inline void validate(const CalibrationConfig& cfg) {
  if (cfg.spreads_bps.empty()) throw ValidationError("calibration: empty spread list");
  for (size_t i = 0; i < cfg.spreads_bps.size(); ++i) {
    if (cfg.spreads_bps[i] <= 0) throw ValidationError("calibration: spreads must be positive");
    if (i && cfg.spreads_bps[i - 1] >= cfg.spreads_bps[i])
      throw ValidationError("calibration: spreads must be strictly increasing");
  }
  auto fraction_ok = [](double f) { return f > 0.0 && f <= 1.0; };
  if (!fraction_ok(cfg.volume_coverage_fraction) || !fraction_ok(cfg.recovery_fraction) ||
      !fraction_ok(cfg.insufficiency_threshold_initial) ||
      !fraction_ok(cfg.insufficiency_threshold_widen))
    throw ValidationError("calibration: fractions must lie in (0, 1]");
  if (cfg.brackets.empty()) throw ValidationError("calibration: empty bracket list");
}

/// Condition: the spread is wider than a single tick at the index price.
/// A market failing this at every usable spread is tick-constrained.
inline bool condition1_tick(const MarketSpec& spec, const Decimal& spread_bps) {
  return spec.index_price * spread_bps.shifted(-4) > spec.tick_size;
}

inline bool condition1_tick(const MarketSpec& spec, int spread_bps) {
  return condition1_tick(spec, Decimal::from_int(spread_bps));
}

struct Condition2Result {
  bool ok = true;
  bool vacuous = false;  // no trade-active minutes to demand anything
  double mean_bid_depth = 0;
  double mean_ask_depth = 0;
  double bid_demand = 0;  // p95 (or mean) per-minute SELL notional
  double ask_demand = 0;  // p95 (or mean) per-minute BUY notional
};

/// Mean book depth at the spread must cover the 95th percentile of
/// per-minute one-sided demand (mean-vs-mean variant selectable).
inline Condition2Result condition2_depth(const DepthGrid& grid,
                                         const std::map<int64_t, MinuteFlow>& flows,
                                         const Decimal& spread_bps,
                                         bool mean_vs_mean = false) {
  int column = grid.spread_index(spread_bps);
  if (column < 0)
    throw ValidationError("condition2_depth: spread " + spread_bps.str() + " not in grid");

  Condition2Result res;
  std::vector<double> bid_depths, ask_depths;
  for (const auto& row : grid.rows) {
    if (row.one_sided) continue;
    bid_depths.push_back(row.depths[column].bid_depth_usd.to_double());
    ask_depths.push_back(row.depths[column].ask_depth_usd.to_double());
  }
  if (!bid_depths.empty()) {
    res.mean_bid_depth = mean_of(bid_depths);
    res.mean_ask_depth = mean_of(ask_depths);
  }

  std::vector<double> buy, sell;
  for (const auto& [minute, flow] : flows) {
    buy.push_back(flow.buy_notional.to_double());
    sell.push_back(flow.sell_notional.to_double());
  }
  if (buy.empty()) {
    res.vacuous = true;  // nothing traded; nothing to cover
    res.ok = true;
    return res;
  }
  res.bid_demand = mean_vs_mean ? mean_of(sell) : percentile95(sell);
  res.ask_demand = mean_vs_mean ? mean_of(buy) : percentile95(buy);
  res.ok = res.mean_bid_depth >= res.bid_demand && res.mean_ask_depth >= res.ask_demand;
  return res;
}

/// Share (in percent) of trade-active minutes whose book depth could not
/// cover `coverage_fraction` of that minute's traded notional on both
/// sides (volume treated as potentially one-sided).
inline double insufficiency_percentage(const DepthGrid& grid,
                                       const std::map<int64_t, MinuteFlow>& flows,
                                       const Decimal& spread_bps, double coverage_fraction) {
  int column = grid.spread_index(spread_bps);
  if (column < 0)
    throw ValidationError("insufficiency_percentage: spread " + spread_bps.str() +
                          " not in grid");
  long overlapping = 0, failing = 0;
  for (const auto& row : grid.rows) {
    if (row.one_sided) continue;
    auto it = flows.find(row.minute);
    if (it == flows.end()) continue;
    ++overlapping;
    double need = coverage_fraction * it->second.total().to_double();
    double bid = row.depths[column].bid_depth_usd.to_double();
    double ask = row.depths[column].ask_depth_usd.to_double();
    if (bid < need || ask < need) ++failing;
  }
  if (overlapping == 0)
    throw ComputeError("insufficiency_percentage: no overlapping minutes");
  return 100.0 * static_cast<double>(failing) / static_cast<double>(overlapping);
}

struct SpreadVerdict {
  int spread_bps = 0;
  bool c1_tick = false;
  bool c2_mean_depth = false;
  bool c3_stationary = false;
  bool c4_event_adequate = true;
  bool sd_condition = false;   // draft: density beats the average trade
  bool rlq_condition = false;  // draft: weighted depth beats average one-sided flow
  bool c2_vacuous = false;
  bool c3_degenerate = false;  // constant or too-short depth series
  bool c4_vacuous = true;      // no events configured / no coverage
  double mean_bid_depth = 0;
  double mean_ask_depth = 0;
  double mean_density_bid = 0;
  double mean_density_ask = 0;
  double mean_rlq_bid = 0;
  double mean_rlq_ask = 0;
  double adf_statistic = 0;
  double insufficiency_pct = 0;
  bool insufficiency_known = false;

  bool passes(const CalibrationConfig& cfg) const {
    bool ok = c1_tick && c2_mean_depth && c3_stationary && c4_event_adequate;
    if (cfg.draft_mode) ok = ok && sd_condition && rlq_condition;
    return ok;
  }
};

enum class CalibrationRationale { TickConstrained, DepthLimited, Ok };

inline const char* to_string(CalibrationRationale r) {
  switch (r) {
    case CalibrationRationale::TickConstrained: return "TICK_CONSTRAINED";
    case CalibrationRationale::DepthLimited: return "DEPTH_LIMITED";
    case CalibrationRationale::Ok: return "OK";
  }
  return "?";
}

struct CalibrationResult {
  std::string market;
  int original_bps = 0;
  int chosen_bps = 0;
  CalibrationRationale rationale = CalibrationRationale::Ok;
  double min_tick_pct = 0;  // one tick as percent of index price
  std::vector<SpreadVerdict> verdicts;  // one per swept spread

  const SpreadVerdict* verdict_at(int spread_bps) const {
    for (const auto& v : verdicts)
      if (v.spread_bps == spread_bps) return &v;
    return nullptr;
  }
};

namespace calibration_detail {

/// ADF verdict on the combined per-minute depth series. Constant or
/// too-short series cannot reject anything; they are treated as consistent
/// depth and flagged.
inline void judge_stationarity(SpreadVerdict& verdict, const std::vector<double>& depth_series,
                               const CalibrationConfig& cfg) {
  try {
    AdfResult adf = adf_test(depth_series, cfg.adf_max_lag);
    verdict.adf_statistic = adf.statistic;
    double crit = cfg.adf_significance <= 0.01   ? adf.critical_1pct
                  : cfg.adf_significance <= 0.05 ? adf.critical_5pct
                                                 : adf.critical_10pct;
    verdict.c3_stationary = adf.statistic < crit;
  } catch (const ComputeError&) {
    verdict.c3_degenerate = true;
    verdict.c3_stationary = true;
  }
}

}  // namespace calibration_detail

/// Sweeps the spread ladder for one market and picks the tightest spread
/// that satisfies every enabled condition. Events, when supplied, feed the
/// event-adequacy condition; without them it holds vacuously.
inline CalibrationResult sweep_max_spread(std::span<const OrderBookSnapshot> books,
                                          std::span<const TradeRecord> trades,
                                          const MarketSpec& spec, const CalibrationConfig& cfg,
                                          std::span<const EventWindow> events = {}) {
  validate(cfg);

  CalibrationResult result;
  result.market = spec.market;
  result.original_bps = spec.bracket_bps;
  result.min_tick_pct = min_tick_bps(spec);

  std::vector<Decimal> spreads;
  spreads.reserve(cfg.spreads_bps.size());
  for (int s : cfg.spreads_bps) spreads.push_back(Decimal::from_int(s));

  DepthGrid grid = depth_grid(books, spreads);
  auto flows = bucket_trades_per_minute(trades, cfg.rounding);
  auto recon = reconstruct_minute_books(trades, cfg.rounding, cfg.include_liquidations);

  double avg_trade_notional = 0;
  if (!trades.empty()) {
    std::vector<double> notionals;
    notionals.reserve(trades.size());
    for (const auto& t : trades) notionals.push_back(t.notional().to_double());
    avg_trade_notional = mean_of(notionals);
  }
  double avg_minute_buy = 0, avg_minute_sell = 0;
  if (!flows.empty()) {
    std::vector<double> buy, sell;
    for (const auto& [minute, flow] : flows) {
      buy.push_back(flow.buy_notional.to_double());
      sell.push_back(flow.sell_notional.to_double());
    }
    avg_minute_buy = mean_of(buy);
    avg_minute_sell = mean_of(sell);
  }

  for (size_t si = 0; si < spreads.size(); ++si) {
    const Decimal& spread = spreads[si];
    SpreadVerdict verdict;
    verdict.spread_bps = cfg.spreads_bps[si];
    verdict.c1_tick = condition1_tick(spec, spread);

    Condition2Result c2 = condition2_depth(grid, flows, spread, cfg.condition2_mean_vs_mean);
    verdict.c2_mean_depth = c2.ok;
    verdict.c2_vacuous = c2.vacuous;
    verdict.mean_bid_depth = c2.mean_bid_depth;
    verdict.mean_ask_depth = c2.mean_ask_depth;

    std::vector<double> depth_series;
    std::vector<double> density_bid, density_ask, rlq_bid, rlq_ask;
    for (const auto& row : grid.rows) {
      if (row.one_sided) continue;
      depth_series.push_back(
          (row.depths[si].bid_depth_usd + row.depths[si].ask_depth_usd).to_double());
    }
    for (const auto& book : books) {
      if (book.bids.empty() || book.asks.empty()) continue;
      density_bid.push_back(spread_density(book, spec, spread, Side::Bid).density);
      density_ask.push_back(spread_density(book, spec, spread, Side::Ask).density);
      rlq_bid.push_back(relative_liquidity(book, spread, Side::Bid, spec.tick_size).rlq);
      rlq_ask.push_back(relative_liquidity(book, spread, Side::Ask, spec.tick_size).rlq);
    }
    if (!density_bid.empty()) {
      verdict.mean_density_bid = mean_of(density_bid);
      verdict.mean_density_ask = mean_of(density_ask);
      verdict.mean_rlq_bid = mean_of(rlq_bid);
      verdict.mean_rlq_ask = mean_of(rlq_ask);
    }
    verdict.sd_condition = verdict.mean_density_bid > avg_trade_notional &&
                           verdict.mean_density_ask > avg_trade_notional;
    verdict.rlq_condition = verdict.mean_rlq_bid > avg_minute_sell &&
                            verdict.mean_rlq_ask > avg_minute_buy;

    if (depth_series.empty()) {
      verdict.c3_degenerate = true;
      verdict.c3_stationary = true;
    } else {
      calibration_detail::judge_stationarity(verdict, depth_series, cfg);
    }

    if (!events.empty()) {
      std::vector<EventDepthProfile> profiles;
      for (const auto& event : events) {
        try {
          profiles.push_back(event_depth_profile(grid, recon, event, spread));
        } catch (const ComputeError&) {
          // event window not covered by this dataset; it cannot constrain
        }
      }
      if (!profiles.empty()) {
        verdict.c4_vacuous = false;
        verdict.c4_event_adequate =
            condition4_event_adequacy(profiles, cfg.condition4_tolerance_breaches);
      }
    }

    if (!flows.empty()) {
      verdict.insufficiency_pct =
          insufficiency_percentage(grid, flows, spread, cfg.volume_coverage_fraction);
      verdict.insufficiency_known = true;
    }
    result.verdicts.push_back(std::move(verdict));
  }

  if (result.min_tick_pct * 100.0 >= 40.0) {
    result.rationale = CalibrationRationale::TickConstrained;
    result.chosen_bps = 40;
    return result;
  }

  for (const auto& verdict : result.verdicts) {
    if (verdict.passes(cfg)) {
      result.chosen_bps = verdict.spread_bps;
      result.rationale = CalibrationRationale::Ok;
      return result;
    }
  }
  result.chosen_bps = cfg.spreads_bps.back();
  result.rationale = CalibrationRationale::DepthLimited;
  return result;
}

struct BracketRow {
  std::string market;
  int original_bps = 0;
  int revised_bps = 0;
  CalibrationRationale rationale = CalibrationRationale::Ok;
  int tested_bps = 0;             // spread the insufficiency backtest ran at
  int widened_bps = 0;            // re-test spread when widening fired, else 0
  double insufficiency_pct = 0;   // at tested_bps
  double widened_pct = 0;         // at widened_bps (when widened)
  bool widened = false;
};

/// Maps each calibrated market into the bracket ladder, widening once when
/// the insufficiency backtest at the chosen spread crosses the threshold.
inline std::vector<BracketRow> classify_markets(
    std::span<const CalibrationResult> results,
    const std::map<std::pair<std::string, int>, double>& insufficiency_pct,
    const CalibrationConfig& cfg) {
  validate(cfg);
  std::vector<BracketRow> table;
  for (const auto& result : results) {
    BracketRow row;
    row.market = result.market;
    row.original_bps = result.original_bps;
    row.rationale = result.rationale;

    int chosen = result.chosen_bps;
    row.tested_bps = chosen;
    auto lookup = [&](int spread) -> std::optional<double> {
      auto it = insufficiency_pct.find({result.market, spread});
      if (it == insufficiency_pct.end()) return std::nullopt;
      return it->second;
    };
    if (auto pct = lookup(chosen)) {
      row.insufficiency_pct = *pct;
      if (*pct / 100.0 >= cfg.insufficiency_threshold_widen) {
        auto next = std::upper_bound(cfg.spreads_bps.begin(), cfg.spreads_bps.end(), chosen);
        if (next != cfg.spreads_bps.end()) {
          chosen = *next;
          row.widened = true;
          row.widened_bps = chosen;
          if (auto widened_pct = lookup(chosen)) row.widened_pct = *widened_pct;
        }
      }
    }

    auto bracket = std::lower_bound(cfg.brackets.begin(), cfg.brackets.end(), chosen);
    row.revised_bps = bracket == cfg.brackets.end() ? cfg.brackets.back() : *bracket;
    table.push_back(std::move(row));
  }
  std::sort(table.begin(), table.end(),
            [](const BracketRow& a, const BracketRow& b) { return a.market < b.market; });
  return table;
}

}  // namespace spreadlab
