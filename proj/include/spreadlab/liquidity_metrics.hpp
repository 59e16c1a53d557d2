#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "market_data.hpp"
#include "stats.hpp"
#include "types.hpp"

namespace spreadlab {

/// One-tick cost as a percent of the index price (the "Min Bps" table
/// column; multiply by 100 more for basis points).
inline double min_tick_bps(const MarketSpec& spec) {
  return spec.tick_size.to_double() / spec.index_price.to_double() * 100.0;
}

struct SpreadDensity {
  Side side = Side::Bid;
  Decimal spread_bps;
  Decimal depth_usd;
  long long tick_levels = 0;
  double density = 0;  // USD per tick level
};

/// Average resting notional per tick position within the band. The tick
/// count is the band's price width divided by the tick size, clamped to 1
/// whenever any depth exists.
inline SpreadDensity spread_density(const OrderBookSnapshot& book, const MarketSpec& spec,
                                    const Decimal& spread_bps, Side side) {
  SpreadDensity sd;
  sd.side = side;
  sd.spread_bps = spread_bps;
  SideDepth depth = depth_within_spread(book, spread_bps);
  sd.depth_usd = side == Side::Bid ? depth.bid_depth_usd : depth.ask_depth_usd;
  Decimal width = compute_mid(book) * spread_bps.shifted(-4);
  sd.tick_levels = width.floor_div(spec.tick_size);
  if (sd.depth_usd > Decimal() && sd.tick_levels < 1) sd.tick_levels = 1;
  sd.density = sd.depth_usd.is_zero() || sd.tick_levels == 0
                   ? 0.0
                   : sd.depth_usd.to_double() / static_cast<double>(sd.tick_levels);
  return sd;
}

struct RelativeLiquidity {
  Side side = Side::Bid;
  Decimal spread_bps;
  // (tick distance from the touch, probability mass of in-range volume there)
  std::vector<std::pair<long long, double>> weights;
  double rlq = 0;  // USD
};

/// Probability-weighted depth: the empirical mass of volume at each tick
/// distance from the touch times the notional resting there, summed over
/// the band.
inline RelativeLiquidity relative_liquidity(const OrderBookSnapshot& book,
                                            const Decimal& spread_bps, Side side,
                                            const Decimal& tick_size) {
  RelativeLiquidity rl;
  rl.side = side;
  rl.spread_bps = spread_bps;
  const auto& levels = side == Side::Bid ? book.bids : book.asks;
  if (levels.empty())
    throw ComputeError("relative_liquidity: empty " + std::string(to_string(side)) + " side");

  Decimal mid = compute_mid(book);
  Decimal half_width = mid * spread_bps.shifted(-4);
  Decimal lower = mid - half_width;
  Decimal upper = mid + half_width;
  Decimal best = levels.front().price;

  std::map<long long, Decimal> usd_by_tick;
  Decimal total;
  for (const auto& lvl : levels) {
    bool in_range = side == Side::Bid ? lvl.price >= lower : lvl.price <= upper;
    if (!in_range) break;
    Decimal dist = side == Side::Bid ? best - lvl.price : lvl.price - best;
    usd_by_tick[dist.round_div(tick_size)] += lvl.notional();
    total += lvl.notional();
  }
  if (total.is_zero()) return rl;  // no volume within spread

  double total_usd = total.to_double();
  for (const auto& [tick, usd] : usd_by_tick) {
    double prob = usd.to_double() / total_usd;
    rl.weights.emplace_back(tick, prob);
    rl.rlq += prob * usd.to_double();
  }
  return rl;
}

inline const std::vector<long long>& trade_count_thresholds() {
  static const std::vector<long long> thresholds{50'000, 100'000, 250'000, 500'000, 1'500'000};
  return thresholds;
}

struct TradeStats {
  std::string market;
  int64_t day = 0;  // days since epoch, UTC
  double mean_notional = 0;
  double std_notional = 0;  // population
  Decimal max_notional;
  std::map<long long, int> counts_above;  // strictly greater than the threshold
  double p95_minute_bid_demand = 0;       // per-minute SELL notional
  double p95_minute_ask_demand = 0;       // per-minute BUY notional
  double p95_trade_notional = 0;          // per-trade variant, reported alongside
  int trade_count = 0;
  int active_minutes = 0;

  std::string day_str() const { return format_date(day); }
};

/// Per (market, day) notional statistics over one market's tape. Days with
/// no trades are simply absent.
inline std::vector<TradeStats> trade_statistics(
    std::span<const TradeRecord> trades, MinuteRounding rounding = MinuteRounding::Truncate) {
  std::map<int64_t, std::vector<const TradeRecord*>> by_day;
  for (const auto& t : trades) by_day[day_of(t.created_at_ms / 1000)].push_back(&t);

  std::vector<TradeStats> out;
  for (const auto& [day, day_trades] : by_day) {
    TradeStats stats;
    stats.market = day_trades.front()->market;
    stats.day = day;
    stats.trade_count = static_cast<int>(day_trades.size());

    std::vector<double> notionals;
    notionals.reserve(day_trades.size());
    std::vector<TradeRecord> owned;
    owned.reserve(day_trades.size());
    for (const auto* t : day_trades) {
      Decimal notional = t->notional();
      notionals.push_back(notional.to_double());
      if (notional > stats.max_notional) stats.max_notional = notional;
      for (long long threshold : trade_count_thresholds())
        if (notional > Decimal::from_int(threshold)) ++stats.counts_above[threshold];
      owned.push_back(*t);
    }
    for (long long threshold : trade_count_thresholds())
      stats.counts_above.try_emplace(threshold, 0);

    stats.mean_notional = mean_of(notionals);
    stats.std_notional = stddev_pop(notionals);
    stats.p95_trade_notional = percentile95(notionals);

    auto buckets = bucket_trades_per_minute(owned, rounding);
    std::vector<double> buy, sell;
    for (const auto& [minute, flow] : buckets) {
      buy.push_back(flow.buy_notional.to_double());
      sell.push_back(flow.sell_notional.to_double());
    }
    stats.active_minutes = static_cast<int>(buckets.size());
    stats.p95_minute_ask_demand = percentile95(buy);
    stats.p95_minute_bid_demand = percentile95(sell);
    out.push_back(std::move(stats));
  }
  return out;
}

struct DepthGridRow {
  std::string market;
  int64_t minute = 0;
  bool one_sided = false;  // mid undefined; depths reported as zero
  std::vector<SideDepth> depths;  // one entry per grid spread
};

struct DepthGrid {
  std::vector<Decimal> spreads_bps;
  std::vector<DepthGridRow> rows;  // one per snapshot, ordered by minute

  /// Index of a spread in the grid, or -1.
  int spread_index(const Decimal& spread_bps) const {
    for (size_t i = 0; i < spreads_bps.size(); ++i)
      if (spreads_bps[i] == spread_bps) return static_cast<int>(i);
    return -1;
  }
};

/// Depth at every (snapshot, spread) pair for one market. Rows are
/// monotone non-decreasing across the spread axis by construction.
inline DepthGrid depth_grid(std::span<const OrderBookSnapshot> books,
                            const std::vector<Decimal>& spreads_bps) {
  if (spreads_bps.empty()) throw ValidationError("depth_grid: empty spread list");
  for (size_t i = 1; i < spreads_bps.size(); ++i)
    if (!(spreads_bps[i - 1] < spreads_bps[i]))
      throw ValidationError("depth_grid: spreads must be strictly increasing");

  DepthGrid grid;
  grid.spreads_bps = spreads_bps;
  grid.rows.reserve(books.size());
  for (const auto& book : books) {
    DepthGridRow row;
    row.market = book.market;
    row.minute = book.ts_minute;
    if (book.bids.empty() || book.asks.empty()) {
      row.one_sided = true;
      row.depths.assign(spreads_bps.size(), SideDepth{});
    } else {
      for (const auto& s : spreads_bps) row.depths.push_back(depth_within_spread(book, s));
    }
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

}  // namespace spreadlab
