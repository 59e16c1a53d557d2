#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "liquidity_metrics.hpp"
#include "stats.hpp"
#include "types.hpp"

namespace spreadlab {

/// Synthetic per-minute book rebuilt from the tape: BUY flow accumulates on
/// the ask side at the trade price (takers consumed ask liquidity), SELL on
/// the bid side. The book resets every minute.
struct ReconstructedBook {
  MinuteKey key;
  std::map<Decimal, Decimal> bid_levels;  // price -> cumulative size
  std::map<Decimal, Decimal> ask_levels;
  Decimal bid_notional;
  Decimal ask_notional;
};

inline std::vector<ReconstructedBook> reconstruct_minute_books(
    std::span<const TradeRecord> trades, MinuteRounding rounding = MinuteRounding::Truncate,
    bool include_liquidations = true) {
  std::map<int64_t, ReconstructedBook> by_minute;
  for (const auto& trade : trades) {
    if (!include_liquidations && trade.liquidation) continue;
    int64_t minute = minute_of(trade.created_at_ms, rounding);
    auto [it, inserted] = by_minute.try_emplace(minute);
    ReconstructedBook& book = it->second;
    if (inserted) book.key = MinuteKey{trade.market, minute};
    Decimal notional = trade.notional();
    if (trade.side == TradeSide::Buy) {
      book.ask_levels[trade.price] += trade.size;
      book.ask_notional += notional;
    } else {
      book.bid_levels[trade.price] += trade.size;
      book.bid_notional += notional;
    }
  }
  std::vector<ReconstructedBook> out;
  out.reserve(by_minute.size());
  for (auto& [minute, book] : by_minute) out.push_back(std::move(book));
  return out;
}

/// Summary of the per-minute demand a book would have needed to absorb.
/// Statistics run over trade-active minutes only.
struct DepthRequirement {
  double mean_bid = 0, mean_ask = 0;
  double median_bid = 0, median_ask = 0;
  double max_bid = 0, max_ask = 0;
  double p95_bid = 0, p95_ask = 0;
  size_t minutes = 0;
};

inline DepthRequirement estimated_depth_required(std::span<const ReconstructedBook> recon) {
  if (recon.empty()) throw ComputeError("estimated_depth_required: no trade-active minutes");
  std::vector<double> bid, ask;
  bid.reserve(recon.size());
  ask.reserve(recon.size());
  for (const auto& book : recon) {
    bid.push_back(book.bid_notional.to_double());
    ask.push_back(book.ask_notional.to_double());
  }
  DepthRequirement req;
  req.minutes = recon.size();
  req.mean_bid = mean_of(bid);
  req.mean_ask = mean_of(ask);
  req.median_bid = median_of(bid);
  req.median_ask = median_of(ask);
  req.max_bid = max_of(bid);
  req.max_ask = max_of(ask);
  req.p95_bid = percentile95(bid);
  req.p95_ask = percentile95(ask);
  return req;
}

struct AdequacyRow {
  int64_t minute = 0;
  Decimal book_bid;
  Decimal book_ask;
  Decimal required_bid;
  Decimal required_ask;
  bool adequate = false;
};

struct AdequacySeries {
  std::vector<AdequacyRow> rows;
  size_t skipped_minutes = 0;  // present in only one source (unless zero-filled)
};

/// Minute-by-minute comparison of the live book's depth at one spread
/// against the reconstructed demand. With zero_fill, book minutes without
/// trades count as vacuously adequate (required depth zero).
inline AdequacySeries depth_adequacy_series(const DepthGrid& grid,
                                            std::span<const ReconstructedBook> recon,
                                            const Decimal& spread_bps, bool zero_fill = false) {
  int column = grid.spread_index(spread_bps);
  if (column < 0)
    throw ValidationError("depth_adequacy_series: spread " + spread_bps.str() +
                          " not in the grid");

  std::map<int64_t, const ReconstructedBook*> required;
  for (const auto& book : recon) required[book.key.minute] = &book;

  AdequacySeries series;
  size_t matched_recon = 0;
  for (const auto& row : grid.rows) {
    if (row.one_sided) {
      ++series.skipped_minutes;
      continue;
    }
    auto it = required.find(row.minute);
    AdequacyRow out;
    out.minute = row.minute;
    out.book_bid = row.depths[column].bid_depth_usd;
    out.book_ask = row.depths[column].ask_depth_usd;
    if (it != required.end()) {
      out.required_bid = it->second->bid_notional;
      out.required_ask = it->second->ask_notional;
      ++matched_recon;
    } else if (!zero_fill) {
      ++series.skipped_minutes;
      continue;
    }
    out.adequate = out.book_bid >= out.required_bid && out.book_ask >= out.required_ask;
    series.rows.push_back(std::move(out));
  }
  series.skipped_minutes += required.size() - matched_recon;
  if (matched_recon == 0)
    throw ComputeError("depth_adequacy_series: no overlapping minutes between book and tape");
  return series;
}

}  // namespace spreadlab
