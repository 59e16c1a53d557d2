#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "decimal.hpp"
#include "errors.hpp"
#include "types.hpp"

namespace spreadlab {

/// Sorts sides into canonical order and rejects invalid books.
inline void validate_snapshot(OrderBookSnapshot& book) {
  for (const auto& side : {&book.bids, &book.asks}) {
    for (const auto& lvl : *side) {
      if (lvl.price <= Decimal() || lvl.size <= Decimal())
        throw ValidationError("non-positive price/size in book " + book.market + " @ " +
                              format_rfc3339_minute(book.ts_minute));
    }
  }
  std::sort(book.bids.begin(), book.bids.end(),
            [](const PriceLevel& a, const PriceLevel& b) { return b.price < a.price; });
  std::sort(book.asks.begin(), book.asks.end(),
            [](const PriceLevel& a, const PriceLevel& b) { return a.price < b.price; });
  if (!book.bids.empty() && !book.asks.empty() &&
      book.bids.front().price >= book.asks.front().price) {
    throw ValidationError("crossed book in " + book.market + " @ " +
                          format_rfc3339_minute(book.ts_minute) + ": best bid " +
                          book.bids.front().price.str() + " >= best ask " +
                          book.asks.front().price.str());
  }
}

/// (best bid + best ask) / 2, exact.
inline Decimal compute_mid(const OrderBookSnapshot& book) {
  if (book.bids.empty() || book.asks.empty())
    throw ComputeError("no mid price: one-sided or empty book in " + book.market + " @ " +
                       format_rfc3339_minute(book.ts_minute));
  return (book.bids.front().price + book.asks.front().price).half();
}

struct QuotedSpread {
  Decimal absolute;
  double bps = 0;
};

inline QuotedSpread quoted_spread(const OrderBookSnapshot& book) {
  Decimal mid = compute_mid(book);
  QuotedSpread qs;
  qs.absolute = book.asks.front().price - book.bids.front().price;
  qs.bps = qs.absolute.to_double() / mid.to_double() * 1e4;
  return qs;
}

struct SideDepth {
  Decimal bid_depth_usd;
  Decimal ask_depth_usd;
};

/// Quote-currency notional resting within +-spread_bps of mid. Bounds are
/// symmetric around mid; levels exactly on a bound count.
inline SideDepth depth_within_spread(const OrderBookSnapshot& book, const Decimal& spread_bps) {
  if (spread_bps <= Decimal()) throw ValidationError("spread_bps must be > 0");
  Decimal mid = compute_mid(book);
  Decimal half_width = mid * spread_bps.shifted(-4);
  Decimal lower = mid - half_width;
  Decimal upper = mid + half_width;
  SideDepth depth;
  for (const auto& lvl : book.bids) {
    if (lvl.price < lower) break;  // bids sorted descending
    depth.bid_depth_usd += lvl.notional();
  }
  for (const auto& lvl : book.asks) {
    if (lvl.price > upper) break;  // asks sorted ascending
    depth.ask_depth_usd += lvl.notional();
  }
  return depth;
}

/// Groups one market's trades into per-minute buy/sell notionals. Minutes
/// with no trades are absent.
inline std::map<int64_t, MinuteFlow> bucket_trades_per_minute(
    std::span<const TradeRecord> trades, MinuteRounding rounding = MinuteRounding::Truncate) {
  std::map<int64_t, MinuteFlow> buckets;
  for (const auto& trade : trades) {
    auto& flow = buckets[minute_of(trade.created_at_ms, rounding)];
    Decimal notional = trade.notional();
    if (trade.side == TradeSide::Buy)
      flow.buy_notional += notional;
    else
      flow.sell_notional += notional;
    ++flow.trade_count;
    if (notional > flow.max_trade_notional) flow.max_trade_notional = notional;
  }
  return buckets;
}

}  // namespace spreadlab
