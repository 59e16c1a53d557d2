#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "decimal.hpp"
#include "errors.hpp"
#include "timeutil.hpp"

namespace spreadlab {

enum class Side { Bid, Ask };

enum class TradeSide { Buy, Sell };

inline const char* to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }
inline const char* to_string(TradeSide s) { return s == TradeSide::Buy ? "BUY" : "SELL"; }

/// How trades are assigned to minutes: truncate to the containing minute
/// (default) or round to the nearest boundary.
enum class MinuteRounding { Truncate, Nearest };

inline int64_t minute_of(int64_t epoch_ms, MinuteRounding mode) {
  return mode == MinuteRounding::Truncate ? truncate_minute_s(epoch_ms)
                                          : round_minute_s(epoch_ms);
}

struct PriceLevel {
  Decimal price;
  Decimal size;

  Decimal notional() const { return price * size; }
};

/// One timestamped two-sided book, minute resolution. Sides are kept sorted:
/// bids descending, asks ascending from the touch.
struct OrderBookSnapshot {
  std::string market;
  int64_t ts_minute = 0;  // epoch seconds, zero seconds component
  std::vector<PriceLevel> bids;
  std::vector<PriceLevel> asks;
};

struct TradeRecord {
  std::string market;
  TradeSide side = TradeSide::Buy;
  Decimal size;
  Decimal price;
  int64_t created_at_ms = 0;
  bool liquidation = false;

  Decimal notional() const { return size * price; }
};

struct MarketSpec {
  std::string market;
  Decimal tick_size;
  Decimal index_price;
  int bracket_bps = 40;
};

inline void validate(const MarketSpec& spec) {
  if (spec.tick_size <= Decimal())
    throw ValidationError("market " + spec.market + ": tickSize must be > 0");
  if (spec.index_price <= Decimal())
    throw ValidationError("market " + spec.market + ": indexPrice must be > 0");
  switch (spec.bracket_bps) {
    case 10: case 15: case 20: case 30: case 40: case 50:
      break;
    default:
      throw ValidationError("market " + spec.market + ": bracketBps " +
                            std::to_string(spec.bracket_bps) +
                            " outside {10,15,20,30,40,50}");
  }
}

/// Join key between book rows and trade buckets.
struct MinuteKey {
  std::string market;
  int64_t minute = 0;  // epoch seconds, zero seconds component

  auto operator<=>(const MinuteKey&) const = default;
};

/// Per-minute taker flow on one market.
struct MinuteFlow {
  Decimal buy_notional;
  Decimal sell_notional;
  int trade_count = 0;
  Decimal max_trade_notional;

  Decimal total() const { return buy_notional + sell_notional; }
};

}  // namespace spreadlab
