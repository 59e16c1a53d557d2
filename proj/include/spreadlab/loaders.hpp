#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "decimal.hpp"
#include "errors.hpp"
#include "fileio.hpp"
#include "market_data.hpp"
#include "types.hpp"

namespace spreadlab {

inline Decimal decimal_from_json(const nlohmann::json& v, long line_no) {
  try {
    if (v.is_string()) return Decimal::parse(v.get<std::string>());
    if (v.is_number_integer()) return Decimal::from_int(v.get<int64_t>());
    if (v.is_number_unsigned()) return Decimal::from_int(static_cast<long long>(v.get<uint64_t>()));
    if (v.is_number_float()) return Decimal::from_double(v.get<double>());
  } catch (const DecimalError& e) {
    throw ParseError(e.what(), line_no);
  }
  throw ParseError("expected a number or numeric string, got " + v.dump(), line_no);
}

struct SnapshotLoadResult {
  std::vector<OrderBookSnapshot> snapshots;  // sorted by (market, ts)
  size_t duplicate_count = 0;                // re-polled minutes replaced by the last occurrence
};

/// Reads a JSON-lines snapshot file: one object per line with fields
/// {ts, market, bids, asks}, sides as [price, size] pairs. Timestamps are
/// truncated to the minute. Duplicate (market, minute) keeps the last.
inline SnapshotLoadResult load_orderbooks(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  SnapshotLoadResult result;
  std::map<std::pair<std::string, int64_t>, OrderBookSnapshot> by_key;

  long line_no = 0;
  for (auto line : split_lines(content)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded()) throw ParseError("malformed JSON", line_no);
    if (!obj.is_object() || !obj.contains("ts") || !obj.contains("market") ||
        !obj.contains("bids") || !obj.contains("asks"))
      throw ParseError("snapshot object needs ts/market/bids/asks", line_no);

    OrderBookSnapshot book;
    book.market = obj.at("market").get<std::string>();
    try {
      book.ts_minute = truncate_minute_s(parse_rfc3339_ms(obj.at("ts").get<std::string>()));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    auto read_side = [&](const char* key, std::vector<PriceLevel>& side) {
      const auto& arr = obj.at(key);
      if (!arr.is_array()) throw ParseError(std::string(key) + " is not an array", line_no);
      for (const auto& lvl : arr) {
        if (!lvl.is_array() || lvl.size() != 2)
          throw ParseError(std::string(key) + " level is not a [price, size] pair", line_no);
        side.push_back({decimal_from_json(lvl[0], line_no), decimal_from_json(lvl[1], line_no)});
      }
    };
    read_side("bids", book.bids);
    read_side("asks", book.asks);
    validate_snapshot(book);

    auto key = std::make_pair(book.market, book.ts_minute);
    auto [it, inserted] = by_key.insert_or_assign(key, std::move(book));
    if (!inserted) ++result.duplicate_count;
  }

  result.snapshots.reserve(by_key.size());
  for (auto& [key, book] : by_key) result.snapshots.push_back(std::move(book));
  return result;
}

/// Canonical single-line form: minute-resolution ts, sorted sides, decimal
/// strings. Loading then re-serializing is idempotent.
inline std::string canonical_snapshot_line(const OrderBookSnapshot& book) {
  std::string out = "{\"ts\":\"" + format_rfc3339_minute(book.ts_minute) + "\",\"market\":\"" +
                    book.market + "\",\"bids\":[";
  auto append_side = [&out](const std::vector<PriceLevel>& side) {
    for (size_t i = 0; i < side.size(); ++i) {
      if (i) out += ',';
      out += "[\"" + side[i].price.str() + "\",\"" + side[i].size.str() + "\"]";
    }
  };
  append_side(book.bids);
  out += "],\"asks\":[";
  append_side(book.asks);
  out += "]}";
  return out;
}

inline std::string canonical_snapshot_file(const std::vector<OrderBookSnapshot>& books) {
  std::string out;
  for (const auto& book : books) {
    out += canonical_snapshot_line(book);
    out += '\n';
  }
  return out;
}

/// Reads the trade tape CSV: header side,size,price,createdAt,liquidation
/// with an optional market column (otherwise `default_market` applies).
/// Records come back sorted by createdAt.
inline std::vector<TradeRecord> load_trades(const std::filesystem::path& path,
                                            const std::string& default_market = "") {
  std::string content = read_file_auto(path);
  auto lines = split_lines(content);
  if (lines.empty()) return {};
  CsvHeader header(lines[0]);
  size_t side_col = header.require("side");
  size_t size_col = header.require("size");
  size_t price_col = header.require("price");
  size_t ts_col = header.require("createdAt");
  size_t liq_col = header.require("liquidation");
  std::optional<size_t> market_col;
  if (header.has("market")) market_col = header.require("market");

  std::vector<TradeRecord> trades;
  for (size_t i = 1; i < lines.size(); ++i) {
    long row = static_cast<long>(i + 1);
    if (lines[i].empty()) continue;
    auto fields = csv_split(lines[i], row);
    auto field = [&](size_t col) -> const std::string& {
      if (col >= fields.size()) throw ParseError("row has too few columns", row);
      return fields[col];
    };

    TradeRecord trade;
    trade.market = market_col ? field(*market_col) : default_market;
    const std::string& side = field(side_col);
    if (side == "BUY" || side == "buy")
      trade.side = TradeSide::Buy;
    else if (side == "SELL" || side == "sell")
      trade.side = TradeSide::Sell;
    else
      throw ParseError("bad trade side '" + side + "'", row);
    try {
      trade.size = Decimal::parse(field(size_col));
      trade.price = Decimal::parse(field(price_col));
    } catch (const DecimalError& e) {
      throw ParseError(e.what(), row);
    }
    try {
      trade.created_at_ms = parse_rfc3339_ms(field(ts_col));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), row);
    }
    const std::string& liq = field(liq_col);
    if (liq == "True" || liq == "true" || liq == "1")
      trade.liquidation = true;
    else if (liq == "False" || liq == "false" || liq == "0")
      trade.liquidation = false;
    else
      throw ParseError("bad liquidation flag '" + liq + "'", row);
    if (trade.size <= Decimal() || trade.price <= Decimal())
      throw ValidationError("non-positive size/price at row " + std::to_string(row) + " of " +
                            path.string());
    trades.push_back(std::move(trade));
  }
  std::stable_sort(trades.begin(), trades.end(),
                   [](const TradeRecord& a, const TradeRecord& b) {
                     return a.created_at_ms < b.created_at_ms;
                   });
  return trades;
}

/// Reads the per-market static data CSV: market,tickSize,indexPrice,bracketBps.
inline std::map<std::string, MarketSpec> load_market_specs(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  auto lines = split_lines(content);
  if (lines.empty()) return {};
  CsvHeader header(lines[0]);
  size_t market_col = header.require("market");
  size_t tick_col = header.require("tickSize");
  size_t price_col = header.require("indexPrice");
  size_t bracket_col = header.require("bracketBps");

  std::map<std::string, MarketSpec> specs;
  for (size_t i = 1; i < lines.size(); ++i) {
    long row = static_cast<long>(i + 1);
    if (lines[i].empty()) continue;
    auto fields = csv_split(lines[i], row);
    if (fields.size() <= std::max({market_col, tick_col, price_col, bracket_col}))
      throw ParseError("row has too few columns", row);
    MarketSpec spec;
    spec.market = fields[market_col];
    try {
      spec.tick_size = Decimal::parse(fields[tick_col]);
      spec.index_price = Decimal::parse(fields[price_col]);
    } catch (const DecimalError& e) {
      throw ParseError(e.what(), row);
    }
    spec.bracket_bps = std::stoi(fields[bracket_col]);
    validate(spec);
    specs[spec.market] = std::move(spec);
  }
  return specs;
}

/// Reads the market,fees CSV.
inline std::map<std::string, Decimal> load_fees(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  auto lines = split_lines(content);
  if (lines.empty()) return {};
  CsvHeader header(lines[0]);
  size_t market_col = header.require("market");
  size_t fees_col = header.require("fees");
  std::map<std::string, Decimal> fees;
  for (size_t i = 1; i < lines.size(); ++i) {
    long row = static_cast<long>(i + 1);
    if (lines[i].empty()) continue;
    auto fields = csv_split(lines[i], row);
    if (fields.size() <= std::max(market_col, fees_col))
      throw ParseError("row has too few columns", row);
    try {
      fees[fields[market_col]] = Decimal::parse(fields[fees_col]);
    } catch (const DecimalError& e) {
      throw ParseError(e.what(), row);
    }
  }
  return fees;
}

}  // namespace spreadlab
