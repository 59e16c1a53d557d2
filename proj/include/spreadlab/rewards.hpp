#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "decimal.hpp"
#include "errors.hpp"
#include "fileio.hpp"
#include "toml_lite.hpp"

namespace spreadlab {

struct QWeights {
  double y = 0.35;              // exponent on the depth-spread score
  double z = 0.65;              // exponent on maker volume
  double uptime_exponent = 5;   // exponent on the positive-sample fraction

  static QWeights majors() { return {0.15, 0.85, 5}; }
  static QWeights altcoins() { return {0.35, 0.65, 5}; }
  /// Volume-only scoring: y disabled, uptime disabled, z = 1.
  static QWeights linear_volume() { return {0.0, 1.0, 0.0}; }
};

inline void validate(const QWeights& w) {
  if (w.y < 0 || w.z < 0 || w.uptime_exponent < 0)
    throw ValidationError("Q weights must be non-negative");
}

/// One LP's pre-aggregated epoch activity.
struct LpEpochSample {
  std::string account;
  double depth_spread_score = 0;       // sum of depth/spread over samples, both sides
  double positive_sample_fraction = 0; // uptime share of samples with two-sided quotes
  double maker_volume = 0;             // USD
};

inline void validate(const LpEpochSample& s) {
  if (s.depth_spread_score < 0 || s.maker_volume < 0)
    throw ValidationError("LP sample '" + s.account + "': negative inputs");
  if (s.positive_sample_fraction < 0 || s.positive_sample_fraction > 1)
    throw ValidationError("LP sample '" + s.account + "': uptime outside [0,1]");
}

struct DepthSpreadQuote {
  double depth_usd = 0;
  double spread = 0;
};

/// Builds the depth-spread score from raw (depth, spread) samples.
inline double depth_spread_score(std::span<const DepthSpreadQuote> quotes) {
  double score = 0;
  for (const auto& q : quotes) {
    if (q.spread <= 0) throw ValidationError("depth_spread_score: non-positive spread");
    score += q.depth_usd / q.spread;
  }
  return score;
}

namespace rewards_detail {

/// A zero weight disables its factor entirely (0^0 := 1 holds only there);
/// a unit weight passes the base through untouched.
inline double power_factor(double base, double exponent) {
  if (exponent == 0) return 1.0;
  if (exponent == 1) return base;
  return std::pow(base, exponent);
}

}  // namespace rewards_detail

/// Epoch score: depth_spread^y * uptime^5 * makerVolume^z.
inline double q_final(const LpEpochSample& sample, const QWeights& w) {
  validate(w);
  validate(sample);
  return rewards_detail::power_factor(sample.depth_spread_score, w.y) *
         rewards_detail::power_factor(sample.positive_sample_fraction, w.uptime_exponent) *
         rewards_detail::power_factor(sample.maker_volume, w.z);
}

/// Volume-only score used for the mature markets.
inline std::map<std::string, double> linear_volume_q(std::span<const LpEpochSample> samples) {
  std::map<std::string, double> q;
  for (const auto& s : samples) {
    validate(s);
    q[s.account] = s.maker_volume;
  }
  return q;
}

struct RewardShare {
  double q = 0;
  double share = 0;   // fraction of the pool
  double tokens = 0;  // share * pool
};

/// Pool split proportional to Q scores.
inline std::map<std::string, RewardShare> reward_shares(std::span<const LpEpochSample> samples,
                                                        const QWeights& w, double pool_tokens) {
  std::map<std::string, RewardShare> shares;
  double total = 0;
  for (const auto& s : samples) {
    double q = q_final(s, w);
    shares[s.account].q = q;
    total += q;
  }
  if (total <= 0) throw ComputeError("reward_shares: no eligible LPs (all Q scores zero)");
  for (auto& [account, share] : shares) {
    share.share = share.q / total;
    share.tokens = share.share * pool_tokens;
  }
  return shares;
}

/// Maker rebate in USD. Exact.
inline Decimal rebate_value(const Decimal& volume_usd, const Decimal& rate) {
  if (volume_usd.is_negative() || rate.is_negative())
    throw ValidationError("rebate_value: negative inputs");
  return volume_usd * rate;
}

struct RebatesVsRewardsRow {
  double volume = 0;
  double rebate_low = 0;
  double rebate_high = 0;
  double rewards = 0;
};

struct RebatesVsRewardsCurve {
  std::vector<RebatesVsRewardsRow> rows;
  double crossover_low = 0;   // volume where low-rate rebates match the reward pool
  double crossover_high = 0;  // likewise for the high rate
};

/// Plot-ready comparison of rebate payouts against a fixed reward pool.
inline RebatesVsRewardsCurve rebates_vs_rewards_curve(std::span<const double> volumes,
                                                      double rate_low, double rate_high,
                                                      double rewards_usd) {
  if (rate_low <= 0 || rate_low >= 1 || rate_high <= 0 || rate_high >= 1)
    throw ValidationError("rebate rates must lie in (0, 1)");
  if (rewards_usd < 0) throw ValidationError("rewards_usd must be >= 0");
  RebatesVsRewardsCurve curve;
  curve.crossover_low = rewards_usd / rate_low;
  curve.crossover_high = rewards_usd / rate_high;
  for (double v : volumes)
    curve.rows.push_back({v, v * rate_low, v * rate_high, rewards_usd});
  return curve;
}

/// Exchange margin after paying rebates on the DMM's share of volume. Exact.
inline Decimal fee_margin(const Decimal& fee_revenue, const Decimal& volume,
                          const Decimal& rebate_rate, const Decimal& dmm_share) {
  if (fee_revenue.is_negative() || volume.is_negative() || rebate_rate.is_negative())
    throw ValidationError("fee_margin: negative inputs");
  if (dmm_share.is_negative() || dmm_share > Decimal::from_int(1))
    throw ValidationError("fee_margin: dmm_share outside [0,1]");
  return fee_revenue - volume * rebate_rate * dmm_share;
}

struct RebateTier {
  std::string label;
  double min_volume_share = 0;  // fraction of 30-day exchange volume
  double rate = 0;              // rebate fraction, e.g. 0.0001 for 0.0100%
};

struct RebateSchedule {
  std::string name;
  std::vector<RebateTier> tiers;  // ascending by min_volume_share
};

inline void validate(const RebateSchedule& schedule) {
  for (size_t i = 0; i < schedule.tiers.size(); ++i) {
    const auto& t = schedule.tiers[i];
    if (t.min_volume_share < 0 || t.rate < 0)
      throw ValidationError("rebate tier '" + t.label + "': negative fields");
    if (i > 0) {
      if (schedule.tiers[i - 1].min_volume_share >= t.min_volume_share)
        throw ValidationError("rebate tiers must be strictly increasing in volume share");
      if (schedule.tiers[i - 1].rate > t.rate)
        throw ValidationError("rebate rates must be non-decreasing across tiers");
    }
  }
}

/// Highest tier whose floor the share clears; none below the first tier.
inline std::optional<RebateTier> assign_rebate_tier(double volume_share,
                                                    const RebateSchedule& schedule) {
  std::optional<RebateTier> assigned;
  for (const auto& tier : schedule.tiers) {
    if (volume_share >= tier.min_volume_share)
      assigned = tier;
    else
      break;
  }
  return assigned;
}

struct DmmBid {
  std::string account;
  std::vector<double> metric_values;
  std::vector<double> metric_totals;
  double committed_liquidity = 0;
  double penalty_fraction = 0;
  double reward_fraction = 0;
};

/// Equally-weighted bid score: each metric contributes its share of the
/// metric total.
inline double dmm_score(const DmmBid& bid) {
  if (bid.metric_values.size() != bid.metric_totals.size())
    throw ValidationError("dmm_score: metric_values and metric_totals differ in length");
  double score = 0;
  for (size_t i = 0; i < bid.metric_values.size(); ++i) {
    if (bid.metric_totals[i] <= 0) throw ComputeError("dmm_score: non-positive metric total");
    score += bid.metric_values[i] / bid.metric_totals[i];
  }
  return score;
}

/// Net liquid assets a DMM must hold: epoch liquidity (daily average times
/// days) times the requirement rate. Exact.
inline Decimal dmm_stake_requirement(const Decimal& daily_liquidity, int days,
                                     const Decimal& rate) {
  if (daily_liquidity.is_negative() || days < 0 || rate.is_negative())
    throw ValidationError("dmm_stake_requirement: negative inputs");
  return daily_liquidity * Decimal::from_int(days) * rate;
}

struct DmmPenaltyReward {
  Decimal penalty;
  Decimal reward;
};

inline DmmPenaltyReward dmm_penalty_reward(const Decimal& staked, const Decimal& penalty_fraction,
                                           const Decimal& reward_fraction) {
  for (const auto& f : {penalty_fraction, reward_fraction})
    if (f.is_negative() || f > Decimal::from_int(1))
      throw ValidationError("dmm_penalty_reward: fractions must lie in [0,1]");
  return {staked * penalty_fraction, staked * reward_fraction};
}

/// Q-score boost on declared volatile days.
inline double apply_volatility_multiplier(double q, bool is_volatile, double multiplier = 2.0) {
  if (multiplier < 1.0) throw ValidationError("volatility multiplier must be >= 1");
  return is_volatile ? q * multiplier : q;
}

struct TierAllocationRow {
  std::string tier;
  Decimal fee_total;  // exact sum over the tier's markets
  double allocation_fraction = 0;
  double reward_usd = 0;
  std::vector<std::string> missing_markets;  // listed in the tier, absent from fees
};

/// Per-tier fee totals against the reward split.
inline std::vector<TierAllocationRow> tier_allocation(
    const std::map<std::string, Decimal>& fees_by_market,
    const std::map<std::string, std::vector<std::string>>& tiers,
    const std::map<std::string, double>& allocation, double pool_usd) {
  double alloc_sum = 0;
  for (const auto& [tier, fraction] : allocation) alloc_sum += fraction;
  if (alloc_sum > 1.0 + 1e-12)
    throw ValidationError("tier allocations sum above 1");

  std::vector<TierAllocationRow> rows;
  for (const auto& [tier, markets] : tiers) {
    TierAllocationRow row;
    row.tier = tier;
    for (const auto& market : markets) {
      auto it = fees_by_market.find(market);
      if (it == fees_by_market.end())
        row.missing_markets.push_back(market);
      else
        row.fee_total += it->second;
    }
    if (auto it = allocation.find(tier); it != allocation.end()) {
      row.allocation_fraction = it->second;
      row.reward_usd = pool_usd * it->second;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- file formats ----------------------------------------------------

/// Epoch table row as published: percentages for share/volume/uptime.
struct EpochLpRow {
  std::string account;
  double reward_share_pct = 0;
  double maker_volume_pct = 0;
  double uptime_pct = 0;
};

inline std::vector<EpochLpRow> load_epoch_stats(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  auto lines = split_lines(content);
  if (lines.empty()) return {};
  CsvHeader header(lines[0]);
  size_t account_col = header.require("account");
  size_t share_col = header.require("rewardSharePct");
  size_t volume_col = header.require("makerVolumePct");
  size_t uptime_col = header.require("uptimePct");
  std::vector<EpochLpRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    long row_no = static_cast<long>(i + 1);
    auto fields = csv_split(lines[i], row_no);
    auto get = [&](size_t col) {
      if (col >= fields.size()) throw ParseError("row has too few columns", row_no);
      return std::stod(fields[col]);
    };
    rows.push_back({fields[account_col], get(share_col), get(volume_col), get(uptime_col)});
  }
  return rows;
}

/// Full LP sample CSV: account,depthSpreadScore,uptime,makerVolume.
inline std::vector<LpEpochSample> load_lp_samples(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  auto lines = split_lines(content);
  if (lines.empty()) return {};
  CsvHeader header(lines[0]);
  size_t account_col = header.require("account");
  size_t score_col = header.require("depthSpreadScore");
  size_t uptime_col = header.require("uptime");
  size_t volume_col = header.require("makerVolume");
  std::vector<LpEpochSample> samples;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    long row_no = static_cast<long>(i + 1);
    auto fields = csv_split(lines[i], row_no);
    auto get = [&](size_t col) {
      if (col >= fields.size()) throw ParseError("row has too few columns", row_no);
      return std::stod(fields[col]);
    };
    LpEpochSample s{fields[account_col], get(score_col), get(uptime_col), get(volume_col)};
    validate(s);
    samples.push_back(std::move(s));
  }
  return samples;
}

/// Rebate schedule from TOML ([[tier]] blocks) or JSON (array of objects),
/// fields label / minVolumeShare / rate.
inline RebateSchedule load_rebate_schedule(const std::filesystem::path& path) {
  std::string content = read_file_auto(path);
  RebateSchedule schedule;
  if (path.extension() == ".json") {
    auto doc = nlohmann::json::parse(content, nullptr, false);
    if (doc.is_discarded()) throw ParseError("malformed JSON in " + path.string());
    if (doc.is_object() && doc.contains("name")) schedule.name = doc.at("name").get<std::string>();
    const auto& list = doc.is_object() && doc.contains("tiers") ? doc.at("tiers") : doc;
    if (!list.is_array()) throw ParseError("rebate schedule JSON must be an array of tiers");
    for (const auto& item : list)
      schedule.tiers.push_back({item.at("label").get<std::string>(),
                                item.at("minVolumeShare").get<double>(),
                                item.at("rate").get<double>()});
  } else {
    auto doc = parse_toml(content);
    if (doc.contains("name")) schedule.name = doc.at("name").as_string();
    if (!doc.contains("tier")) throw ParseError("rebate schedule TOML needs [[tier]] entries");
    for (const auto& item : doc.at("tier").as_array())
      schedule.tiers.push_back({item.at("label").as_string(),
                                item.at("minVolumeShare").as_double(),
                                item.at("rate").as_double()});
  }
  validate(schedule);
  return schedule;
}

}  // namespace spreadlab
