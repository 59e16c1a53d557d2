// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs against the bundled data files, the frozen reference
// fixtures, and the installed CLI binary.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadlab/adf.hpp"
#include "spreadlab/calibration.hpp"
#include "spreadlab/event_study.hpp"
#include "spreadlab/liquidity_metrics.hpp"
#include "spreadlab/loaders.hpp"
#include "spreadlab/reconstruction.hpp"
#include "spreadlab/rewards.hpp"

using namespace spreadlab;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SPREADLAB_DATA_DIR;
const fs::path kFixtures = SPREADLAB_FIXTURE_DIR;
const fs::path kCli = SPREADLAB_CLI_PATH;

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

// ---- 1: tick-constraint table ------------------------------------------

void criterion_tick_table() {
  Check c;
  auto started = std::chrono::steady_clock::now();
  auto text = read_file_auto(kFixtures / "tick_table.csv");
  auto lines = split_lines(text);
  c.expect(lines.size() == 38, "expected 37 data rows");
  for (size_t i = 1; i < lines.size(); ++i) {
    auto fields = csv_split(lines[i]);
    MarketSpec spec{fields[0], Decimal::parse(fields[1]), Decimal::parse(fields[2]), 40};
    double want = std::stod(fields[3]);
    double got = min_tick_bps(spec);
    c.expect(std::abs(got - want) <= 0.001,
             fields[0] + ": got " + std::to_string(got) + ", table " + std::to_string(want));
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  c.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + "s");
  report(1, "tick-constraint table matches within 0.001 percent", c.ok, c.detail);
}

// ---- 2: trade notionals -------------------------------------------------

void criterion_trade_notionals() {
  Check c;
  auto trades = load_trades(kData / "trades_sol_may23.csv");
  c.expect(trades.size() == 5, "expected 5 trades");
  std::map<std::string, std::string> expected{
      {"282512.7304", "14087.6"}, {"210296.271", "10486.5"}, {"586926.34", "29260"},
      {"391011.8015", "19506.7"}, {"108397.16", "5428"}};
  for (const auto& trade : trades) {
    auto it = expected.find(trade.notional().str());
    if (it == expected.end()) {
      c.expect(false, "unexpected notional " + trade.notional().str());
      continue;
    }
    c.expect(trade.size.str() == it->second,
             "notional " + it->first + " from the wrong size " + trade.size.str());
    expected.erase(it);
  }
  c.expect(expected.empty(), "not every printed notional was reproduced");
  report(2, "trade notionals reproduce the printed column exactly", c.ok, c.detail);
}

// ---- 3: rebate arithmetic ----------------------------------------------

void criterion_rebates() {
  Check c;
  auto altcoin = rebate_value(Decimal::parse("6276767740.46"), Decimal::parse("0.0001"));
  c.expect(std::abs(altcoin.to_double() - 627676.77) <= 0.01,
           "altcoin rebate " + altcoin.str());
  auto majors = rebate_value(Decimal::parse("25000000000") * Decimal::parse("0.90"),
                             Decimal::parse("0.0001"));
  c.expect(majors == Decimal::parse("2250000"), "majors rebate " + majors.str());
  report(3, "rebate arithmetic hits the worked figures", c.ok, c.detail);
}

// ---- 4: tier fee sums ----------------------------------------------------

void criterion_tier_sums() {
  Check c;
  auto fees = load_fees(kData / "fees.csv");
  auto doc = parse_toml(read_file_auto(kData / "tiers.toml"));
  std::map<std::string, std::vector<std::string>> tiers;
  std::map<std::string, double> allocation;
  for (const auto& item : doc.at("tier").as_array()) {
    for (const auto& m : item.at("markets").as_array())
      tiers[item.at("label").as_string()].push_back(m.as_string());
    allocation[item.at("label").as_string()] = item.at("allocation").as_double();
  }
  auto rows = tier_allocation(fees, tiers, allocation, doc.at("pool").as_double());
  std::map<std::string, double> want{{"Tier 1", 555494.79},
                                     {"Tier 2", 276592.38},
                                     {"Tier 3", 199288.70},
                                     {"Tier 4", 97303.20}};
  for (const auto& row : rows) {
    double target = want.at(row.tier);
    c.expect(std::abs(row.fee_total.to_double() - target) <= 0.01,
             row.tier + " summed to " + row.fee_total.str());
    c.expect(row.missing_markets.empty(), row.tier + " has unknown markets");
  }
  report(4, "tier fee revenues sum to the published totals", c.ok, c.detail);
}

// ---- 5: DMM arithmetic ----------------------------------------------------

void criterion_dmm() {
  Check c;
  auto stake = dmm_stake_requirement(Decimal::parse("5000000"), 28, Decimal::parse("0.0002"));
  c.expect(stake == Decimal::parse("28000"), "stake " + stake.str());
  auto pr = dmm_penalty_reward(stake, Decimal::parse("0.1"), Decimal::parse("0.05"));
  c.expect(pr.penalty == Decimal::parse("2800"), "penalty " + pr.penalty.str());
  c.expect(pr.reward == Decimal::parse("1400"), "reward " + pr.reward.str());
  report(5, "DMM stake, penalty and reward are exact", c.ok, c.detail);
}

// ---- 6: rebates-vs-rewards crossover --------------------------------------

void criterion_crossover() {
  Check c;
  auto curve = rebates_vs_rewards_curve(std::vector<double>{1e9}, 0.0001, 0.000179, 1841096.0);
  c.expect(curve.crossover_high >= 9.5e9 && curve.crossover_high <= 11.5e9,
           "crossover " + std::to_string(curve.crossover_high));
  report(6, "crossover volume lands in [9.5B, 11.5B]", c.ok, c.detail);
}

// ---- 7: reconstruction conservation ---------------------------------------

void criterion_reconstruction() {
  Check c;
  std::mt19937 rng(20230523);
  std::uniform_int_distribution<int> cents(1, 999999);
  std::uniform_int_distribution<int> offset(0, 12 * 3600);
  std::uniform_int_distribution<int> coin(0, 1);
  int64_t base = parse_rfc3339_ms("2023-05-11T00:00:00Z");
  std::vector<TradeRecord> tape;
  for (int i = 0; i < 1000; ++i) {
    TradeRecord t;
    t.market = "ACC";
    t.side = coin(rng) ? TradeSide::Buy : TradeSide::Sell;
    t.size = Decimal::from_int(cents(rng)).shifted(-3);
    t.price = Decimal::from_int(cents(rng)).shifted(-2);
    t.created_at_ms = base + static_cast<int64_t>(offset(rng)) * 1000;
    tape.push_back(t);
  }
  Decimal direct;
  for (const auto& t : tape) direct += t.notional();
  Decimal rebuilt;
  for (const auto& book : reconstruct_minute_books(tape))
    rebuilt += book.bid_notional + book.ask_notional;
  c.expect(direct == rebuilt, "sum " + rebuilt.str() + " vs " + direct.str());

  for (auto& t : tape) t.side = TradeSide::Buy;
  for (const auto& book : reconstruct_minute_books(tape)) {
    c.expect(book.bid_levels.empty() && book.bid_notional.is_zero(),
             "BUY-only tape grew a bid side");
    if (!c.ok) break;
  }
  report(7, "reconstruction conserves notional exactly on 1000 trades", c.ok, c.detail);
}

// ---- 8: depth monotonicity -------------------------------------------------

void criterion_monotonicity() {
  Check c;
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> levels(1, 15);
  std::uniform_int_distribution<int> ticks(1, 120);
  std::uniform_int_distribution<int> qty(1, 900);
  std::vector<Decimal> grid;
  for (int s : {5, 10, 15, 20, 30, 40, 50}) grid.push_back(Decimal::from_int(s));

  for (int trial = 0; trial < 100; ++trial) {
    OrderBookSnapshot book;
    book.market = "MONO";
    book.ts_minute = 60 * trial;
    int nb = levels(rng), na = levels(rng);
    for (int i = 0; i < nb; ++i)
      book.bids.push_back({Decimal::parse("100") - Decimal::from_int(ticks(rng)).shifted(-3),
                           Decimal::from_int(qty(rng)).shifted(-2)});
    for (int i = 0; i < na; ++i)
      book.asks.push_back({Decimal::parse("100.001") + Decimal::from_int(ticks(rng)).shifted(-3),
                           Decimal::from_int(qty(rng)).shifted(-2)});
    validate_snapshot(book);
    Decimal prev_bid, prev_ask;
    for (const auto& s : grid) {
      auto depth = depth_within_spread(book, s);
      c.expect(depth.bid_depth_usd >= prev_bid && depth.ask_depth_usd >= prev_ask,
               "depth shrank when the band widened");
      prev_bid = depth.bid_depth_usd;
      prev_ask = depth.ask_depth_usd;
    }
  }

  // widening the band can only reduce the insufficiency share
  std::vector<OrderBookSnapshot> books;
  std::map<int64_t, MinuteFlow> flows;
  std::uniform_int_distribution<int> vol(10, 200000);
  for (int i = 0; i < 80; ++i) {
    OrderBookSnapshot book;
    book.market = "MONO";
    book.ts_minute = 1683806400 + i * 60;
    for (int l = 1; l <= 8; ++l) {
      book.bids.push_back({Decimal::parse("100") - Decimal::from_int(l * l).shifted(-3),
                           Decimal::from_int(qty(rng))});
      book.asks.push_back({Decimal::parse("100.001") + Decimal::from_int(l * l).shifted(-3),
                           Decimal::from_int(qty(rng))});
    }
    validate_snapshot(book);
    books.push_back(book);
    MinuteFlow flow;
    flow.buy_notional = Decimal::from_int(vol(rng));
    flow.sell_notional = Decimal::from_int(vol(rng));
    flow.trade_count = 1;
    flows[book.ts_minute] = flow;
  }
  auto depth = depth_grid(books, grid);
  double prev = 101.0;
  for (const auto& s : grid) {
    double pct = insufficiency_percentage(depth, flows, s, 0.8);
    c.expect(pct <= prev + 1e-12, "insufficiency rose from " + std::to_string(prev) + " to " +
                                      std::to_string(pct));
    prev = pct;
  }
  report(8, "depth grows and insufficiency shrinks with the spread", c.ok, c.detail);
}

// ---- 9: ADF oracle ---------------------------------------------------------

std::vector<double> load_series(const std::string& name) {
  std::ifstream in(kFixtures / (name + ".csv"));
  std::string line;
  std::getline(in, line);
  std::vector<double> xs;
  while (std::getline(in, line))
    if (!line.empty()) xs.push_back(std::stod(line));
  return xs;
}

void criterion_adf() {
  Check c;
  std::ifstream in(kFixtures / "adf_expected.json");
  auto expected = nlohmann::json::parse(in);
  std::map<std::string, bool> verdicts{{"adf_white_noise", true},
                                       {"adf_random_walk", false},
                                       {"adf_ar1_phi05", true}};
  for (const auto& [name, want_stationary] : verdicts) {
    const auto& want = expected.at("series").at(name);
    auto result = adf_test(load_series(name));
    double want_stat = want.at("statistic").get<double>();
    c.expect(std::abs(result.statistic - want_stat) <= 0.05,
             name + " statistic " + std::to_string(result.statistic) + " vs reference " +
                 std::to_string(want_stat));
    c.expect(result.stationary == want_stationary, name + " verdict flipped");
  }
  report(9, "ADF statistics match the frozen reference within 0.05", c.ok, c.detail);
}

// ---- 10: sweep oracle -----------------------------------------------------

struct SweepFixture {
  std::string name;
  std::vector<OrderBookSnapshot> books;
  std::vector<TradeRecord> trades;
  MarketSpec spec;
};

SweepFixture make_sweep_fixture(int index) {
  std::mt19937 rng(1000 + index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SweepFixture fx;
  fx.name = "fixture " + std::to_string(index);
  fx.spec = {"FX" + std::to_string(index), Decimal::parse("0.01"), Decimal::parse("100"), 40};

  double inner_bps = 3.0 + 6.0 * (index % 8);     // where the liquidity wall sits
  double inner_size = 40.0 + 60.0 * (index % 5);  // how much rests there
  double trade_size = 0.2 + 1.1 * (index % 4);

  int64_t base = 1683806400;
  for (int i = 0; i < 48; ++i) {
    OrderBookSnapshot book;
    book.market = fx.spec.market;
    book.ts_minute = base + i * 60;
    double mid = 100.0 + 0.01 * (i % 5);
    double inner = mid * inner_bps / 1e4;
    double wobble = 1.0 + 0.2 * unit(rng);
    book.bids.push_back(
        {Decimal::from_double(mid - inner), Decimal::from_double(inner_size * wobble)});
    book.asks.push_back(
        {Decimal::from_double(mid + inner), Decimal::from_double(inner_size * wobble)});
    book.bids.push_back({Decimal::from_double(mid * (1 - 0.0075)), Decimal::parse("1200")});
    book.asks.push_back({Decimal::from_double(mid * (1 + 0.0075)), Decimal::parse("1200")});
    validate_snapshot(book);
    fx.books.push_back(book);

    if (i % 2 == 0) {
      TradeRecord t;
      t.market = fx.spec.market;
      t.side = (i % 4 == 0) ? TradeSide::Buy : TradeSide::Sell;
      t.size = Decimal::from_double(trade_size * (1.0 + unit(rng)));
      t.price = Decimal::from_double(mid);
      t.created_at_ms = (base + i * 60) * 1000 + 1000;
      fx.trades.push_back(t);
    }
  }
  return fx;
}

/// Independent oracle: evaluate every spread with the public per-condition
/// operations and take the smallest passing one.
int oracle_chosen_bps(const SweepFixture& fx, const CalibrationConfig& cfg) {
  if (min_tick_bps(fx.spec) * 100.0 >= 40.0) return 40;
  std::vector<Decimal> spreads;
  for (int s : cfg.spreads_bps) spreads.push_back(Decimal::from_int(s));
  auto grid = depth_grid(fx.books, spreads);
  auto flows = bucket_trades_per_minute(fx.trades, cfg.rounding);
  for (size_t i = 0; i < spreads.size(); ++i) {
    if (!condition1_tick(fx.spec, spreads[i])) continue;
    if (!condition2_depth(grid, flows, spreads[i]).ok) continue;
    std::vector<double> series;
    for (const auto& row : grid.rows)
      if (!row.one_sided)
        series.push_back(
            (row.depths[i].bid_depth_usd + row.depths[i].ask_depth_usd).to_double());
    bool stationary = true;
    if (!series.empty()) {
      try {
        AdfResult adf = adf_test(series, cfg.adf_max_lag);
        stationary = adf.statistic < adf.critical_5pct;
      } catch (const ComputeError&) {
        stationary = true;  // constant or short series cannot fail the gate
      }
    }
    if (!stationary) continue;
    return cfg.spreads_bps[static_cast<int>(i)];
  }
  return cfg.spreads_bps.back();
}

void criterion_sweep_oracle() {
  Check c;
  CalibrationConfig cfg;
  for (int i = 0; i < 20; ++i) {
    auto fx = make_sweep_fixture(i);
    auto result = sweep_max_spread(fx.books, fx.trades, fx.spec, cfg);
    int want = oracle_chosen_bps(fx, cfg);
    c.expect(result.chosen_bps == want,
             fx.name + ": sweep " + std::to_string(result.chosen_bps) + " vs oracle " +
                 std::to_string(want));
  }

  auto uma = make_sweep_fixture(3);
  uma.spec = {"UMA-LIKE", Decimal::parse("0.01"), Decimal::parse("2.3360"), 40};
  auto result = sweep_max_spread(uma.books, uma.trades, uma.spec, cfg);
  c.expect(result.rationale == CalibrationRationale::TickConstrained,
           "UMA-like fixture not tick-constrained");
  c.expect(result.chosen_bps == 40, "UMA-like fixture chose " +
                                        std::to_string(result.chosen_bps));
  report(10, "sweep equals the exhaustive oracle on 20 fixtures", c.ok, c.detail);
}

// ---- 11: time to recovery ---------------------------------------------------

void criterion_recovery() {
  Check c;
  int64_t start = 1683806400;
  EventWindow event{"accept", start, start + 4 * 60, 300, 300};
  std::map<int64_t, double> series;
  for (int64_t m = start - 300; m < start; m += 60) series[m] = 100.0;
  double during[] = {100, 40, 50, 80, 100};
  for (int i = 0; i < 5; ++i) series[start + i * 60] = during[i];
  for (int64_t m = start + 5 * 60; m <= start + 4 * 60 + 300; m += 60) series[m] = 100.0;

  auto fixture = time_to_recovery(series, event, 0.75);
  c.expect(fixture.status == RecoveryStatus::Recovered, "fixture did not recover");
  c.expect(fixture.recovery_minutes == 2,
           "recovery " + std::to_string(fixture.recovery_minutes) + " minutes");

  auto flat = series;
  for (auto& [m, v] : flat) v = 100.0;
  auto never = time_to_recovery(flat, event, 0.75);
  c.expect(never.status == RecoveryStatus::NeverImpaired && never.recovery_minutes == 0,
           "flat series flagged as impaired");

  auto dead = series;
  for (int64_t m = start + 60; m <= start + 4 * 60 + 300; m += 60) dead[m] = 1.0;
  auto lost = time_to_recovery(dead, event, 0.75);
  c.expect(lost.status == RecoveryStatus::NotRecovered && lost.recovery_minutes == -1,
           "collapsed series recovered");
  report(11, "time-to-recovery fixture returns 2 minutes with both sentinels", c.ok, c.detail);
}

// ---- 12: Q-score properties --------------------------------------------------

void criterion_q_properties() {
  Check c;
  QWeights alt = QWeights::altcoins();
  c.expect(q_final({"a", 5.0, 0.0, 7.0}, alt) == 0.0, "zero uptime kept a score");
  c.expect(q_final({"a", 1.0, 1.0, 1.0}, alt) == 1.0, "identity inputs moved off 1");

  std::mt19937 rng(12);
  std::uniform_real_distribution<double> pos(0.5, 2e6);
  std::vector<LpEpochSample> lps;
  for (int i = 0; i < 9; ++i)
    lps.push_back({"lp" + std::to_string(i), pos(rng), 0.25 * (1 + i % 4), pos(rng)});

  auto shares = reward_shares(lps, alt, 100.0);
  double sum = 0;
  for (const auto& [account, share] : shares) sum += share.share;
  c.expect(std::abs(sum - 1.0) <= 1e-9, "shares sum to " + std::to_string(sum));

  // linear-volume equivalence, exact
  auto linear = reward_shares(lps, QWeights::linear_volume(), 100.0);
  double volume_total = 0;
  for (const auto& lp : lps) volume_total += lp.maker_volume;
  for (const auto& lp : lps)
    c.expect(linear.at(lp.account).share == lp.maker_volume / volume_total,
             lp.account + " share is not its volume proportion");

  // scaling every depth score by 7 preserves the ranking
  std::vector<LpEpochSample> scaled = lps;
  for (auto& lp : scaled) lp.depth_spread_score *= 7.0;
  auto base_shares = reward_shares(lps, alt, 100.0);
  auto scaled_shares = reward_shares(scaled, alt, 100.0);
  auto rank = [](const std::map<std::string, RewardShare>& m) {
    std::vector<std::string> order;
    for (const auto& [account, share] : m) order.push_back(account);
    std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
      return m.at(x).share > m.at(y).share;
    });
    return order;
  };
  c.expect(rank(base_shares) == rank(scaled_shares), "ranking changed under uniform scaling");
  report(12, "Q-score identities, share normalization and scale invariance", c.ok, c.detail);
}

// ---- 13: CLI determinism ------------------------------------------------------

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> contents;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      contents[fs::relative(entry.path(), dir).string()] = read_file_auto(entry.path());
  return contents;
}

void criterion_determinism() {
  Check c;
  fs::path base = fs::temp_directory_path() / "spreadlab_acceptance";
  fs::remove_all(base);
  auto out1 = base / "run1";
  auto out2 = base / "run2";
  auto quoted = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  std::string common = quoted(kCli) + " report --books " + quoted(kData / "synthetic/books.jsonl") +
                       " --trades " + quoted(kData / "synthetic/trades.csv") + " --markets " +
                       quoted(kData / "synthetic/markets.csv") + " --events " +
                       quoted(kData / "synthetic/events.toml");
  std::string run1 = common + " --out " + quoted(out1) + " --jobs 1 > /dev/null 2>&1";
  std::string run2 = common + " --out " + quoted(out2) + " --jobs 4 > /dev/null 2>&1";
  c.expect(std::system(run1.c_str()) == 0, "run 1 failed");
  c.expect(std::system(run2.c_str()) == 0, "run 2 failed");
  if (c.ok) {
    auto a = read_dir(out1);
    auto b = read_dir(out2);
    c.expect(a.size() == b.size() && !a.empty(), "file sets differ");
    for (const auto& [name, content] : a) {
      auto it = b.find(name);
      c.expect(it != b.end() && it->second == content, name + " differs between runs");
      if (!c.ok) break;
    }
  }
  report(13, "pipeline output is byte-identical across parallelism", c.ok, c.detail);
}

}  // namespace

int main() {
  auto started = std::chrono::steady_clock::now();
  criterion_tick_table();
  criterion_trade_notionals();
  criterion_rebates();
  criterion_tier_sums();
  criterion_dmm();
  criterion_crossover();
  criterion_reconstruction();
  criterion_monotonicity();
  criterion_adf();
  criterion_sweep_oracle();
  criterion_recovery();
  criterion_q_properties();
  criterion_determinism();
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::printf("%d/13 criteria passed in %.1fs\n", 13 - failures, elapsed);
  return failures == 0 ? 0 : 1;
}
