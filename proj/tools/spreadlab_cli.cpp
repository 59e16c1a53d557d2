// spreadlab command-line front end: batch liquidity analytics over
// file-based market datasets. Subcommands mirror the library modules;
// every run is reproducible from its inputs alone.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "spreadlab/pipeline.hpp"
#include "spreadlab/rewards.hpp"
#include "spreadlab/toml_lite.hpp"

namespace {

using namespace spreadlab;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct CliOptions {
  RunConfig run;
  std::string config_path;
  std::string from_date, to_date;
  std::vector<int> spreads;
  std::vector<int> brackets;
  std::string format = "csv";
  bool draft_mode = false;
  bool zero_fill = false;
  bool exclude_liquidations = false;
  bool round_nearest = false;
  bool condition2_mean_vs_mean = false;
};

/// Config file mirrors the flags; explicitly passed flags win.
void apply_config_file(CliOptions& opt) {
  if (opt.config_path.empty()) return;
  auto doc = parse_toml(read_file_auto(opt.config_path));
  auto str = [&](const char* key, std::filesystem::path& into) {
    if (doc.contains(key) && into.empty()) into = doc.at(key).as_string();
  };
  str("books", opt.run.books_path);
  str("trades", opt.run.trades_path);
  str("markets", opt.run.markets_path);
  str("events", opt.run.events_path);
  if (doc.contains("out") && opt.run.out_dir == "out")
    opt.run.out_dir = doc.at("out").as_string();
  if (doc.contains("format") && opt.format == "csv") opt.format = doc.at("format").as_string();
  if (doc.contains("jobs") && opt.run.jobs == 0)
    opt.run.jobs = static_cast<int>(doc.at("jobs").as_int());
  if (doc.contains("spreads") && opt.spreads.empty())
    for (const auto& v : doc.at("spreads").as_array())
      opt.spreads.push_back(static_cast<int>(v.as_int()));
  if (doc.contains("brackets") && opt.brackets.empty())
    for (const auto& v : doc.at("brackets").as_array())
      opt.brackets.push_back(static_cast<int>(v.as_int()));
  if (doc.contains("from") && opt.from_date.empty()) opt.from_date = doc.at("from").as_string();
  if (doc.contains("to") && opt.to_date.empty()) opt.to_date = doc.at("to").as_string();
  if (doc.contains("draftMode")) opt.draft_mode = opt.draft_mode || doc.at("draftMode").as_bool();
  if (doc.contains("zeroFill")) opt.zero_fill = opt.zero_fill || doc.at("zeroFill").as_bool();
  if (doc.contains("excludeLiquidations"))
    opt.exclude_liquidations = opt.exclude_liquidations || doc.at("excludeLiquidations").as_bool();
  if (doc.contains("roundNearest"))
    opt.round_nearest = opt.round_nearest || doc.at("roundNearest").as_bool();
  if (doc.contains("markets_filter"))
    for (const auto& v : doc.at("markets_filter").as_array())
      opt.run.market_filter.push_back(v.as_string());
}

RunConfig finalize(CliOptions& opt) {
  apply_config_file(opt);
  RunConfig cfg = opt.run;
  if (!opt.spreads.empty()) cfg.calib.spreads_bps = opt.spreads;
  if (!opt.brackets.empty()) cfg.calib.brackets = opt.brackets;
  if (!opt.from_date.empty()) cfg.from_day = parse_day(opt.from_date);
  if (!opt.to_date.empty()) cfg.to_day = parse_day(opt.to_date);
  if (cfg.from_day && cfg.to_day && *cfg.from_day > *cfg.to_day)
    throw ValidationError("--from is after --to");
  cfg.format = opt.format == "json" ? ReportFormat::Json : ReportFormat::Csv;
  cfg.calib.draft_mode = opt.draft_mode;
  cfg.calib.zero_fill = opt.zero_fill;
  cfg.calib.include_liquidations = !opt.exclude_liquidations;
  cfg.calib.rounding = opt.round_nearest ? MinuteRounding::Nearest : MinuteRounding::Truncate;
  cfg.calib.condition2_mean_vs_mean = opt.condition2_mean_vs_mean;
  validate(cfg.calib);
  return cfg;
}

// Requiredness is checked after the config file merges in, not by the
// parser, so a --config file alone can satisfy a subcommand's inputs.
void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--books", opt.run.books_path, "order book snapshots (JSONL)");
  cmd->add_option("--trades", opt.run.trades_path, "trade tape (CSV)");
  cmd->add_option("--markets", opt.run.markets_path, "market specs (CSV)");
  cmd->add_option("--events", opt.run.events_path, "event windows (TOML/JSON)");
  cmd->add_option("--config", opt.config_path, "TOML config mirroring the flags");
  cmd->add_option("--out", opt.run.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--format", opt.format, "csv or json")->capture_default_str();
  cmd->add_option("--market", opt.run.market_filter, "restrict to these markets");
  cmd->add_option("--from", opt.from_date, "first UTC day, YYYY-MM-DD");
  cmd->add_option("--to", opt.to_date, "last UTC day, YYYY-MM-DD");
  cmd->add_option("--spreads", opt.spreads, "spread ladder in bps")->delimiter(',');
  cmd->add_option("--brackets", opt.brackets, "bracket ladder in bps")->delimiter(',');
  cmd->add_option("--jobs", opt.run.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--coverage", opt.run.calib.volume_coverage_fraction,
                  "volume fraction a side must cover")
      ->capture_default_str();
  cmd->add_option("--widen-threshold", opt.run.calib.insufficiency_threshold_widen,
                  "insufficiency share that forces a wider re-test")
      ->capture_default_str();
  cmd->add_option("--recovery-fraction", opt.run.calib.recovery_fraction,
                  "baseline fraction that counts as recovered")
      ->capture_default_str();
  cmd->add_option("--adf-significance", opt.run.calib.adf_significance,
                  "stationarity significance level (0.01/0.05/0.1)")
      ->capture_default_str();
  cmd->add_flag("--draft-mode", opt.draft_mode, "also enforce density/RLQ conditions");
  cmd->add_flag("--zero-fill", opt.zero_fill, "treat tradeless minutes as zero demand");
  cmd->add_flag("--exclude-liquidations", opt.exclude_liquidations,
                "drop liquidation trades from reconstruction");
  cmd->add_flag("--round-nearest", opt.round_nearest,
                "round trades to the nearest minute instead of truncating");
  cmd->add_flag("--c2-mean-vs-mean", opt.condition2_mean_vs_mean,
                "depth condition compares means instead of p95 demand");
  cmd->add_option("--recovery-series", opt.run.recovery_series,
                  "depth series for recovery: sum, bid or ask")
      ->capture_default_str();
}

void print_summary(const RunOutput& out) {
  for (const auto& line : out.summary_lines) std::cout << line << "\n";
  std::cout << out.files.size() << " file(s) written\n";
}

// ---- rewards helpers --------------------------------------------------

QWeights weights_from(double y, double z, bool linear) {
  if (linear) return QWeights::linear_volume();
  QWeights w;
  w.y = y;
  w.z = z;
  return w;
}

int run_rewards_qscore(const std::string& samples_path, double y, double z, bool linear) {
  auto samples = load_lp_samples(samples_path);
  QWeights w = weights_from(y, z, linear);
  ReportTable table;
  table.header = {"account", "q_final"};
  for (const auto& s : samples)
    table.rows.push_back({s.account, shortest_double(q_final(s, w))});
  std::fputs(to_csv(table).c_str(), stdout);
  return kExitOk;
}

int run_rewards_shares(const std::string& samples_path, double y, double z, bool linear,
                       double pool) {
  auto samples = load_lp_samples(samples_path);
  auto shares = reward_shares(samples, weights_from(y, z, linear), pool);
  ReportTable table;
  table.header = {"account", "q_final", "share", "tokens"};
  for (const auto& [account, share] : shares)
    table.rows.push_back({account, shortest_double(share.q), shortest_double(share.share),
                          shortest_double(share.tokens)});
  std::fputs(to_csv(table).c_str(), stdout);
  return kExitOk;
}

int run_rewards_rebates(const std::string& schedule_path, double volume, double share) {
  auto schedule = load_rebate_schedule(schedule_path);
  auto tier = assign_rebate_tier(share, schedule);
  ReportTable table;
  table.header = {"volume_usd", "volume_share", "tier", "rate", "rebate_usd"};
  if (tier) {
    Decimal rebate = rebate_value(Decimal::from_double(volume), Decimal::from_double(tier->rate));
    table.rows.push_back({shortest_double(volume), shortest_double(share), tier->label,
                          shortest_double(tier->rate), rebate.str()});
  } else {
    table.rows.push_back({shortest_double(volume), shortest_double(share), "none", "0", "0"});
  }
  std::fputs(to_csv(table).c_str(), stdout);
  return kExitOk;
}

int run_rewards_curve(std::vector<double> volumes, double rate_low, double rate_high,
                      double rewards_usd) {
  auto curve = rebates_vs_rewards_curve(volumes, rate_low, rate_high, rewards_usd);
  ReportTable table;
  table.header = {"volume", "rebate_low", "rebate_high", "rewards", "crossover_low",
                  "crossover_high"};
  for (const auto& row : curve.rows)
    table.rows.push_back({shortest_double(row.volume), shortest_double(row.rebate_low),
                          shortest_double(row.rebate_high), shortest_double(row.rewards),
                          shortest_double(curve.crossover_low),
                          shortest_double(curve.crossover_high)});
  std::fputs(to_csv(table).c_str(), stdout);
  return kExitOk;
}

int run_rewards_dmm(double daily_liquidity, int days, double rate, double penalty_fraction,
                    double reward_fraction) {
  Decimal stake = dmm_stake_requirement(Decimal::from_double(daily_liquidity), days,
                                        Decimal::from_double(rate));
  auto pr = dmm_penalty_reward(stake, Decimal::from_double(penalty_fraction),
                               Decimal::from_double(reward_fraction));
  ReportTable table;
  table.header = {"stake_requirement", "penalty", "reward"};
  table.rows.push_back({stake.str(), pr.penalty.str(), pr.reward.str()});
  std::fputs(to_csv(table).c_str(), stdout);
  return kExitOk;
}

int run_rewards_tiers(const std::string& fees_path, const std::string& tiers_path,
                      double pool_usd) {
  auto fees = load_fees(fees_path);
  auto doc = parse_toml(read_file_auto(tiers_path));
  std::map<std::string, std::vector<std::string>> tiers;
  std::map<std::string, double> allocation;
  if (!doc.contains("tier")) throw ParseError("tiers TOML needs [[tier]] entries");
  for (const auto& item : doc.at("tier").as_array()) {
    const auto& label = item.at("label").as_string();
    for (const auto& m : item.at("markets").as_array())
      tiers[label].push_back(m.as_string());
    if (item.contains("allocation")) allocation[label] = item.at("allocation").as_double();
  }
  if (doc.contains("pool") && pool_usd == 0) pool_usd = doc.at("pool").as_double();

  ReportTable table;
  table.header = {"tier", "fee_revenue", "allocation", "reward_usd", "missing_markets"};
  for (const auto& row : tier_allocation(fees, tiers, allocation, pool_usd)) {
    std::string missing;
    for (const auto& m : row.missing_markets) missing += (missing.empty() ? "" : ";") + m;
    table.rows.push_back({row.tier, row.fee_total.str(),
                          shortest_double(row.allocation_fraction),
                          shortest_double(row.reward_usd), missing});
  }
  std::fputs(to_csv(table).c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"order-book liquidity analytics and LP incentive evaluation"};
  app.require_subcommand(1);

  CliOptions opt;

  auto* metrics = app.add_subcommand("metrics", "depth grids and trade statistics");
  add_common_options(metrics, opt);

  auto* reconstruct = app.add_subcommand("reconstruct", "per-minute books from the tape");
  add_common_options(reconstruct, opt);

  auto* calibrate = app.add_subcommand("calibrate", "spread sweep and bracket table");
  add_common_options(calibrate, opt);

  auto* events = app.add_subcommand("events", "event-study profiles and recovery");
  add_common_options(events, opt);

  auto* report = app.add_subcommand("report", "full pipeline with manifest");
  add_common_options(report, opt);

  auto* rewards = app.add_subcommand("rewards", "incentive mechanism arithmetic");
  rewards->require_subcommand(1);

  std::string samples_path, schedule_path, fees_path, tiers_path;
  double y = 0.35, z = 0.65, pool = 0, volume = 0, share = 0;
  double rate_low = 0.0001, rate_high = 0.000179, rewards_usd = 0;
  double daily_liquidity = 0, dmm_rate = 0.0002, penalty_fraction = 0, reward_fraction = 0;
  int days = 28;
  bool linear = false;
  std::vector<double> volumes;

  auto* qscore = rewards->add_subcommand("qscore", "per-LP epoch Q scores");
  qscore->add_option("--samples", samples_path, "LP samples CSV")->required();
  qscore->add_option("--y", y, "depth-spread exponent")->capture_default_str();
  qscore->add_option("--z", z, "maker-volume exponent")->capture_default_str();
  qscore->add_flag("--linear", linear, "volume-only scoring");

  auto* shares = rewards->add_subcommand("shares", "pool split proportional to Q");
  shares->add_option("--samples", samples_path, "LP samples CSV")->required();
  shares->add_option("--pool", pool, "pool size in tokens")->required();
  shares->add_option("--y", y, "depth-spread exponent")->capture_default_str();
  shares->add_option("--z", z, "maker-volume exponent")->capture_default_str();
  shares->add_flag("--linear", linear, "volume-only scoring");

  auto* rebates = rewards->add_subcommand("rebates", "tier lookup and rebate value");
  rebates->add_option("--schedule", schedule_path, "rebate schedule TOML/JSON")->required();
  rebates->add_option("--volume", volume, "maker volume in USD")->required();
  rebates->add_option("--share", share, "maker volume share of exchange volume")->required();

  auto* curve = rewards->add_subcommand("curve", "rebates vs rewards crossover");
  curve->add_option("--volumes", volumes, "volume grid in USD")->delimiter(',')->required();
  curve->add_option("--rate-low", rate_low, "lower rebate rate")->capture_default_str();
  curve->add_option("--rate-high", rate_high, "upper rebate rate")->capture_default_str();
  curve->add_option("--rewards-usd", rewards_usd, "reward pool in USD")->required();

  auto* dmm = rewards->add_subcommand("dmm", "stake, penalty and reward arithmetic");
  dmm->add_option("--daily-liquidity", daily_liquidity, "average daily liquidity USD")->required();
  dmm->add_option("--days", days, "epoch length in days")->capture_default_str();
  dmm->add_option("--rate", dmm_rate, "stake requirement rate")->capture_default_str();
  dmm->add_option("--penalty-fraction", penalty_fraction, "penalty fraction of stake");
  dmm->add_option("--reward-fraction", reward_fraction, "reward fraction of stake");

  auto* tiers = rewards->add_subcommand("tiers", "per-tier fee totals and allocations");
  tiers->add_option("--fees", fees_path, "market,fees CSV")->required();
  tiers->add_option("--tiers", tiers_path, "tier definitions TOML")->required();
  tiers->add_option("--pool", pool, "reward pool USD (overrides the file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (metrics->parsed()) {
      RunConfig cfg = finalize(opt);
      print_summary(run_metrics(cfg, load_dataset(cfg, true, !cfg.trades_path.empty(), false)));
    } else if (reconstruct->parsed()) {
      RunConfig cfg = finalize(opt);
      print_summary(run_reconstruct(cfg, load_dataset(cfg, false, true, false)));
    } else if (calibrate->parsed()) {
      RunConfig cfg = finalize(opt);
      print_summary(run_calibrate(cfg, load_dataset(cfg, true, true, true)));
    } else if (events->parsed()) {
      RunConfig cfg = finalize(opt);
      print_summary(run_events(cfg, load_dataset(cfg, true, true, false)));
    } else if (report->parsed()) {
      RunConfig cfg = finalize(opt);
      print_summary(run_report(
          cfg, load_dataset(cfg, true, true, !cfg.markets_path.empty())));
    } else if (rewards->parsed()) {
      if (qscore->parsed()) return run_rewards_qscore(samples_path, y, z, linear);
      if (shares->parsed()) return run_rewards_shares(samples_path, y, z, linear, pool);
      if (rebates->parsed()) return run_rewards_rebates(schedule_path, volume, share);
      if (curve->parsed()) return run_rewards_curve(volumes, rate_low, rate_high, rewards_usd);
      if (dmm->parsed())
        return run_rewards_dmm(daily_liquidity, days, dmm_rate, penalty_fraction,
                               reward_fraction);
      if (tiers->parsed()) return run_rewards_tiers(fees_path, tiers_path, pool);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
