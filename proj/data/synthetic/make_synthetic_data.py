#!/usr/bin/env python3
"""Regenerates the bundled synthetic dataset.

Two fictional markets, four hours of minute snapshots, a trade tape with a
liquidity shock in the middle, and one event window covering the shock.
Everything is seeded, so the committed files are reproducible:

    python3 make_synthetic_data.py
"""
import random

BASE_TS = 1683806400  # 2023-05-11T12:00:00Z
MINUTES = 240
SHOCK_START = BASE_TS + 90 * 60
SHOCK_END = BASE_TS + 110 * 60

MARKETS = {
    "AAA-USD": {"mid0": 100.0, "tick": 0.01, "dp": 2, "size_dp": 2, "base_size": 120.0},
    "BBB-USD": {"mid0": 25000.0, "tick": 0.5, "dp": 1, "size_dp": 4, "base_size": 0.4},
}


def fmt(x, dp):
    return f"{x:.{dp}f}"


def iso(ts):
    import datetime

    return (
        datetime.datetime.fromtimestamp(ts, datetime.timezone.utc)
        .strftime("%Y-%m-%dT%H:%M:%SZ")
    )


def main():
    rng = random.Random(20230511)
    books = []
    trades = []
    for market, p in MARKETS.items():
        mid = p["mid0"]
        for i in range(MINUTES):
            ts = BASE_TS + i * 60
            mid += rng.uniform(-3, 3) * p["tick"]
            in_shock = SHOCK_START <= ts < SHOCK_END
            damp = 0.25 if in_shock else 1.0
            bids, asks = [], []
            for lvl in range(1, 9):
                dist = lvl * lvl * p["tick"]
                size = p["base_size"] * damp * rng.uniform(0.5, 1.5) * lvl
                bids.append([fmt(mid - dist, p["dp"]), fmt(size, p["size_dp"])])
                asks.append([fmt(mid + dist, p["dp"]), fmt(size, p["size_dp"])])
            row = (
                '{"ts":"%s","market":"%s","bids":[%s],"asks":[%s]}'
                % (
                    iso(ts),
                    market,
                    ",".join('["%s","%s"]' % (b[0], b[1]) for b in bids),
                    ",".join('["%s","%s"]' % (a[0], a[1]) for a in asks),
                )
            )
            books.append(row)

            n_trades = rng.randint(0, 4) + (3 if in_shock else 0)
            for _ in range(n_trades):
                side = "BUY" if rng.random() < 0.5 else "SELL"
                burst = 6.0 if in_shock and rng.random() < 0.3 else 1.0
                size = p["base_size"] * burst * rng.uniform(0.05, 0.6)
                price = mid + (1 if side == "BUY" else -1) * p["tick"] * rng.randint(1, 4)
                sec = rng.randint(0, 59)
                trades.append(
                    (
                        ts + sec,
                        "%s,%s,%s,%s,False,%s"
                        % (
                            side,
                            fmt(size, p["size_dp"]),
                            fmt(price, p["dp"]),
                            iso(ts + sec).replace("Z", ".000Z"),
                            market,
                        ),
                    )
                )

    with open("books.jsonl", "w") as f:
        f.write("\n".join(books) + "\n")
    trades.sort(key=lambda t: t[0])
    with open("trades.csv", "w") as f:
        f.write("side,size,price,createdAt,liquidation,market\n")
        f.write("\n".join(row for _, row in trades) + "\n")
    with open("markets.csv", "w") as f:
        f.write("market,tickSize,indexPrice,bracketBps\n")
        f.write("AAA-USD,0.01,100.0,40\n")
        f.write("BBB-USD,0.5,25000.0,20\n")
    with open("events.toml", "w") as f:
        f.write('[[event]]\nname = "synthetic shock"\n')
        f.write(f"start = {SHOCK_START}\nend = {SHOCK_END}\n")
    print(f"{len(books)} snapshots, {len(trades)} trades")


if __name__ == "__main__":
    main()
