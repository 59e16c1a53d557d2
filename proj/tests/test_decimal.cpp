#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spreadlab/decimal.hpp"

using spreadlab::Decimal;
using spreadlab::DecimalError;

TEST_CASE("decimal parses and prints canonically") {
  CHECK(Decimal::parse("27000").str() == "27000");
  CHECK(Decimal::parse("0.10").str() == "0.1");
  CHECK(Decimal::parse("-3.1400").str() == "-3.14");
  CHECK(Decimal::parse("000.5").str() == "0.5");
  CHECK(Decimal::parse("1e3").str() == "1000");
  CHECK(Decimal::parse("2.5e-3").str() == "0.0025");
  CHECK(Decimal::parse("+7").str() == "7");
  CHECK(Decimal::parse("0.000").str() == "0");
  CHECK(Decimal::parse("-0").str() == "0");
}

TEST_CASE("decimal rejects malformed literals") {
  CHECK_THROWS_AS(Decimal::parse(""), DecimalError);
  CHECK_THROWS_AS(Decimal::parse("."), DecimalError);
  CHECK_THROWS_AS(Decimal::parse("1.2.3"), DecimalError);
  CHECK_THROWS_AS(Decimal::parse("abc"), DecimalError);
  CHECK_THROWS_AS(Decimal::parse("1e"), DecimalError);
  CHECK_THROWS_AS(Decimal::parse("--1"), DecimalError);
}

TEST_CASE("products are exact") {
  // trade notionals that must not pick up binary-float dust
  CHECK((Decimal::parse("14087.6") * Decimal::parse("20.054")).str() == "282512.7304");
  CHECK((Decimal::parse("10486.5") * Decimal::parse("20.054")).str() == "210296.271");
  CHECK((Decimal::parse("29260.0") * Decimal::parse("20.059")).str() == "586926.34");
  CHECK((Decimal::parse("19506.7") * Decimal::parse("20.045")).str() == "391011.8015");
  CHECK((Decimal::parse("5428.0") * Decimal::parse("19.97")).str() == "108397.16");
}

TEST_CASE("sums and differences align exponents exactly") {
  CHECK((Decimal::parse("282512.7304") + Decimal::parse("210296.271")).str() == "492809.0014");
  CHECK((Decimal::parse("1") - Decimal::parse("0.9999999999")).str() == "0.0000000001");
  Decimal acc;
  for (int i = 0; i < 1000; ++i) acc += Decimal::parse("0.1");
  CHECK(acc.str() == "100");
}

TEST_CASE("half is exact for any decimal") {
  CHECK(Decimal::parse("199.99").half().str() == "99.995");
  CHECK((Decimal::parse("27000") + Decimal::parse("27010")).half().str() == "27005");
  CHECK(Decimal::parse("0.01").half().str() == "0.005");
}

TEST_CASE("floor_div and round_div") {
  CHECK(Decimal::parse("0.10").floor_div(Decimal::parse("0.01")) == 10);
  CHECK(Decimal::parse("0.099").floor_div(Decimal::parse("0.01")) == 9);
  CHECK(Decimal::parse("-0.01").floor_div(Decimal::parse("0.02")) == -1);
  CHECK(Decimal::parse("0.05").round_div(Decimal::parse("0.02")) == 3);   // 2.5 -> away from zero
  CHECK(Decimal::parse("-0.05").round_div(Decimal::parse("0.02")) == -3);
  CHECK(Decimal::parse("0.049").round_div(Decimal::parse("0.02")) == 2);
  CHECK_THROWS_AS(Decimal::parse("1").floor_div(Decimal()), DecimalError);
}

TEST_CASE("comparisons are value-based, not representation-based") {
  CHECK(Decimal::parse("1.50") == Decimal::parse("1.5"));
  CHECK(Decimal::parse("99.95") < Decimal::parse("100"));
  CHECK(Decimal::parse("-2") < Decimal::parse("0.1"));
  CHECK(Decimal::parse("100.00") >= Decimal::parse("100"));
}

TEST_CASE("from_double recovers shortest literals") {
  CHECK(Decimal::from_double(20.054).str() == "20.054");
  CHECK(Decimal::from_double(0.1).str() == "0.1");
  CHECK(Decimal::from_double(27369.0).str() == "27369");
  CHECK(Decimal::from_double(1e-7).str() == "0.0000001");
}

TEST_CASE("shifted scales by powers of ten") {
  CHECK(Decimal::parse("10").shifted(-4).str() == "0.001");
  CHECK(Decimal::parse("0.5").shifted(2).str() == "50");
}

TEST_CASE("overflow is detected, not wrapped") {
  Decimal big = Decimal::parse("99999999999999999999999999999999999999");  // 38 nines
  CHECK_THROWS_AS(big * big, DecimalError);
}

TEST_CASE("parse/str round trip holds on random fixed-point literals") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long long> mant(-1'000'000'000'000LL, 1'000'000'000'000LL);
  std::uniform_int_distribution<int> frac(0, 10);
  for (int i = 0; i < 2000; ++i) {
    long long m = mant(rng);
    int f = frac(rng);
    std::string digits = std::to_string(m < 0 ? -m : m);
    while (static_cast<int>(digits.size()) <= f) digits.insert(0, 1, '0');
    std::string text = (m < 0 ? "-" : "") + digits;
    if (f > 0) text.insert(text.size() - f, ".");
    Decimal d = Decimal::parse(text);
    CHECK(Decimal::parse(d.str()) == d);
    CHECK(d.str() == Decimal::parse(d.str()).str());
  }
}
