#include "amlgen/taint.hpp"

#include "amlgen/money.hpp"
#include "amlgen/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace amlgen;
using fixtures::make_account;

namespace {

constexpr CurrencyId kUsd = 0;

}  // namespace

TEST_CASE("deposit tracks the illicit share") {
  Account a = make_account(0, 0, 0, kUsd, 0);
  deposit(a, kUsd, 100, 100);
  CHECK(illicit_fraction(a, kUsd) == 1.0);
  deposit(a, kUsd, 100, 0);
  CHECK(a.illicit[kUsd] == 100);
  CHECK(a.balances[kUsd] == 200);
  CHECK(illicit_fraction(a, kUsd) == 0.5);
  CHECK_THROWS_AS(deposit(a, kUsd, 100, 150), LedgerError);
  CHECK_THROWS_AS(deposit(a, kUsd, -1, 0), LedgerError);
  CHECK(a.balances[kUsd] == 200);
}

TEST_CASE("withdraw modes") {
  Account a = make_account(0, 0, 0, kUsd, 100, 0);
  deposit(a, kUsd, 100, 100);
  Account b = a;
  const auto pro = withdraw(a, kUsd, 50, DrawMode::ProRata);
  CHECK(pro.illicit == 25);
  CHECK(pro.clean == 25);
  CHECK(a.illicit[kUsd] == 75);
  const auto first = withdraw(b, kUsd, 50, DrawMode::IllicitFirst);
  CHECK(first.illicit == 50);
  CHECK(b.illicit[kUsd] == 50);
  CHECK(b.balances[kUsd] == 150);
  CHECK_THROWS_AS(withdraw(b, kUsd, 151, DrawMode::ProRata), LedgerError);
}

TEST_CASE("pro rata rounding is half-even and clamped") {
  CHECK(pro_rata_illicit(1, 2, 1) == 0);  // 0.5 -> 0
  CHECK(pro_rata_illicit(3, 2, 1) == 1);  // amount > balance clamps to illicit
  CHECK(pro_rata_illicit(3, 6, 3) == 2);  // 1.5 -> 2
  CHECK(pro_rata_illicit(10, 10, 3) == 3);
  CHECK(pro_rata_illicit(9, 10, 3) == 3);  // 2.7 -> 3
  CHECK(pro_rata_illicit(9, 10, 9) == 8);  // 8.1 -> 8, clean 1 still covers the rest
}

TEST_CASE("labels follow the threshold rule") {
  CHECK(label(25, 25, std::nullopt, 0.5));
  CHECK_FALSE(label(0, 100, std::nullopt, 0.5));
  CHECK(label(0, 100, PatternId{7}, 0.5));
  CHECK(label(50, 100, std::nullopt, 0.5));
  CHECK_FALSE(label(49, 100, std::nullopt, 0.5));
  CHECK_FALSE(label(10, 100, std::nullopt, 0.5));
}

TEST_CASE("three hop transitive chain") {
  Account A = make_account(0, 0, 0, kUsd, 0);
  Account B = make_account(1, 1, 0, kUsd, 500);  // clean savings co-mingled
  Account C = make_account(2, 2, 0, kUsd, 0);
  Account D = make_account(3, 3, 0, kUsd, 0);
  deposit(A, kUsd, 10000, 10000);

  auto hop = [](Account& from, Account& to, Amount amount) {
    const auto w = withdraw(from, kUsd, amount, DrawMode::IllicitFirst);
    deposit(to, kUsd, amount, w.illicit);
    return label(w.illicit, amount, std::nullopt, 0.5);
  };
  CHECK(hop(A, B, 10000));
  CHECK(hop(B, C, 5000));
  CHECK(hop(C, D, 2500));
  CHECK(D.illicit[kUsd] == 2500);
  CHECK(C.illicit[kUsd] == 2500);
  CHECK(B.illicit[kUsd] == 5000);
}

TEST_CASE("illicit-first chains label every hop") {
  const auto usd = *find_currency("US Dollar");
  const auto eur = *find_currency("Euro");
  const auto yen = *find_currency("Yen");
  const auto btc = *find_currency("Bitcoin");
  const std::vector<CurrencyId> cur{usd, eur, yen, btc};
  ExchangeRates rates({{usd, 1.0}, {eur, 0.92}, {yen, 145.0}, {btc, 0.000017}});
  RandomStream rng = rng_stream(2024, "chains", 0);

  int hops = 0;
  int labeled = 0;
  for (int chain = 0; chain < 1000; ++chain) {
    const int length = static_cast<int>(rng.uniform_int(1, 5));
    std::vector<Account> accts;
    for (int i = 0; i <= length; ++i) {
      const CurrencyId c = cur[static_cast<std::size_t>(rng.uniform_int(0, 3))];
      const Amount clean = rng.bernoulli(0.5) ? rng.uniform_int(0, 10'000'000) : 0;
      accts.push_back(make_account(static_cast<AccountIndex>(i), i, 0, c, clean));
    }
    const Amount placed = rng.uniform_int(100, 50'000'000);
    deposit(accts[0], accts[0].currency, placed, placed);
    for (int i = 0; i < length; ++i) {
      Account& from = accts[static_cast<std::size_t>(i)];
      Account& to = accts[static_cast<std::size_t>(i) + 1];
      const Amount illicit = from.illicit[from.currency];
      if (illicit < 2) break;
      const Amount amount = rng.uniform_int(1, illicit);
      const auto w = withdraw(from, from.currency, amount, DrawMode::IllicitFirst);
      const Amount received = rates.convert(amount, from.currency, to.currency);
      if (received <= 0) break;
      deposit(to, to.currency, received, convert_illicit(w.illicit, amount, received));
      ++hops;
      if (label(w.illicit, amount, std::nullopt, 0.5)) ++labeled;
      CHECK(to.illicit[to.currency] <= to.balances[to.currency]);
    }
  }
  CHECK(hops > 1500);
  CHECK(labeled == hops);
}

TEST_CASE("same-currency pro rata transfers conserve illicit totals") {
  RandomStream rng = rng_stream(5, "conserve", 0);
  std::vector<Account> accts;
  for (AccountIndex i = 0; i < 20; ++i) accts.push_back(make_account(i, i, 0, kUsd, rng.uniform_int(0, 1'000'000)));
  Amount injected = 0;
  for (int i = 0; i < 5; ++i) {
    const Amount x = rng.uniform_int(1, 500'000);
    deposit(accts[static_cast<std::size_t>(i)], kUsd, x, x);
    injected += x;
  }
  for (int t = 0; t < 20000; ++t) {
    auto& from = accts[static_cast<std::size_t>(rng.uniform_int(0, 19))];
    auto& to = accts[static_cast<std::size_t>(rng.uniform_int(0, 19))];
    if (&from == &to || from.balances[kUsd] == 0) continue;
    const Amount amount = rng.uniform_int(1, from.balances[kUsd]);
    const auto w = withdraw(from, kUsd, amount, rng.bernoulli(0.5) ? DrawMode::ProRata : DrawMode::IllicitFirst);
    CHECK(w.clean + w.illicit == amount);
    deposit(to, kUsd, amount, w.illicit);
  }
  Amount total = 0;
  for (const auto& a : accts) {
    CHECK(a.illicit[kUsd] <= a.balances[kUsd]);
    CHECK(a.illicit[kUsd] >= 0);
    total += a.illicit[kUsd];
  }
  CHECK(total == injected);
}

TEST_CASE("illicit share survives currency conversion") {
  CHECK(convert_illicit(100, 100, 9200) == 9200);
  CHECK(convert_illicit(150, 100, 9200) == 9200);
  CHECK(convert_illicit(50, 100, 9200) == 4600);
  CHECK(convert_illicit(0, 100, 9200) == 0);
  CHECK(convert_illicit(1, 3, 2) == 1);  // 0.667 -> 1
  CHECK(convert_illicit(1, 4, 2) == 0);  // 0.5 -> 0 (even)
}
