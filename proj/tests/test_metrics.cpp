#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "oracles.hpp"
#include "phida/metrics.hpp"
#include "phida/synthetic.hpp"

using namespace phida;

TEST_CASE("ari examples") {
  const std::vector<long> a{0, 0, 1, 1, 2, 2};
  CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0));
  const std::vector<long> renamed{7, 7, 3, 3, 9, 9};
  CHECK(adjusted_rand_index(a, renamed) == doctest::Approx(1.0));
  const std::vector<long> t{1, 1, 2, 2};
  const std::vector<long> p{1, 2, 1, 2};
  CHECK(adjusted_rand_index(t, p) == doctest::Approx(oracle::pair_ari(t, p)));
  CHECK(adjusted_rand_index(t, p) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(adjusted_rand_index(t, std::vector<long>{1}), std::invalid_argument);
}

TEST_CASE("ami examples") {
  const std::vector<long> a{0, 0, 1, 1, 2, 2};
  CHECK(adjusted_mutual_information(a, a) == doctest::Approx(1.0));
  const std::vector<long> one(6, 4);
  CHECK(adjusted_mutual_information(a, one) == doctest::Approx(0.0));
  CHECK(adjusted_mutual_information(one, one) == 1.0);
  const std::vector<long> b{0, 1, 1, 0, 2, 2};
  CHECK(adjusted_mutual_information(a, b) == doctest::Approx(adjusted_mutual_information(b, a)));
}

TEST_CASE("mutual information and entropy") {
  const std::vector<long> a{0, 0, 1, 1};
  CHECK(entropy(a) == doctest::Approx(std::log(2.0)));
  CHECK(mutual_information(a, a) == doctest::Approx(std::log(2.0)));
  const std::vector<long> b{0, 1, 0, 1};
  CHECK(mutual_information(a, b) == doctest::Approx(0.0));
}

TEST_CASE("ari and ami agree with pair-enumeration and permutation oracles") {
  SplitMix64 rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<long> a(n), b(n);
    const std::size_t ka = 1 + rng.below(n);
    const std::size_t kb = 1 + rng.below(n);
    for (auto& x : a) x = static_cast<long>(rng.below(ka));
    for (auto& x : b) x = static_cast<long>(rng.below(kb));
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(oracle::pair_ari(a, b)).epsilon(1e-9));
    CHECK(expected_mutual_information(a, b) ==
          doctest::Approx(oracle::permutation_emi(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("avg inc") {
  CHECK(avg_inc(std::vector<double>{0.7}) == doctest::Approx(0.7));
  CHECK(avg_inc(std::vector<double>{0.5, 1.0}) == doctest::Approx(0.75));
  CHECK(avg_inc(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK_THROWS(avg_inc(std::vector<double>{}));
}

TEST_CASE("backward transfer") {
  StageScoreMatrix same{{0.5, 0.5}, {std::nullopt, 0.9}};
  CHECK(backward_transfer(same) == 0.0);
  StageScoreMatrix two{{0.8, 0.6}, {std::nullopt, 0.4}};
  CHECK(backward_transfer(two) == doctest::Approx(-0.2));
  StageScoreMatrix three{{0.9, 0.5, 0.8}, {std::nullopt, 0.4, 0.7}, {std::nullopt, std::nullopt, 1.0}};
  CHECK(backward_transfer(three) == doctest::Approx(0.1));
  StageScoreMatrix hole{{0.9, std::nullopt}, {std::nullopt, 0.4}};
  CHECK_THROWS(backward_transfer(hole));
  CHECK_THROWS(backward_transfer(StageScoreMatrix{{1.0}}));
}
