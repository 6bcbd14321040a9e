#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "civicpb/errors.hpp"
#include "civicpb/legitimacy.hpp"
#include "synthetic.hpp"

using namespace civicpb;

namespace {

// Direct evaluation: sort descending, sum the first k, divide by the mean.
double brute_force(std::vector<double> counts, std::size_t k) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  double top = 0.0, all = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i < k) top += counts[i];
    all += counts[i];
  }
  return top / (all / static_cast<double>(counts.size()));
}

// Perpendicular distance of every normalized point to the chord, argmax.
std::size_t chord_oracle(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  const double lo = *std::min_element(y.begin(), y.end());
  const double hi = *std::max_element(y.begin(), y.end());
  double best = -1.0;
  std::size_t arg = 1;
  const double x1 = 0.0, y1 = (y.front() - lo) / (hi - lo), x2 = 1.0, y2 = (y.back() - lo) / (hi - lo);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x0 = static_cast<double>(i) / (n - 1.0);
    const double y0 = (y[i] - lo) / (hi - lo);
    const double d = std::abs((y2 - y1) * x0 - (x2 - x1) * y0 + x2 * y1 - y2 * x1) / std::hypot(x2 - x1, y2 - y1);
    if (d > best + 1e-12) {
      best = d;
      arg = i + 1;
    }
  }
  return arg;
}

CountTable table(std::vector<std::pair<std::string, std::uint64_t>> entries) {
  CountTable t;
  t.scope = "fixture";
  for (auto& [l, c] : entries) t.entries.push_back({l, c});
  return t;
}

}  // namespace

TEST_CASE("legitimacy hand values") {
  std::vector<double> uniform{10, 10, 10, 10};
  CHECK(legitimacy(uniform, 1) == 1.0);
  CHECK(legitimacy(uniform, 4) == 4.0);
  std::vector<double> c{60, 30, 10};
  CHECK(legitimacy(c, 1) == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(legitimacy(c, 2) == doctest::Approx(2.7).epsilon(1e-14));
  // order of the input does not matter
  std::vector<double> shuffled{10, 60, 30};
  CHECK(legitimacy(shuffled, 1) == legitimacy(c, 1));
}

TEST_CASE("legitimacy rejects invalid input") {
  std::vector<double> c{1, 2, 3};
  CHECK_THROWS_AS(legitimacy(c, 0), DataError);
  CHECK_THROWS_AS(legitimacy(c, 4), DataError);
  std::vector<double> zeros{0, 0};
  CHECK_THROWS_AS(legitimacy(zeros, 1), DataError);
  std::vector<double> empty;
  CHECK_THROWS_AS(legitimacy(empty, 1), DataError);
}

TEST_CASE("L(n) = n for any nonempty table") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + gen() % 8;
    std::vector<double> c(n);
    for (auto& v : c) v = static_cast<double>(gen() % 101);
    c[0] += 1;
    CHECK(legitimacy(c, n) == static_cast<double>(n));
  }
}

TEST_CASE("legitimacy matches brute force") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 500; ++t) {
    std::size_t n = 1 + gen() % 8;
    std::vector<double> c(n);
    for (auto& v : c) v = static_cast<double>(gen() % 101);
    if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0; })) c[0] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
      const double want = brute_force(c, k);
      CHECK(std::abs(legitimacy(c, k) - want) <= 1e-12 * std::abs(want));
    }
  }
}

TEST_CASE("curve values") {
  std::vector<double> c{60, 30, 10};
  auto curve = legitimacy_curve(c);
  REQUIRE(curve.size() == 3);
  CHECK(curve.share[0] == doctest::Approx(0.6));
  CHECK(curve.share[1] == doctest::Approx(0.9));
  CHECK(curve.share[2] == 1.0);
  CHECK(curve.gain[0] == curve.legitimacy[0]);
  CHECK(curve.gain[1] == doctest::Approx(0.9));

  std::vector<double> u(5, 7.0);
  auto flat = legitimacy_curve(u);
  for (std::size_t k = 1; k <= 5; ++k) {
    CHECK(flat.legitimacy[k - 1] == static_cast<double>(k));
    CHECK(flat.share[k - 1] == static_cast<double>(k) / 5.0);
  }

  std::vector<double> decisive{100, 0, 0};
  auto d = legitimacy_curve(decisive);
  CHECK(d.share == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(d.gain[1] == 0.0);
  CHECK(d.gain[2] == 0.0);

  std::vector<double> one{5};
  CHECK_THROWS_AS(legitimacy_curve(one), DataError);
}

TEST_CASE("knee rule") {
  std::vector<double> linear{1, 2, 3, 4, 5};
  CHECK(knee_index(linear) == 1);

  std::vector<double> concave{3.0, 3.6, 3.9, 4.0, 4.05};
  // Chord-distance oracle puts the knee at 3 for this series.
  CHECK(chord_oracle(concave) == 3);
  CHECK(knee_index(concave) == chord_oracle(concave));

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 2 + gen() % 10;
    std::vector<double> y(n);
    double acc = 0.0;
    for (auto& v : y) v = acc += u(gen) * 10.0;
    CHECK(knee_index(y) == chord_oracle(y));
  }
}

TEST_CASE("knee is invariant under affine rescaling of either axis") {
  std::vector<double> y{3.0, 3.6, 3.9, 4.0, 4.05};
  std::vector<double> scaled;
  for (double v : y) scaled.push_back(250.0 * v - 17.0);
  CHECK(knee_index(scaled) == knee_index(y));
}

TEST_CASE("optimal_k and decay rate") {
  std::vector<double> c{60, 30, 10};
  auto curve = legitimacy_curve(c);
  auto knee = optimal_k(curve);
  CHECK(knee.method == kKneeMethod);
  CHECK(knee.optimal_k == knee_index(curve.legitimacy));
  double sum = 0.0;
  for (std::size_t k = knee.optimal_k + 1; k <= curve.size(); ++k) sum += curve.gain[k - 1];
  const double want = knee.optimal_k == curve.size() ? 0.0 : sum / static_cast<double>(curve.size() - knee.optimal_k);
  CHECK(knee.decay_rate == doctest::Approx(want));

  std::vector<double> u(6, 3.0);
  CHECK(optimal_k(legitimacy_curve(u)).optimal_k == 1);
}

TEST_CASE("scale invariance") {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 2 + gen() % 7;
    std::vector<double> c(n);
    for (auto& v : c) v = static_cast<double>(1 + gen() % 100);
    for (double factor : {3.0, 0.37, 1e4}) {
      std::vector<double> s;
      for (double v : c) s.push_back(v * factor);
      auto a = legitimacy_curve(c);
      auto b = legitimacy_curve(s);
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(a.legitimacy[k] - b.legitimacy[k]) <= 1e-12 * a.legitimacy[k]);
        CHECK(std::abs(a.share[k] - b.share[k]) <= 1e-12 * a.share[k]);
      }
      CHECK(optimal_k(a).optimal_k == optimal_k(b).optimal_k);
    }
  }
}

TEST_CASE("legitimacy map") {
  SUBCASE("planted peak is listed first") {
    auto m = legitimacy_map(table({{"parks", 40}, {"parking", 5}, {"greening", 4}, {"playgrounds", 3}, {"security", 2}}));
    REQUIRE(m.has_demand);
    REQUIRE_FALSE(m.items.empty());
    CHECK(m.items.front().label == "parks");
    CHECK(m.items.size() == m.knee.optimal_k);
    CHECK(m.items.front().share_gain == doctest::Approx(40.0 / 54.0));
  }
  SUBCASE("single item") {
    auto m = legitimacy_map(table({{"parks", 3}}));
    CHECK(m.has_demand);
    CHECK(m.knee.optimal_k == 1);
    CHECK(m.items.size() == 1);
    CHECK_FALSE(m.curve.has_value());
  }
  SUBCASE("no demand") {
    auto m = legitimacy_map(table({{"parks", 0}, {"parking", 0}}));
    CHECK_FALSE(m.has_demand);
    CHECK(m.items.empty());
  }
}

TEST_CASE("maps over a dataset cover every scope") {
  auto ds = testing::synthetic_survey({.respondents = 300});
  auto by_nb = legitimacy_maps(ds, Axis::SectorsWithinNeighborhood);
  CHECK(by_nb.size() == ds.neighborhood_labels.size());
  auto by_sector = legitimacy_maps(ds, Axis::NeighborhoodsWithinSector);
  CHECK(by_sector.size() == ds.sector_labels.size());
  for (const auto& m : by_nb) {
    if (!m.has_demand) continue;
    CHECK(m.knee.optimal_k >= 1);
    CHECK(m.knee.optimal_k <= m.counts.entries.size());
  }
}
