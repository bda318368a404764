#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "rbp/errors.hpp"
#include "rbp/plant.hpp"

using namespace rbp;

TEST_SUITE_BEGIN("plant");

TEST_CASE("excitation endpoints and identity") {
  const auto [u1_0, u2_0] = excitation(0);
  CHECK(u1_0 == 0.0);
  CHECK(u2_0 == 1.0);

  const auto [u1_h, u2_h] = excitation(125);
  CHECK(std::abs(u1_h - 0.0) <= 1e-12);
  CHECK(std::abs(u2_h - (-1.0)) <= 1e-12);

  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto [u1, u2] = excitation(t);
    CHECK(std::abs(u1 * u1 + u2 * u2 - 1.0) <= 1e-12);
  }
}

TEST_CASE("plant_step hand evaluations") {
  PlantState st = PlantState::initial(0, 0.0);

  SUBCASE("rest state, unit second input") {
    const PlantState next = plant_step(st, 0.0, 1.0, {0.0, 0.0});
    CHECK(next.y1 == 0.0);
    CHECK(next.y2 == (0.0 - 0.0 + (0.0 - 0.5) * (1.0 + 0.8)) / 2.0);
    CHECK(next.y2 == doctest::Approx(-0.45).epsilon(1e-15));
    CHECK(next.t == 1);
  }
  SUBCASE("unit first state, zero input") {
    st.y1 = 1.0;
    const PlantState next = plant_step(st, 0.0, 0.0, {0.0, 0.0});
    CHECK(next.y1 == 0.8 / 2.0);
    CHECK(next.y1 == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(next.y2 == (1.0 - 0.0 + (0.0 - 0.5) * (0.0 + 0.8)) / 2.0);
    CHECK(next.y2 == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("canceling input products") {
    const PlantState next = plant_step(st, 0.5, -0.8, {0.0, 0.0});
    CHECK(next.y1 == (0.5 * 0.5 * -0.8) / 2.0);
    CHECK(next.y1 == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(next.y2 == 0.0);
  }
}

TEST_CASE("plant_step flags non-finite excursions") {
  PlantState st = PlantState::initial(0, 0.0);
  CHECK_THROWS_AS(plant_step(st, 0.0, 1.0, {std::numeric_limits<double>::infinity(), 0.0}),
                  DivergenceError);
}

TEST_CASE("sample_noise basics") {
  SUBCASE("zero power yields exact zeros") {
    PlantState st = PlantState::initial(7, 0.0);
    const auto [noise, next] = sample_noise(st);
    CHECK(noise.first == 0.0);
    CHECK(noise.second == 0.0);
    // the generator still advances
    CHECK(!(next.noise_rng == st.noise_rng));
  }
  SUBCASE("same seed, same sequence") {
    PlantState a = PlantState::initial(99, 0.001);
    PlantState b = PlantState::initial(99, 0.001);
    for (int k = 0; k < 32; ++k) {
      const auto [na, sa] = sample_noise(a);
      const auto [nb, sb] = sample_noise(b);
      CHECK(na == nb);
      a = sa;
      b = sb;
    }
  }
  SUBCASE("sample variance matches the configured power") {
    PlantState st = PlantState::initial(2024, 0.001);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n / 2; ++k) {
      const auto [noise, next] = sample_noise(st);
      st = next;
      sum += noise.first + noise.second;
      sumsq += noise.first * noise.first + noise.second * noise.second;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(var >= 0.00095);
    CHECK(var <= 0.00105);
  }
  SUBCASE("negative power is rejected") {
    CHECK_THROWS_AS(PlantState::initial(0, -0.001), std::invalid_argument);
  }
}

TEST_CASE("build_regressor keeps the published order") {
  PlantState st = PlantState::initial(0, 0.0);
  st.y1 = 0.25;
  st.y2 = -0.5;
  const auto x = build_regressor(0.1, 0.9, st);
  CHECK(x[0] == 0.1);
  CHECK(x[1] == 0.9);
  CHECK(x[2] == 0.25);
  CHECK(x[3] == -0.5);

  const auto rest = build_regressor(0.0, 1.0, PlantState::initial(0, 0.0));
  CHECK(rest == std::array<double, 4>{0.0, 1.0, 0.0, 0.0});
}

TEST_CASE("noise-free trajectory stays bounded for 1e5 steps") {
  PlantState st = PlantState::initial(0, 0.0);
  for (std::uint64_t t = 0; t < 100000; ++t) {
    const auto [u1, u2] = excitation(t);
    st = plant_step(st, u1, u2, {0.0, 0.0});
    CHECK(std::abs(st.y1) < 2.0);
    CHECK(std::abs(st.y2) < 2.0);
  }
}

TEST_CASE("noise-free trajectory becomes periodic with the excitation") {
  PlantState st = PlantState::initial(0, 0.0);
  std::vector<double> cycle20_y1, cycle20_y2;
  std::vector<double> cycle21_y1, cycle21_y2;
  for (std::uint64_t t = 0; t < 250 * 22; ++t) {
    const auto [u1, u2] = excitation(t);
    st = plant_step(st, u1, u2, {0.0, 0.0});
    if (t >= 250 * 20 && t < 250 * 21) {
      cycle20_y1.push_back(st.y1);
      cycle20_y2.push_back(st.y2);
    } else if (t >= 250 * 21) {
      cycle21_y1.push_back(st.y1);
      cycle21_y2.push_back(st.y2);
    }
  }
  for (std::size_t k = 0; k < 250; ++k) {
    CHECK(std::abs(cycle20_y1[k] - cycle21_y1[k]) < 1e-6);
    CHECK(std::abs(cycle20_y2[k] - cycle21_y2[k]) < 1e-6);
  }
}

TEST_CASE("identical seeds reproduce trajectories bit for bit") {
  PlantState a = PlantState::initial(5, 0.001);
  PlantState b = PlantState::initial(5, 0.001);
  for (std::uint64_t t = 0; t < 500; ++t) {
    const auto [u1, u2] = excitation(t);
    const auto [na, sa] = sample_noise(a);
    const auto [nb, sb] = sample_noise(b);
    a = plant_step(sa, u1, u2, na);
    b = plant_step(sb, u1, u2, nb);
    CHECK(a.y1 == b.y1);
    CHECK(a.y2 == b.y2);
  }
}

TEST_SUITE_END();
