// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "starfrac/grid.hpp"
#include "starfrac/initial_density.hpp"
#include "starfrac/rng.hpp"
#include "starfrac/snapshot.hpp"

using namespace starfrac;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TmpDir {
  std::filesystem::path path;
  TmpDir() {
    path = std::filesystem::temp_directory_path() / "starfrac_test_grid";
    std::filesystem::create_directories(path);
  }
  ~TmpDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("1d grid covers the interval with no masking") {
  const Grid g = make_grid(DomainSpec::interval(-1, 1), 10);
  CHECK(g.dim == 1);
  CHECK(g.nx == 10);
  CHECK(g.ny == 1);
  CHECK(g.n_cells() == 10);
  CHECK(g.hx == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(g.cell_volume() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(g.centers[0].x == doctest::Approx(-0.9).epsilon(1e-14));
  CHECK(g.centers[9].x == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(g.centers[3].y == 0.0);
  CHECK(g.locate({-0.87, 0}) == 0);
  CHECK(g.locate({-0.5, 0}) == 2);
  CHECK(g.locate({0.95, 0}) == 9);
  CHECK(g.locate({1.5, 0}) == -1);
  CHECK(g.locate({-1.5, 0}) == -1);
}

TEST_CASE("disk grid masks outside cells and tracks the area") {
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  const Grid g = make_grid(dk, 16);
  CHECK(g.dim == 2);
  CHECK(g.nx == 16);
  CHECK(g.ny == 16);
  CHECK(g.n_cells() < 256);
  // masked-cell area error is O(h): the covered area tracks pi
  CHECK(g.n_cells() * g.cell_volume() == doctest::Approx(M_PI).epsilon(0.06));
  for (int c = 0; c < g.n_cells(); ++c) CHECK(dk.contains(g.centers[c]));
  // index maps are mutually inverse
  for (int c = 0; c < g.n_cells(); ++c) CHECK(g.cell_index[g.flat_of_cell[c]] == c);

  // interior points land in a live cell, boundary slivers snap to a neighbor
  Pcg32 rng = Pcg32::for_stream(31, 0);
  for (int i = 0; i < 200; ++i) {
    Vec2 p;
    do {
      p = {2 * rng.u01() - 1, 2 * rng.u01() - 1};
    } while (!dk.contains(p) || dk.boundary_distance(p) < 0.01);
    const int c = g.locate(p);
    REQUIRE(c >= 0);
    const double dx = std::abs(p.x - g.centers[c].x);
    const double dy = std::abs(p.y - g.centers[c].y);
    CHECK(dx <= 2.5 * g.hx);
    CHECK(dy <= 2.5 * g.hy);
  }
  CHECK(g.locate({2, 2}) == -1);
}

TEST_CASE("field norms and distances match hand sums") {
  const Grid g = make_grid(DomainSpec::interval(0, 1), 4);
  DensityField f, h;
  f.values = {1, 2, 3, 4};
  h.values = {1, 1, 5, 4};
  CHECK(field_mass(g, f) == doctest::Approx(10.0 * 0.25).epsilon(1e-15));
  CHECK(field_l2(g, f) ==
        doctest::Approx(std::sqrt(30.0 * 0.25)).epsilon(1e-15));
  CHECK(l1_distance(g, f, h) == doctest::Approx(3.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("deposited histogram integrates to the surviving fraction") {
  const Grid g = make_grid(DomainSpec::interval(-1, 1), 10);
  const std::vector<Vec2> pos = {{-0.5, 0}, {-0.5, 0}, {0.5, 0}, {1.5, 0}};
  const DensityField f = deposit_positions(g, pos, 4);
  // the point at 1.5 is outside and contributes nothing
  CHECK(field_mass(g, f) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(f.values[2] == doctest::Approx(2.0 / (4 * 0.2)).epsilon(1e-14));
  CHECK(f.values[7] == doctest::Approx(1.0 / (4 * 0.2)).epsilon(1e-14));
  CHECK(f.values[0] == 0.0);
}

TEST_CASE("initial fields are normalized and proportional to the weight") {
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  const Grid g = make_grid(dk, 24);
  const InitialDensity rho = InitialDensity::gaussian_truncated({0.2, 0}, 0.3);
  const DensityField f = initial_field(rho, g);
  CHECK(field_mass(g, f) == doctest::Approx(1.0).epsilon(1e-12));
  const double r0 = f.values[0] / rho.weight(g.centers[0]);
  for (int c = 0; c < g.n_cells(); ++c) {
    CHECK(f.values[c] >= 0.0);
    CHECK(f.values[c] == doctest::Approx(r0 * rho.weight(g.centers[c]))
                             .epsilon(1e-12));
  }

  const Grid g1 = make_grid(DomainSpec::interval(-1, 1), 8);
  const DensityField u = initial_field(InitialDensity::uniform(), g1);
  CHECK(field_mass(g1, u) == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : u.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sampling follows the requested density") {
  Pcg32 rng = Pcg32::for_stream(32, 0);
  const DomainSpec iv = DomainSpec::interval(-1, 1);
  const int n = 20000;

  const InitialDensity uni = InitialDensity::uniform();
  int pos_count = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 s = uni.sample(rng, iv);
    CHECK(iv.contains(s));
    if (s.x > 0) ++pos_count;
  }
  CHECK(std::abs(pos_count / double(n) - 0.5) < 3.0 * 0.5 / std::sqrt(n));

  const InitialDensity gau = InitialDensity::gaussian_truncated({0.5, 0}, 0.2);
  double mean = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 s = gau.sample(rng, iv);
    CHECK(iv.contains(s));
    mean += s.x;
  }
  // right tail truncated at 2.5 sigma shifts the mean down by ~0.0035
  CHECK(mean / n == doctest::Approx(0.4965).epsilon(0.01));

  const InitialDensity box = InitialDensity::uniform_box({-0.5, -1}, {0.25, 1});
  for (int i = 0; i < 500; ++i) {
    const Vec2 s = box.sample(rng, iv);
    CHECK(s.x >= -0.5);
    CHECK(s.x <= 0.25);
  }
}

TEST_CASE("table density reproduces cell weight ratios") {
  const Grid g = make_grid(DomainSpec::interval(-1, 1), 10);
  std::vector<double> w(10, 1.0);
  for (int c = 5; c < 10; ++c) w[c] = 3.0;
  const InitialDensity tab = InitialDensity::grid_table(g, w);
  Pcg32 rng = Pcg32::for_stream(33, 0);
  const int n = 20000;
  int right = 0;
  for (int i = 0; i < n; ++i)
    if (tab.sample(rng, g.dom).x > 0) ++right;
  const double p = right / double(n);
  CHECK(std::abs(p - 0.75) < 3.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST_CASE("sampling a density supported outside the domain throws") {
  const InitialDensity far = InitialDensity::uniform_box({5, 5}, {6, 6});
  Pcg32 rng = Pcg32::for_stream(34, 0);
  const DomainSpec dk = DomainSpec::disk({0, 0}, 1.0);
  CHECK_THROWS_AS((void)far.sample(rng, dk), std::runtime_error);
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
  for (double v : {M_PI, 1.0 / 3.0, 1e-300, 6.02e23, -0.1, 0.0})
    CHECK(std::stod(format_g17(v)) == v);
}

TEST_CASE("density csv is deterministic with lf endings and volume-weighted mass") {
  TmpDir tmp;
  const Grid g = make_grid(DomainSpec::interval(-1, 1), 4);
  DensityField f;
  f.values = {0.5, 1.5, 2.5, 0.25};
  f.time = 0.125;
  const auto p1 = tmp.path / "a.csv";
  const auto p2 = tmp.path / "b.csv";
  write_density_csv(p1.string(), g, {f});
  write_density_csv(p2.string(), g, {f});
  const std::string s1 = slurp(p1);
  CHECK(s1 == slurp(p2));
  CHECK(s1.find('\r') == std::string::npos);

  std::istringstream in(s1);
  std::string line;
  std::getline(in, line);
  CHECK(line == "snapshot_time,cell_index,cell_x,mass");
  std::getline(in, line);
  std::istringstream row(line);
  std::string tok;
  std::getline(row, tok, ',');
  CHECK(std::stod(tok) == 0.125);
  std::getline(row, tok, ',');
  CHECK(std::stoi(tok) == 0);
  std::getline(row, tok, ',');
  CHECK(std::stod(tok) == doctest::Approx(-0.75).epsilon(1e-15));
  std::getline(row, tok, ',');
  CHECK(std::stod(tok) == doctest::Approx(0.5 * 0.5).epsilon(1e-15));
  int n_rows = 1;
  while (std::getline(in, line))
    if (!line.empty()) ++n_rows;
  CHECK(n_rows == 4);

  // 2d header carries the y column
  const Grid g2 = make_grid(DomainSpec::disk({0, 0}, 1.0), 6);
  DensityField f2;
  f2.values.assign(g2.n_cells(), 1.0);
  const auto p3 = tmp.path / "c.csv";
  write_density_csv(p3.string(), g2, {f2});
  std::istringstream in2(slurp(p3));
  std::getline(in2, line);
  CHECK(line == "snapshot_time,cell_index,cell_x,cell_y,mass");
}

TEST_CASE("table csv writes header and full precision rows") {
  TmpDir tmp;
  const auto p = tmp.path / "t.csv";
  write_table_csv(p.string(), {"alpha", "value"}, {{0.5, 1.0 / 3.0}, {1.5, 2.0}});
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  CHECK(line == "alpha,value");
  std::getline(in, line);
  const auto comma = line.find(',');
  CHECK(std::stod(line.substr(0, comma)) == 0.5);
  CHECK(std::stod(line.substr(comma + 1)) == 1.0 / 3.0);
}

TEST_CASE("json files round-trip") {
  TmpDir tmp;
  const auto p = tmp.path / "s.json";
  nlohmann::json j = {{"experiment", "demo"}, {"pass", true}, {"x", 0.1}};
  write_json_file(p.string(), j);
  std::ifstream in(p);
  nlohmann::json back;
  in >> back;
  CHECK(back == j);
}
