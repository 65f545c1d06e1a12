#include <filesystem>
#include <fstream>

#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/io.hpp"
#include "doctest.h"

using namespace anticonc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "anticonc_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("matrix csv round trip") {
  CounterRng rng = seed_stream(1, 0, 0);
  Eigen::MatrixXd m(4, 3);
  for (auto& x : m.reshaped()) x = rng.normal() * 1e3;
  const auto p = scratch("m.csv");
  write_matrix_csv(p, m);
  CHECK(read_matrix_csv(p) == m);
}

TEST_CASE("points csv round trip") {
  CounterRng rng = seed_stream(2, 0, 0);
  Eigen::MatrixXd pts(2, 7);
  for (auto& x : pts.reshaped()) x = rng.uniform();
  const auto p = scratch("pts.csv");
  write_points_csv(p, pts);
  CHECK(read_points_csv(p) == pts);
}

TEST_CASE("disorder csv round trip") {
  const auto d = SKDisorder::gaussian(6, SeedStream(3, 0));
  const auto p = scratch("g.csv");
  write_disorder_csv(p, d);
  CHECK(read_disorder_csv(p).upper() == d.upper());
}

TEST_CASE("grid round trips") {
  const FppGrid g = make_box(6, standard_density(kExponential), SeedStream(4, 0));
  const auto pc = scratch("grid.csv");
  write_grid_csv(pc, g);
  const FppGrid a = read_grid_csv(pc);
  CHECK(a.weights() == g.weights());
  CHECK(a.source() == g.source());
  CHECK(a.target() == g.target());
  CHECK(a.width() == g.width());
  const auto pb = scratch("grid.bin");
  write_grid_binary(pb, g);
  const FppGrid b = read_grid_binary(pb);
  CHECK(b.weights() == g.weights());
  CHECK(b.target() == g.target());
  CHECK(b.height() == g.height());
}

TEST_CASE("io errors") {
  CHECK_THROWS_AS(read_matrix_csv(scratch("missing.csv")), IoError);
  const auto bad = scratch("bad.csv");
  {
    std::ofstream(bad) << "1,2\n3,x\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(bad), IoError);
  {
    std::ofstream(bad) << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(bad), IoError);
  {
    std::ofstream(bad, std::ios::binary) << "NOPE";
  }
  CHECK_THROWS_AS(read_grid_binary(bad), IoError);
}
