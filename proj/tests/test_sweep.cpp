#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dipswitch/entanglement.hpp"
#include "dipswitch/error.hpp"
#include "dipswitch/sweep.hpp"

using namespace dipswitch;
namespace fs = std::filesystem;

namespace {

SweepConfig chain_config(int n, XRange range, std::vector<double> temps) {
  SweepConfig c;
  c.geometry.kind = GeometryKind::Chain;
  c.geometry.extents = {n};
  c.x_range = range;
  c.temperatures = std::move(temps);
  c.threads = 1;
  return c;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream s;
  emit_csv(r, s);
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("dipswitch_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("XRange grid is inclusive") {
  CHECK(XRange{0.0, 2.0, 1e-3}.grid().size() == 2001);
  CHECK(XRange{0.0, 1.0, 0.25}.grid() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(XRange{0.0, 1.0, 0.3}.grid().size() == 4);
  CHECK_THROWS_AS(XRange({0.0, 1.0, -1.0}).grid(), Error);
  CHECK_THROWS_AS(XRange({1.0, 0.0, 0.1}).grid(), Error);
}

TEST_CASE("two-dipole switch") {
  const auto r = run_sweep(chain_config(2, {0.9, 1.1, 0.2}, {1e-4}));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].concurrence >= 0.999);
  CHECK(r.rows[1].concurrence <= 1e-6);

  GeometrySpec g;
  const auto t = detect_transitions(g, 1e-4, {0.0, 2.0, 0.01});
  REQUIRE(t.size() == 1);
  CHECK(t[0].kind == TransitionKind::Crossing);
  CHECK(std::abs(t[0].x_star - 1.0) <= 1e-6);
  CHECK(t[0].x_lo <= 1.0);
  CHECK(t[0].x_hi >= 1.0);
}

TEST_CASE("infinite temperature washes out all entanglement") {
  auto c = chain_config(4, {0.0, 2.0, 0.25}, {std::numeric_limits<double>::infinity()});
  c.all_pairs = true;
  for (const auto& row : run_sweep(c).rows) CHECK(row.concurrence == 0.0);
}

TEST_CASE("rows are ordered by temperature, x, then pair") {
  auto c = chain_config(3, {0.0, 1.0, 0.5}, {0.5, 1e-4, 0.5});
  c.all_pairs = true;
  const auto r = run_sweep(c);
  REQUIRE(r.rows.size() == 2 * 3 * 3);
  CHECK(r.rows.front().kT == 1e-4);
  CHECK(r.rows.back().kT == 0.5);
  CHECK(r.rows[0].i == 0);
  CHECK(r.rows[0].j == 1);
  CHECK(r.rows[2].i == 1);
  CHECK(r.rows[3].x == 0.5);
}

TEST_CASE("CSV layout") {
  SUBCASE("empty result is header only") {
    CHECK(csv_of({}) == "x,kT,i,j,concurrence\n");
    std::ostringstream t;
    emit_transitions_csv({}, t);
    CHECK(t.str() == "x_star,kT,kind\n");
  }
  SUBCASE("single row with 1-based indices") {
    SweepResult r;
    r.rows.push_back({0.5, 1e-4, 0, 2, 0.25});
    CHECK(csv_of(r) == "x,kT,i,j,concurrence\n0.5,0.0001,1,3,0.25\n");
  }
  SUBCASE("1000 x values at three temperatures") {
    auto c = chain_config(2, {0.0, 0.999, 1e-3}, {1e-4, 1e-2, 1e-1});
    c.detect_transitions = false;
    const auto r = run_sweep(c);
    CHECK(r.rows.size() == 3000);
    CHECK(count_lines(csv_of(r)) == 3001);
  }
  SUBCASE("number formatting") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.6532327303295081) == "0.65323273");
    CHECK(format_number(1e-12) == "1e-12");
    CHECK(format_number(0.0) == "0");
  }
}

TEST_CASE("transitions path") {
  CHECK(transitions_path_for("out/fig1.csv") == fs::path("out/fig1.transitions.csv"));
  CHECK(transitions_path_for("fig1") == fs::path("fig1.transitions.csv"));
}

TEST_CASE("repeated sweeps are byte-identical") {
  auto c = chain_config(5, {0.0, 2.0, 0.02}, {1e-4, 0.1});
  c.all_pairs = true;
  const auto a = run_sweep(c);
  c.threads = 0;
  const auto b = run_sweep(c);
  CHECK(csv_of(a) == csv_of(b));
  std::ostringstream ta, tb;
  emit_transitions_csv(a, ta);
  emit_transitions_csv(b, tb);
  CHECK(ta.str() == tb.str());
}

TEST_CASE("shared diagonalization matches per-temperature recomputation") {
  const std::vector<double> temps{1e-4, 0.05, 0.5};
  auto c = chain_config(5, {0.1, 1.9, 0.3}, temps);
  c.all_pairs = true;
  const auto joint = run_sweep(c);
  std::vector<SweepRow> separate;
  for (double kT : temps) {
    auto one = c;
    one.temperatures = {kT};
    const auto r = run_sweep(one);
    separate.insert(separate.end(), r.rows.begin(), r.rows.end());
  }
  REQUIRE(joint.rows.size() == separate.size());
  for (std::size_t k = 0; k < separate.size(); ++k) CHECK(joint.rows[k].concurrence == separate[k].concurrence);
}

TEST_CASE("sweep rows agree with a direct thermal computation") {
  const auto c = chain_config(4, {0.3, 1.5, 0.6}, {0.2});
  const auto r = run_sweep(c);
  const auto couplings = c.geometry.couplings();
  for (const auto& row : r.rows) {
    const auto spec = std::make_shared<const SpectralDecomposition>(
        diagonalize(build_hamiltonian(couplings, row.x, {Representation::Dense})));
    const double direct = concurrence(reduce_to_pair(thermal_state(spec, beta_from_temperature(row.kT)), 0, 1));
    CHECK(std::abs(direct - row.concurrence) <= 1e-12);
  }
}

TEST_CASE("sweep configuration errors") {
  const auto code = [](const SweepConfig& c) {
    try {
      run_sweep(c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  auto c = chain_config(3, {0.0, 1.0, 0.5}, {1e-4});
  auto empty = c;
  empty.pairs.clear();
  CHECK(code(empty) == ErrorCode::InvalidConfig);
  auto out_of_range = c;
  out_of_range.pairs = {{0, 3}};
  CHECK(code(out_of_range) == ErrorCode::InvalidConfig);
  auto no_temps = c;
  no_temps.temperatures.clear();
  CHECK(code(no_temps) == ErrorCode::InvalidConfig);
  auto negative = c;
  negative.temperatures = {-0.1};
  CHECK(code(negative) == ErrorCode::InvalidConfig);
  auto step = c;
  step.x_range.step = 0.0;
  CHECK(code(step) == ErrorCode::InvalidConfig);
  auto single = c;
  single.geometry.extents = {1};
  CHECK(code(single) != ErrorCode::Io);
}

TEST_CASE("write_csv_files") {
  TempDir dir;
  auto c = chain_config(2, {0.5, 1.5, 0.5}, {1e-4});
  const auto r = run_sweep(c);

  SUBCASE("writes both files atomically") {
    const auto rows = dir.path / "fig.csv";
    const auto trans = transitions_path_for(rows);
    write_csv_files(r, rows, trans);
    CHECK(slurp(rows) == csv_of(r));
    CHECK(slurp(trans).rfind("x_star,kT,kind\n", 0) == 0);
    CHECK_FALSE(fs::exists(dir.path / "fig.csv.tmp"));
  }
  SUBCASE("unwritable location reports the path and leaves nothing") {
    const auto rows = dir.path / "missing" / "fig.csv";
    try {
      write_csv_files(r, rows, std::nullopt);
      FAIL("expected an Error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
      CHECK(std::string(e.what()).find(rows.string()) != std::string::npos);
    }
    CHECK_FALSE(fs::exists(rows));
  }
  SUBCASE("a failing second file leaves no first file behind") {
    const auto rows = dir.path / "fig.csv";
    const auto trans = dir.path / "missing" / "t.csv";
    CHECK_THROWS_AS(write_csv_files(r, rows, trans), Error);
    CHECK_FALSE(fs::exists(rows));
    CHECK_FALSE(fs::exists(dir.path / "fig.csv.tmp"));
  }
}
