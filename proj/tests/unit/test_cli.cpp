#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spacedec/config.h"
#include "spacedec/matrix_market.h"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "spacedec_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(SPACEDEC_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// metrics.csv with the wall_ms column dropped
std::vector<std::string> csv_without_time(const fs::path& p) {
  std::vector<std::string> rows;
  std::istringstream in(read(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    std::string joined;
    for (size_t k = 0; k < cells.size(); ++k)
      if (k != 3) joined += cells[k] + ",";
    rows.push_back(joined);
  }
  return rows;
}

const char* kSync =
    "[experiment]\ntask = sync\nseed = 3\n[problem]\ncams = 8\nedges = 16\n"
    "[solver]\nmethod = rtr\nmax_iters = 100\ngrad_tol = 1e-10\n";

} // namespace

TEST(Cli, MalformedConfigExitsTwoWithoutOutputs) {
  const fs::path cfg = write_config("bad.cfg", "[experiment]\ntask = sync\n[problem]\nbogus = 3\n");
  const fs::path out = kRoot / "bad_out";
  fs::remove_all(out);
  EXPECT_EQ(run("run " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("run " + (kRoot / "no_such.cfg").string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST(Cli, RunIsDeterministicAndWritesOutputs) {
  const fs::path cfg = write_config("sync.cfg", kSync);
  const fs::path a = kRoot / "sync_a", b = kRoot / "sync_b";
  fs::remove_all(a);
  fs::remove_all(b);
  ASSERT_EQ(run("run " + cfg.string() + " --out " + a.string()), 0);
  ASSERT_EQ(run("run " + cfg.string() + " --out " + b.string()), 0);
  for (const char* f : {"summary.json", "metrics.csv", "X.mtx", "grad.mtx", "plotdata/f.dat", "plotdata/grad_norm.dat"})
    EXPECT_TRUE(fs::exists(a / f)) << f;
  EXPECT_EQ(csv_without_time(a / "metrics.csv"), csv_without_time(b / "metrics.csv"));
  EXPECT_EQ(read(a / "X.mtx"), read(b / "X.mtx"));
  EXPECT_EQ(csv_without_time(a / "metrics.csv").front(), "iteration,f,grad_norm,step,inner_iters,accepted,");
  EXPECT_NE(read(a / "summary.json").find("\"config_hash\""), std::string::npos);

  // the written solution certifies as stationary
  const std::string files = " --X " + (a / "X.mtx").string() + " --grad " + (a / "grad.mtx").string();
  EXPECT_EQ(run("certify" + files + " --rank 3 --kind stiefel:8x3"), 0);
  // a shifted X is infeasible
  const spacedec::Matrix X = spacedec::io::read_matrix_market((a / "X.mtx").string());
  spacedec::io::write_matrix_market_array((kRoot / "X_bad.mtx").string(), 1.5 * X);
  EXPECT_EQ(run("certify --X " + (kRoot / "X_bad.mtx").string() + " --grad " + (a / "grad.mtx").string() +
                " --rank 3 --kind stiefel:8x3"),
            3);
  EXPECT_EQ(run("certify" + files + " --rank 3 --kind stiefel:5x3"), 2);
}

TEST(Cli, CertifyRejectsNonStationary) {
  fs::create_directories(kRoot);
  spacedec::Matrix X = spacedec::Matrix::Zero(3, 3), G = spacedec::Matrix::Identity(3, 3);
  X(0, 0) = 1;
  spacedec::io::write_matrix_market_array((kRoot / "X1.mtx").string(), X);
  spacedec::io::write_matrix_market_array((kRoot / "G1.mtx").string(), G);
  const std::string files = " --X " + (kRoot / "X1.mtx").string() + " --grad " + (kRoot / "G1.mtx").string();
  EXPECT_EQ(run("certify" + files + " --rank 2 --kind euclidean"), 1);
  spacedec::io::write_matrix_market_array((kRoot / "G0.mtx").string(), spacedec::Matrix::Zero(3, 3));
  EXPECT_EQ(run("certify --X " + (kRoot / "X1.mtx").string() + " --grad " + (kRoot / "G0.mtx").string() +
                " --rank 2 --kind euclidean"),
            0);
}

TEST(Cli, Geomtest) {
  EXPECT_EQ(run("geomtest --m 8 --n 7 --r 3 --kind fsphere --instances 1"), 0);
  EXPECT_EQ(run("geomtest --m 6 --n 7 --r 1 --kind stiefel:3x2"), 2);
}

TEST(Cli, ShippedConfigsParse) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(SPACEDEC_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW(spacedec::load_config(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}
