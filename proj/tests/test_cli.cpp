// End-to-end checks that spawn the installed binary (path injected at
// compile time) and inspect its files and exit codes.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

const char* cli_path() { return DIFFRACT_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = std::string(cli_path()) + " " + args +
                    " >cli_stdout.txt 2>cli_stderr.txt";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  REQUIRE(lines.size() >= 2);
  REQUIRE(lines[0][0] == '#');
  return {lines.begin() + 2, lines.end()};
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

struct WorkDir {
  WorkDir() {
    fs::remove_all("cli_work");
    fs::create_directory("cli_work");
  }
};

}  // namespace

TEST_CASE("generate commands write frozen small outputs") {
  WorkDir wd;

  SUBCASE("thue-morse length four") {
    REQUIRE(run("generate tm --n 2 --out cli_work/tm2") == 0);
    auto rows = data_lines("cli_work/tm2.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "0,1,0");
    CHECK(rows[1] == "1,-1,0");
    CHECK(rows[2] == "2,-1,0");
    CHECK(rows[3] == "3,1,0");
    CHECK(fs::exists("cli_work/tm2.manifest.json"));
  }

  SUBCASE("fibonacci patch [0,5]") {
    REQUIRE(run("generate fibonacci --range 0 5 --out cli_work/fib") == 0);
    auto rows = data_lines("cli_work/fib.csv");
    REQUIRE(rows.size() == 4);
    // columns: position, weight_re, weight_im, a, b
    auto r1 = split_doubles(rows[1]);
    REQUIRE(r1.size() == 5);
    CHECK(r1[0] == doctest::Approx(1.618033988749895).epsilon(1e-15));
    CHECK(r1[3] == 0.0);
    CHECK(r1[4] == 1.0);
    auto r3 = split_doubles(rows[3]);
    CHECK(r3[3] == 1.0);
    CHECK(r3[4] == 2.0);
  }

  SUBCASE("bernoulli with p = 1 is all ones") {
    REQUIRE(run("generate bernoulli --n 4 --seed 7 --p 1 --out cli_work/b") ==
            0);
    auto rows = data_lines("cli_work/b.csv");
    REQUIRE(rows.size() == 4);
    for (int i = 0; i < 4; ++i)
      CHECK(rows[i] == std::to_string(i) + ",1,0");
  }

  SUBCASE("random fibonacci tiling") {
    REQUIRE(run("generate random-fibonacci --tiles 50 --seed 3 --out "
                "cli_work/t") == 0);
    auto rows = data_lines("cli_work/t.csv");
    REQUIRE(rows.size() == 50);
    auto first = split_doubles(rows[0]);
    CHECK(first[0] == 0.0);
  }
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("generate tm --n 2") == 2);            // missing --out
  CHECK(run("generate nonsense --out x") == 2);    // unknown subcommand
  CHECK(run("") == 2);                             // no subcommand
  CHECK(run("generate tm --n nope --out x") == 2); // malformed value
  CHECK(run("estimate periodogram --input missing.csv --grid 4 --kmax 1 "
            "--out x") == 2);                      // unreadable input
  CHECK(run("--help") == 0);
  CHECK(run("--version") == 0);
  CHECK(run("generate --help") == 0);
}

TEST_CASE("analytic outputs") {
  WorkDir wd;

  SUBCASE("fibonacci defaults put the strongest peak at zero") {
    REQUIRE(run("analytic fibonacci --out cli_work/spec") == 0);
    auto rows = data_lines("cli_work/spec.csv");
    REQUIRE(rows.size() > 100);
    double best_k = -1, best_i = -1;
    for (const auto& row : rows) {
      auto v = split_doubles(row);
      REQUIRE(v.size() == 2);
      CHECK(std::abs(v[0]) <= 20.0);
      if (v[1] > best_i) {
        best_i = v[1];
        best_k = v[0];
      }
    }
    CHECK(best_k == 0.0);
    CHECK(best_i == doctest::Approx(0.5236).epsilon(1e-3));
  }

  SUBCASE("rudin-shapiro density is constant one") {
    REQUIRE(run("analytic rs --out cli_work/flat") == 0);
    auto rows = data_lines("cli_work/flat.csv");
    REQUIRE(rows.size() == 501);
    for (const auto& row : rows) CHECK(split_doubles(row)[1] == 1.0);
  }

  SUBCASE("tiling density in bin-averaged reference mode") {
    REQUIRE(run("analytic random-fibonacci --kmin 0.1 --dk 0.05 --bins 8 "
                "--substeps 4 --out cli_work/ref") == 0);
    auto rows = data_lines("cli_work/ref.csv");
    REQUIRE(rows.size() == 8);
    auto first = split_doubles(rows.front());
    CHECK(first[0] == 0.1);
    CHECK(first[1] > 0.0);
    // --bins without --dk is rejected
    CHECK(run("analytic random-fibonacci --bins 8 --out cli_work/bad") == 2);
    CHECK(run("analytic random-fibonacci --dk 0.05 --out cli_work/bad") == 2);
  }

  SUBCASE("thue-morse distribution is monotone and normalized") {
    REQUIRE(run("analytic tm-distribution --N 10 --grid 257 --out "
                "cli_work/dist") == 0);
    auto rows = data_lines("cli_work/dist.csv");
    REQUIRE(rows.size() == 257);
    double prev = -1;
    for (const auto& row : rows) {
      double v = split_doubles(row)[1];
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    CHECK(split_doubles(rows.front())[1] == 0.0);
    CHECK(split_doubles(rows.back())[1] == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("estimates, comparison, and reports") {
  WorkDir wd;
  REQUIRE(run("generate tm --n 8 --out cli_work/tm8") == 0);
  REQUIRE(run("estimate periodogram --input cli_work/tm8.csv --kmin 0 "
              "--kmax 1 --grid 64 --out cli_work/ptm") == 0);
  auto rows = data_lines("cli_work/ptm.csv");
  REQUIRE(rows.size() == 64);

  SUBCASE("identical files compare to zero") {
    REQUIRE(run("compare --estimate cli_work/ptm.csv --reference "
                "cli_work/ptm.csv") == 0);
    CHECK(slurp("cli_stdout.txt").substr(0, 7) == "l1rel 0");
  }

  SUBCASE("tolerance violations exit with 1") {
    REQUIRE(run("analytic rs --kmin 0 --kmax 1 --grid 64 --out "
                "cli_work/flat") == 0);
    CHECK(run("compare --estimate cli_work/ptm.csv --reference "
              "cli_work/flat.csv --tolerance 1e-12 --out cli_work/rep") == 1);
    CHECK(slurp("cli_work/rep.report.json").find("\"pass\": false") !=
          std::string::npos);
  }

  SUBCASE("autocorrelation table") {
    REQUIRE(run("estimate autocorr --input cli_work/tm8.csv --maxdist 8 "
                "--out cli_work/acf") == 0);
    auto table = data_lines("cli_work/acf.csv");
    REQUIRE(table.size() == 17);  // z = -8..8
  }

  SUBCASE("scaling report") {
    REQUIRE(run("estimate scaling --system tm --k 0.3333333333333333 "
                "--min-log2 8 --max-log2 11 --out cli_work/sc") == 0);
    CHECK(slurp("cli_stdout.txt").substr(0, 6) == "slope ");
    CHECK(slurp("cli_work/sc.report.json").find("\"slope\"") !=
          std::string::npos);
  }
}

TEST_CASE("manifests replay bit-exactly") {
  WorkDir wd;
  REQUIRE(run("estimate ensemble --system bernoulli --size 256 --seed 4 "
              "--dk 0.01 --bins 8 --realizations 3 --out cli_work/ens") == 0);
  REQUIRE(fs::exists("cli_work/ens.manifest.json"));

  SUBCASE("clean replay reproduces the digest") {
    REQUIRE(run("replay cli_work/ens.manifest.json") == 0);
    CHECK(slurp("cli_stdout.txt").find("REPRODUCED") != std::string::npos);
  }

  SUBCASE("a corrupted digest is reported") {
    auto manifest = slurp("cli_work/ens.manifest.json");
    auto pos = manifest.find("\"fnv1a64\": \"");
    REQUIRE(pos != std::string::npos);
    for (int i = 0; i < 16; ++i) manifest[pos + 12 + i] = '0';
    std::ofstream(std::string("cli_work/ens.manifest.json"),
                  std::ios::binary)
        << manifest;
    CHECK(run("replay cli_work/ens.manifest.json") == 1);
    CHECK(slurp("cli_stdout.txt").find("MISMATCH") != std::string::npos);
  }

  SUBCASE("malformed manifests are usage errors") {
    std::ofstream("cli_work/bad.json", std::ios::binary) << "{]";
    CHECK(run("replay cli_work/bad.json") == 2);
    CHECK(run("replay cli_work/not_there.json") == 2);
  }
}

TEST_CASE("default output directory comes from the environment") {
  WorkDir wd;
  fs::create_directory("cli_work/outdir");
  std::string cmd = std::string("DIFFRACT_OUT_DIR=cli_work/outdir ") +
                    cli_path() +
                    " generate tm --n 3 --out word >cli_stdout.txt 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  REQUIRE(WEXITSTATUS(status) == 0);
  CHECK(fs::exists("cli_work/outdir/word.csv"));
  CHECK(fs::exists("cli_work/outdir/word.manifest.json"));
}
