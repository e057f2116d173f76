#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <sys/wait.h>

#include "minkval/integral_geom.hpp"

using namespace minkval;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MINKVAL_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("minkval_cli_" + name)).string();
}

}  // namespace

TEST_CASE("multipliers table for the Berg function") {
  const Run r = run("multipliers --n 3 --berg 3 --kmax 8 --csv -");
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("k,value,error,exact\n"));
  CHECK(r.out.find("\n2,-0.5,0,-1/2\n") != std::string::npos);
}

TEST_CASE("crofton report with its target") {
  const Run r = run("crofton --body cube.json --i 1 --j 1 --n3 --N 200000 --seed 7");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["target"].get<double>() == doctest::Approx(4.71239).epsilon(1e-6));
  CHECK(std::abs(j["z"].get<double>()) <= 3.0);
  const EstimateReport e = EstimateReport::from_json(j);
  CHECK(e.to_json() == EstimateReport::from_json(e.to_json()).to_json());
}

TEST_CASE("projection body evaluation") {
  const Run r = run("evaluate --spec projection_body --body cube.json --dir 1,0,0");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["values"][0]["h"].get<double>() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("input errors exit with code 2 and a JSON message") {
  for (const char* args : {"evaluate --spec nope --body cube --dir 1,0,0", "evaluate --spec projection_body --body "
                                                                           "missing.json --dir 1,0,0",
                           "crofton --body cube --i 1", "evaluate --spec projection_body --body cube --dir 1,0",
                           "multipliers --n 3 --kmax 4"}) {
    const Run r = run(args);
    CHECK(r.code == 2);
    const json j = json::parse(r.out);
    CHECK(j.contains("error"));
    CHECK(j["error"]["exit_code"] == 2);
  }
}

TEST_CASE("failed checks exit with code 1") {
  const Run r = run("check-valuation --spec projection_body --body cube --plane 0,0,1,0.5 --tol 1e-30");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["pass"] == false);
}

TEST_CASE("reports are reproducible and artifacts round trip") {
  const std::string a = temp_path("a.json"), b = temp_path("b.json");
  const std::string args = "kinematic --body cube --other small_cube --j 0 --N 3000 --seed 5 --no-timing --out ";
  REQUIRE(run(args + a).code == 0);
  REQUIRE(run(args + b).code == 0);
  std::ifstream fa(a), fb(b);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);
  const json j = json::parse(sa);
  const EstimateReport e = EstimateReport::from_json([&] {
    json d = j["result"]["direct"];
    d["wall_time_s"] = 0.0;
    return d;
  }());
  CHECK(e.samples == 3000);
  // corpus bodies re-parse unchanged
  const std::string dir = temp_path("corpus");
  REQUIRE(run("corpus --hulls 2 --dir " + dir).code == 0);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path());
    const json body = json::parse(in);
    CHECK(Polytope::from_json(body).to_json() == body);
  }
}

TEST_CASE("corpus directory from the environment") {
  const std::string dir = temp_path("envdata");
  REQUIRE(run("corpus --hulls 0 --dir " + dir).code == 0);
  std::filesystem::rename(dir + "/cube.json", dir + "/renamed_cube.json");
  const Run r = run("area-measure --body renamed_cube --data " + dir);
  CHECK(r.code == 0);
  const Run e = run("area-measure --body renamed_cube");
  CHECK(e.code == 2);
  const std::string env = "MINKVAL_DATA=" + dir + " ";
  const Run viaenv = [&] {
    Run x;
    FILE* p = popen((env + MINKVAL_CLI + " area-measure --body renamed_cube 2>&1").c_str(), "r");
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) x.out.append(buf, n);
    const int status = pclose(p);
    x.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return x;
  }();
  CHECK(viaenv.code == 0);
}

TEST_CASE("crofton-mv csv and regularity probe") {
  const std::string csv = temp_path("mv.csv");
  const Run r = run("crofton-mv --body cube --kmax 4 --N 20000 --seed 5 --csv " + csv);
  CHECK(r.code == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,lhs,rhs,stderr");
  const Run l = run("lemma52 --n 3 --q 2 --family P2");
  CHECK(l.code == 0);
  CHECK(json::parse(l.out)["sup_ratio_box"].get<double>() == doctest::Approx(3.3713).epsilon(1e-3));
  CHECK(run("lemma52 --n 3 --q 2 --family P1").code == 2);
}
