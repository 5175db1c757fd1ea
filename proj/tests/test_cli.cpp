#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "sftkit/cli.hpp"
#include "sftkit/io.hpp"
#include "sftkit/theorem.hpp"

using namespace sft;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("sftkit-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
  io::Json json() const { return io::Json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

constexpr const char* kBrokenContact =
    R"({"version":1,"n":2,"h2rank":0,"c1":[],"orbits":[{"id":"a","cz":2,"kappa":1},{"id":"b","cz":3,"kappa":1},{"id":"c","cz":4,"kappa":1}]})";
constexpr const char* kBrokenSpec = R"({"version":1,"flavor":"CH","contactData":"broken.contact.json","images":[
  {"generator":"q:a","terms":[]},
  {"generator":"q:b","terms":[{"coeff":"1","q":{"a":1}}]},
  {"generator":"q:c","terms":[{"coeff":"1","q":{"b":1}}]}]})";

}  // namespace

TEST_CASE("cli: corpus export, validate and classify") {
  TempDir dir;
  REQUIRE(run({"corpus", "toy_overtwisted", "--out", dir.path.string()}).code == 0);
  CHECK(fs::exists(dir / "toy_overtwisted.contact.json"));
  CHECK(fs::exists(dir / "toy_overtwisted.SFTS.json"));

  CHECK(run({"validate", dir / "toy_overtwisted.contact.json"}).code == 0);
  const auto v = run({"validate", dir / "toy_overtwisted.rSFT.json"});
  CHECK(v.code == 0);
  CHECK(v.json()["dSquared"] == "pass");

  const auto c = run({"classify", dir / "toy_overtwisted.CH.json", dir / "toy_overtwisted.rSFT.json"});
  REQUIRE(c.code == 0);
  const auto report = c.json();
  CHECK(report["tool"] == "sftkit");
  CHECK(report["exitCode"] == 0);
  CHECK(report["verdict"] == "vanishes");
  CHECK(report["certificates"].size() == 6);

  const auto again = run({"classify", dir / "toy_overtwisted.CH.json", dir / "toy_overtwisted.rSFT.json"});
  CHECK(again.out == c.out);

  const auto reportFile = dir / "report.json";
  CHECK(run({"classify", dir / "toy_overtwisted.CH.json", "--report", reportFile}).code == 0);
  CHECK(io::read_file(reportFile).find("\"vanishes\"") != std::string::npos);
}

TEST_CASE("cli: tight entry reports the caveat") {
  TempDir dir;
  REQUIRE(run({"corpus", "toy_tight", "--out", dir.path.string()}).code == 0);
  const auto r = run({"find-primitive", dir / "toy_tight.CH.json"});
  CHECK(r.code == 0);
  CHECK(r.json()["verdict"] == "none-within-bounds");
  CHECK(r.json()["caveat"] == std::string(kSemidecisionCaveat));
  CHECK(run({"corpus", "toy_tight"}).code == 0);
  CHECK(run({"corpus", "layered", "--seed", "4"}).code == 0);
}

TEST_CASE("cli: d2 failure and apply") {
  TempDir dir;
  io::write_file(dir.path / "broken.contact.json", kBrokenContact);
  io::write_file(dir.path / "broken.json", kBrokenSpec);
  const auto r = run({"d2", dir / "broken.json"});
  CHECK(r.code == 1);
  const auto failures = r.json()["failures"];
  REQUIRE(failures.size() == 1);
  CHECK(failures[0]["generator"] == "q:c");
  CHECK(failures[0]["residual"] == "q:a");
  CHECK(run({"validate", dir / "broken.json"}).code == 1);

  const auto a = run({"apply", dir / "broken.json", "--element", "q:c + 2*q:b"});
  CHECK(a.code == 0);
  CHECK(a.json()["result"] == "2*q:a + q:b");
}

TEST_CASE("cli: lift and project") {
  TempDir dir;
  REQUIRE(run({"corpus", "toy_overtwisted", "--out", dir.path.string()}).code == 0);
  const auto l = run({"lift", dir / "toy_overtwisted.CH.json", dir / "toy_overtwisted.rSFT.json", "--policy", "weight=3"});
  REQUIRE(l.code == 0);
  CHECK(l.json()["certificate"]["flavor"] == "rSFT");
  const auto p = run({"project", dir / "toy_overtwisted.rSFT.json", dir / "toy_overtwisted.CH.json", "--bounds",
                      "word=5,weight=2"});
  REQUIRE(p.code == 0);
  CHECK(p.json()["certificate"]["element"] == "q:a");
  CHECK(run({"lift", dir / "toy_overtwisted.CH.json", dir / "toy_overtwisted.rSFT.json", "--element", "q:b"}).code == 1);
  CHECK(run({"enumerate", dir / "toy_overtwisted.contact.json", "--orbit", "a", "--bounds", "word=2"}).code == 0);
}

TEST_CASE("cli: usage and parse errors") {
  CHECK(run({"classify", "--no-such-flag"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"d2", "/nonexistent/file.json"}).code == 2);
  TempDir dir;
  io::write_file(dir.path / "bad.json", "{ \"version\": 1,, }");
  const auto r = run({"validate", dir / "bad.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 1") != std::string::npos);
}
