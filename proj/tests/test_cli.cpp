#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qdyn/cli.hpp"
#include "qdyn/errors.hpp"
#include "qdyn/traces.hpp"

using namespace qdyn;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qdyn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "qdyn_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config text round trip") {
  cli::RunConfig c;
  c.command = "dynamics";
  c.model = Model::ThueMorse;
  c.lambda = 0.1 + 0.2;
  c.p = {2.0, 8.0};
  c.energy = -1.0 / 3.0;
  c.has_energy = true;
  c.geometry = Geometry::HalfLineDirichlet;
  const auto back = cli::parse_text(cli::to_text(c));
  CHECK(cli::to_text(back) == cli::to_text(c));
  CHECK(back.lambda == c.lambda);
  CHECK(back.energy == c.energy);
  CHECK(back.p == c.p);
  CHECK(back.model == Model::ThueMorse);
}

TEST_CASE("config hash ignores threads and output prefix only") {
  cli::RunConfig a;
  a.command = "spectrum";
  auto b = a;
  b.threads = 8;
  b.out = "/tmp/elsewhere";
  CHECK(cli::config_hash(a) == cli::config_hash(b));
  b.lambda = 2.0;
  CHECK(cli::config_hash(a) != cli::config_hash(b));
  CHECK(cli::config_hash_hex(a).size() == 16);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  CHECK_THROWS_AS(cli::parse_text("colour = blue\n"), DomainError);
  CHECK_THROWS_AS(cli::parse_text("lambda = abc\n"), DomainError);
  const auto c = cli::parse_text("# comment\n\nlambda = 3\n");
  CHECK(c.lambda == 3.0);
  cli::RunConfig bad;
  bad.command = "spectrum";
  bad.lambda = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("spectrum reports F_k bands") {
  const auto r = invoke({"spectrum", "--lambda", "5", "--k", "8"});
  REQUIRE(r.code == cli::kOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["result"]["bands"] == 34);
  CHECK(doc["meta"]["convention"] == convention_id());
}

TEST_CASE("usage errors exit with code 2 and a JSON record") {
  const auto r = invoke({"spectrum", "--lambda", "-1"});
  CHECK(r.code == cli::kUsage);
  const auto rec = json::parse(r.err);
  CHECK(rec["error"]["exit_code"] == 2);
  CHECK(invoke({"nonsense"}).code == cli::kUsage);
  CHECK(invoke({"verify"}).code == cli::kUsage);
  CHECK(invoke({"verify", "bogus"}).code == cli::kUsage);
}

TEST_CASE("verify invariant passes") {
  const auto r = invoke({"verify", "invariant", "--lambda", "2", "--samples", "50"});
  CHECK(r.code == cli::kOk);
  CHECK(json::parse(r.out)["result"]["pass"] == true);
}

TEST_CASE("dynamics refuses to exceed the budget") {
  const auto r = invoke({"dynamics", "--model", "free", "--Tmax", "1e6", "--budget", "1e6"});
  CHECK(r.code == cli::kResource);
  CHECK(json::parse(r.err)["error"]["type"] == "resource");
}

TEST_CASE("flags override the config file") {
  const auto path = scratch("override.cfg");
  std::ofstream(path) << "lambda = 5\nk = 6\n";
  auto r = invoke({"spectrum", "--config", path.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(json::parse(r.out)["result"]["bands"] == 13);
  r = invoke({"spectrum", "--config", path.string(), "--k", "7"});
  REQUIRE(r.code == cli::kOk);
  CHECK(json::parse(r.out)["result"]["bands"] == 21);
  CHECK(invoke({"spectrum", "--config", scratch("missing.cfg").string()}).code == cli::kUsage);
}

TEST_CASE("outputs are byte-identical across thread counts") {
  const std::string exe = QDYN_CLI_PATH;
  const std::vector<std::string> jobs{
      "spectrum --lambda 5 --k 9",
      "verify parseval --model tm --lambda 1 --T 10",
      "dynamics --model pd --lambda 1 --Tmin 3 --Tmax 100 --per-decade 4 --p 2,8",
  };
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto one = scratch("det" + std::to_string(j) + "_t1");
    const auto four = scratch("det" + std::to_string(j) + "_t4");
    const int c1 = std::system((exe + " " + jobs[j] + " --threads 1 --out " + one.string() + " 2>/dev/null").c_str());
    const int c4 = std::system((exe + " " + jobs[j] + " --threads 4 --out " + four.string() + " 2>/dev/null").c_str());
    INFO(jobs[j]);
    CHECK(c1 == c4);
    CHECK(!slurp(one.string() + ".json").empty());
    for (const char* ext : {".json", ".csv"}) CHECK(slurp(one.string() + ext) == slurp(four.string() + ext));
    CHECK(std::filesystem::exists(one.string() + ".run.json"));
  }
}
