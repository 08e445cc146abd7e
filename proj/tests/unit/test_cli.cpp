#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "json.hpp"

using namespace qvo;
using namespace qvo::test;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(QVO_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "qvo_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const json& j) {
  auto p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p.string();
}

Matrix matrix_of(const json& m) { return Matrix::from_json(m.at("matrix"), QMode::Exact()); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check") {
    Run r = run("check --suite ybe --cartan A1");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("config").at("cartan") == "A1");
    Run a = run("check --suite abrr --lambda 1/3 --lambda 2/5");
    CHECK(a.code == 0);
    Run bad = run("check --suite abrr --lambda 1", true);
    CHECK(bad.code == 2);
    CHECK(bad.out.find("weight not generic") != std::string::npos);
    CHECK(run("check --suite nope").code == 2);
    CHECK(run("check --suite ybe --cartan Z9").code == 2);
    CHECK(run("check --suite ybe --q float:1:1e-9").code == 2);
  }

  TEST_CASE("eval") {
    json env{{"modules", {{"V", "L(1)"}}}};
    json id{{"mode", "braid"}, {"slices", json::array({json::array({{{"tile", "id"}, {"obj", {"V"}}}})})}};
    json cr{{"mode", "braid"}, {"slices", json::array({json::array({{{"tile", "cross"}, {"a", "V"}, {"b", "V"}}})})}};
    std::string envf = write("env.json", env), idf = write("id.json", id), crf = write("cross.json", cr);
    Run r = run("eval " + idf + " --env " + envf);
    REQUIRE(r.code == 0);
    require_equal(matrix_of(json::parse(r.out).at("map")), Matrix::identity(2));
    Run c = run("eval " + crf + " --env " + envf);
    REQUIRE(c.code == 0);
    Matrix m = matrix_of(json::parse(c.out).at("map"));
    CHECK(m.rows() == 4);
    CHECK(m.cols() == 4);
    Run cmp = run("eval " + crf + " --env " + envf + " --compare " + crf);
    CHECK(cmp.code == 0);
    CHECK(json::parse(cmp.out).at("dot_equal") == true);
    Run diff = run("eval " + crf + " --env " + envf + " --compare " + idf);
    CHECK(diff.code != 0);
    std::string broken = (scratch() / "broken.json").string();
    std::ofstream(broken) << "{";
    CHECK(run("eval " + broken + " --env " + envf).code == 2);
  }

  TEST_CASE("dump") {
    Run f = run("dump fusion --lambda 1/3");
    REQUIRE(f.code == 0);
    Matrix j = matrix_of(json::parse(f.out));
    CHECK(j.rows() == 4);
    Run rb = run("dump ribbon --module \"M(1/3)\"");
    REQUIRE(rb.code == 0);
    json rj = json::parse(rb.out);
    REQUIRE(rj.contains("scalar"));
    // ⟨λ,λ+2ρ⟩ = (1/3)(1/3+2)⟨ϖ,ϖ⟩ with ⟨ϖ,ϖ⟩ = 1/2
    CHECK(rj["scalar"]["exponent"] == "7/18");
    Run rm = run("dump rmatrix --module 1 --module \"L(1)\"");
    REQUIRE(rm.code == 0);
    require_equal(matrix_of(json::parse(rm.out)), Matrix::identity(2));
    CHECK(run("dump fusion").code == 2);
    CHECK(run("dump nothing").code == 2);
  }

  TEST_CASE("dump cache") {
    auto dir = scratch() / "cache";
    std::filesystem::remove_all(dir);
    std::string pre = "QVO_CACHE_DIR=" + dir.string() + " ";
    std::string cmd = std::string(QVO_CLI_PATH) + " dump fusion --lambda 2/5 > " + (scratch() / "a.json").string();
    REQUIRE(std::system((pre + cmd).c_str()) == 0);
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
    std::string cmd2 = std::string(QVO_CLI_PATH) + " dump fusion --lambda 2/5 > " + (scratch() / "b.json").string();
    REQUIRE(std::system((pre + cmd2).c_str()) == 0);
    std::ifstream a(scratch() / "a.json"), b(scratch() / "b.json");
    CHECK(json::parse(a) == json::parse(b));
  }
}
