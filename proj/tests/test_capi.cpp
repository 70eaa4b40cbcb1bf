#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mdnmsaf/mdnmsaf.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Cfg {
  mdn_config* p = nullptr;
  Cfg() { REQUIRE(mdn_config_create(&p) == MDN_OK); }
  ~Cfg() { mdn_config_free(p); }
  void set(const char* k, const char* v) { REQUIRE(mdn_config_set(p, k, v) == MDN_OK); }
};

std::string run_csv(Cfg& c) {
  mdn_result* r = nullptr;
  REQUIRE(mdn_run(c.p, &r) == MDN_OK);
  std::string csv = mdn_result_csv(r);
  mdn_result_free(r);
  return csv;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(mdn_status_name(MDN_OK)) == "ok");
  CHECK(std::string(mdn_status_name(MDN_ERR_CAPACITY)).size() > 0);
  CHECK(std::string(mdn_version()).size() > 0);
}

TEST_CASE("null arguments are rejected") {
  CHECK(mdn_config_create(nullptr) == MDN_ERR_INVALID_ARGUMENT);
  mdn_result* r = nullptr;
  CHECK(mdn_run(nullptr, &r) == MDN_ERR_INVALID_ARGUMENT);
  CHECK(r == nullptr);
  CHECK(std::string(mdn_last_error()).size() > 0);
  CHECK(std::string(mdn_result_csv(nullptr)).empty());
  mdn_config_free(nullptr);
  mdn_result_free(nullptr);
}

TEST_CASE("config parsing, overrides and lookups") {
  mdn_config* c = nullptr;
  CHECK(mdn_config_parse("{not json", &c) == MDN_ERR_CONFIG);
  CHECK(mdn_config_load("/nonexistent/cfg.json", &c) == MDN_ERR_CONFIG);
  REQUIRE(mdn_config_parse("{\"step\": {\"mu\": 0.02}}", &c) == MDN_OK);
  const char* v = nullptr;
  REQUIRE(mdn_config_get(c, "step.mu", &v) == MDN_OK);
  CHECK(std::string(v) == "0.02");
  REQUIRE(mdn_config_get(c, "topology", &v) == MDN_OK);
  CHECK(std::string(v) == "n7");
  CHECK(mdn_config_get(c, "step.nothing", &v) != MDN_OK);
  CHECK(mdn_config_set(c, "step.mu", "0.03") == MDN_OK);
  REQUIRE(mdn_config_get(c, "step.mu", &v) == MDN_OK);
  CHECK(std::string(v) == "0.03");
  CHECK(mdn_config_set(c, "bogus.key", "1") == MDN_ERR_CONFIG);
  mdn_config_free(c);
}

TEST_CASE("run returns a curve with the documented header") {
  Cfg c;
  c.set("iterations", "100");
  c.set("trials", "2");
  mdn_result* r = nullptr;
  REQUIRE(mdn_run(c.p, &r) == MDN_OK);
  const std::string csv = mdn_result_csv(r);
  CHECK(csv.rfind("n,msd_db\n", 0) == 0);
  CHECK(mdn_result_length(r) == 100);
  CHECK(mdn_result_values(r)[0] == doctest::Approx(mdn_result_values(r)[0]));
  CHECK(mdn_result_diverged(r) == 0);
  CHECK(std::string(mdn_result_summary(r)).find("steady_state_db=") != std::string::npos);

  const auto path = (std::filesystem::temp_directory_path() / "mdn_capi_curve.csv").string();
  REQUIRE(mdn_result_write_csv(r, path.c_str()) == MDN_OK);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  std::filesystem::remove(path);
  CHECK(mdn_result_write_csv(r, "/nonexistent/dir/x.csv") == MDN_ERR_IO);
  mdn_result_free(r);
}

TEST_CASE("runs are reproducible through the C API") {
  Cfg a, b;
  for (Cfg* c : {&a, &b}) {
    c->set("iterations", "200");
    c->set("trials", "3");
  }
  b.set("threads", "2");
  CHECK(run_csv(a) == run_csv(b));
}

TEST_CASE("invalid values surface as config errors when used") {
  Cfg c;
  c.set("trials", "0");
  mdn_result* r = nullptr;
  CHECK(mdn_run(c.p, &r) == MDN_ERR_CONFIG);
  CHECK(r == nullptr);
}

TEST_CASE("theory beyond the cap reports a capacity error") {
  Cfg c;
  c.set("topology", "n15");
  c.set("M", "16");
  c.set("theory.samples", "200");
  c.set("theory.p_mode", "analytic");
  mdn_result* r = nullptr;
  const mdn_status s = mdn_theory(c.p, &r);
  if (s == MDN_OK) {
    // the bound is still reported; the curve is absent
    CHECK(std::string(mdn_result_summary(r)).find("note=") != std::string::npos);
    mdn_result_free(r);
  } else {
    CHECK(s == MDN_ERR_CAPACITY);
  }
}

TEST_CASE("complexity and presets") {
  Cfg c;
  c.set("topology", "n15");
  c.set("M", "16");
  mdn_result* r = nullptr;
  REQUIRE(mdn_complexity(c.p, &r) == MDN_OK);
  const std::string csv = mdn_result_csv(r);
  CHECK(csv.rfind("algorithm,multiplications,additions,dmi\n", 0) == 0);
  CHECK(csv.find("md-nmsaf,") != std::string::npos);
  mdn_result_free(r);

  REQUIRE(mdn_presets_list(&r) == MDN_OK);
  CHECK(std::string(mdn_result_csv(r)) == "n15\nn7\n");
  mdn_result_free(r);
}

TEST_CASE("signal dump") {
  Cfg c;
  mdn_result* r = nullptr;
  REQUIRE(mdn_signals(c.p, 5, &r) == MDN_OK);
  CHECK(std::string(mdn_result_csv(r)).rfind("n,node,u,v,d\n", 0) == 0);
  mdn_result_free(r);
  CHECK(mdn_signals(c.p, -1, &r) == MDN_ERR_INVALID_ARGUMENT);
}
