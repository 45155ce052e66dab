// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <thread>
#include <unistd.h>

#include "json.hpp"
#include "usco/usco.h"

using Json = nlohmann::json;

namespace {

/// Takes ownership of a library-allocated string.
std::string take(char* s) {
  std::string out = s ? s : "";
  usco_string_free(s);
  return out;
}

class CapiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("usco-capi-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) +
            "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

}  // namespace

TEST(Capi, VersionAndStatusNames) {
  EXPECT_STRNE(usco_version(), "");
  EXPECT_STREQ(usco_status_name(USCO_OK), "ok");
  EXPECT_STREQ(usco_status_name(USCO_ERR_INVALID_ARGUMENT), "invalid argument");
  EXPECT_STRNE(usco_status_name(USCO_ERR_FORMAT), usco_status_name(USCO_ERR_PARSE));
}

TEST(Capi, NullArgumentsAreRejected) {
  EXPECT_EQ(usco_gen_instance(nullptr, nullptr, 1, "x"), USCO_ERR_INVALID_ARGUMENT);
  EXPECT_STRNE(usco_last_error(), "");
  EXPECT_EQ(usco_model_info(nullptr, nullptr), USCO_ERR_INVALID_ARGUMENT);
  double beta = 0;
  EXPECT_EQ(usco_compute_beta(nullptr, 2, 10, 1.0, &beta), USCO_ERR_INVALID_ARGUMENT);
  usco_model_free(nullptr);
  usco_string_free(nullptr);
}

TEST(Capi, Formulas) {
  const double w[] = {1, 1, 1, 1};
  double beta = 0;
  ASSERT_EQ(usco_compute_beta(w, 4, 100, 1.0, &beta), USCO_OK);
  EXPECT_DOUBLE_EQ(beta, 4.0 * std::sqrt(2.0 * std::log(200.0)));
  const double bad[] = {1, 0};
  EXPECT_EQ(usco_compute_beta(bad, 2, 10, 1.0, &beta), USCO_ERR_DOMAIN);

  int64_t k = 0;
  ASSERT_EQ(usco_required_k(1, 1, 1, 0.1, 0.5, 0.1, 1024, &k), USCO_OK);
  EXPECT_EQ(k, 152493);
  EXPECT_EQ(usco_required_k(1, 1, 1, 0.1, 0.5, 1.0, 2, &k), USCO_ERR_DOMAIN);
}

TEST(Capi, ErrorsAreThreadLocal) {
  EXPECT_EQ(usco_gen_instance("tsp", "{}", 1, "/nonexistent/x"), USCO_ERR_CONFIG);
  const std::string mine = usco_last_error();
  std::thread([] {
    int64_t k = 0;
    EXPECT_EQ(usco_required_k(1, 1, 1, 0.1, 0.5, 0.1, 2, &k), USCO_OK);
    EXPECT_STREQ(usco_last_error(), "");
  }).join();
  EXPECT_EQ(usco_last_error(), mine);
}

TEST_F(CapiTest, TrainPredictSaveLoad) {
  ASSERT_EQ(usco_gen_instance("sbm", R"({"n": 8})", 1, path("inst").c_str()), USCO_OK) << usco_last_error();
  ASSERT_EQ(usco_gen_pool(path("inst").c_str(), "phi_0.3", 200, 2, 0, path("pool").c_str()), USCO_OK)
      << usco_last_error();
  ASSERT_EQ(usco_gen_pairs(path("inst").c_str(), 40, 3, path("pairs").c_str()), USCO_OK)
      << usco_last_error();

  usco_model* model = nullptr;
  const std::string opts = Json{{"k", 24}, {"seed", 4}, {"log_path", path("log")}}.dump();
  ASSERT_EQ(usco_train(path("inst").c_str(), path("pool").c_str(), path("pairs").c_str(), opts.c_str(),
                       &model),
            USCO_OK)
      << usco_last_error();
  EXPECT_TRUE(std::filesystem::exists(path("log")));

  char* info_raw = nullptr;
  ASSERT_EQ(usco_model_info(model, &info_raw), USCO_OK);
  const auto info = Json::parse(take(info_raw));
  EXPECT_EQ(info["family"], "sbm");
  EXPECT_EQ(info["sense"], "minimize");
  EXPECT_EQ(info["k"], 24);
  EXPECT_EQ(info["train_size"], 40);
  EXPECT_EQ(info["weights"].size(), 24u);

  const std::string input = R"({"left": [0, 3, 5], "right": [1, 2, 7]})";
  char* sol_raw = nullptr;
  ASSERT_EQ(usco_predict(model, input.c_str(), 0, 0, &sol_raw), USCO_OK) << usco_last_error();
  const auto sol = Json::parse(take(sol_raw));
  ASSERT_EQ(sol.size(), 3u);
  auto sorted = sol.get<std::vector<int>>();
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{1, 2, 7}));

  ASSERT_EQ(usco_model_save(model, path("model").c_str()), USCO_OK) << usco_last_error();
  usco_model* loaded = nullptr;
  ASSERT_EQ(usco_model_load(path("model").c_str(), &loaded), USCO_OK) << usco_last_error();
  char* again = nullptr;
  ASSERT_EQ(usco_predict(loaded, input.c_str(), 0, 0, &again), USCO_OK);
  EXPECT_EQ(Json::parse(take(again)), sol);

  // Perturbed predictions are reproducible per seed and still feasible.
  char* p1 = nullptr;
  char* p2 = nullptr;
  ASSERT_EQ(usco_predict(loaded, input.c_str(), 1, 9, &p1), USCO_OK) << usco_last_error();
  ASSERT_EQ(usco_predict(loaded, input.c_str(), 1, 9, &p2), USCO_OK);
  EXPECT_EQ(take(p1), take(p2));

  char* bad = nullptr;
  EXPECT_EQ(usco_predict(loaded, R"({"left": [0, 1], "right": [1]})", 0, 0, &bad), USCO_ERR_DOMAIN);
  EXPECT_EQ(usco_predict(loaded, "{not json", 0, 0, &bad), USCO_ERR_PARSE);
  EXPECT_EQ(bad, nullptr);

  usco_model_free(model);
  usco_model_free(loaded);
}

TEST_F(CapiTest, ConfigurationErrors) {
  ASSERT_EQ(usco_gen_instance("sbm", R"({"n": 6})", 1, path("inst").c_str()), USCO_OK);
  ASSERT_EQ(usco_gen_pool(path("inst").c_str(), "phi_uni", 10, 2, 0, path("pool").c_str()), USCO_OK);
  ASSERT_EQ(usco_gen_pairs(path("inst").c_str(), 10, 3, path("pairs").c_str()), USCO_OK);
  usco_model* model = nullptr;
  EXPECT_EQ(usco_train(path("inst").c_str(), path("pool").c_str(), path("pairs").c_str(), R"({"k": 11})",
                       &model),
            USCO_ERR_CONFIG);
  EXPECT_NE(std::string(usco_last_error()).find("K"), std::string::npos) << usco_last_error();
  EXPECT_EQ(usco_train(path("inst").c_str(), path("pool").c_str(), path("pairs").c_str(), R"({"eta": -1})",
                       &model),
            USCO_ERR_CONFIG);
  EXPECT_EQ(usco_gen_pool(path("inst").c_str(), "phi_exp", 10, 2, 0, path("p2").c_str()), USCO_ERR_CONFIG);
  EXPECT_EQ(usco_model_load(path("missing").c_str(), &model), USCO_ERR_IO);
  EXPECT_EQ(model, nullptr);
}

TEST_F(CapiTest, EvalAndReproduceReports) {
  ASSERT_EQ(usco_gen_instance("sbm", R"({"n": 8})", 1, path("inst").c_str()), USCO_OK);
  ASSERT_EQ(usco_gen_pool(path("inst").c_str(), "phi_true", 100, 2, 0, path("pool").c_str()), USCO_OK);
  ASSERT_EQ(usco_gen_pairs(path("inst").c_str(), 60, 3, path("pairs").c_str()), USCO_OK);
  const std::string cfg = Json{{"instance", path("inst")},
                               {"pairs", path("pairs")},
                               {"pools", {path("pool")}},
                               {"k", {8, 16}},
                               {"train_size", 20},
                               {"test_size", 40},
                               {"runs", 2},
                               {"seed", 5}}
                              .dump();
  char* csv1 = nullptr;
  char* csv2 = nullptr;
  ASSERT_EQ(usco_eval(cfg.c_str(), &csv1), USCO_OK) << usco_last_error();
  ASSERT_EQ(usco_eval(cfg.c_str(), &csv2), USCO_OK);
  const auto a = take(csv1);
  EXPECT_EQ(a, take(csv2));
  EXPECT_EQ(a.rfind("dataset,dist,K,runs,mean_ratio,std_ratio,excluded,wall_time_s\n", 0), 0u);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 4);  // header, two K rows, Rand

  char* out = nullptr;
  const std::string opts = R"({"dist": ["phi_0.3"], "k": [8], "runs": 1, "train_size": 20,
                               "test_size": 20, "report": true})";
  ASSERT_EQ(usco_reproduce("sbm", opts.c_str(), &out), USCO_OK) << usco_last_error();
  const auto report = Json::parse(take(out));
  EXPECT_TRUE(report.contains("csv"));
  ASSERT_EQ(report["rows"].size(), 2u);
  EXPECT_EQ(report["rows"][0]["dist"], "phi_0.3");
  EXPECT_EQ(report["rows"][0]["runs"], 1);
  EXPECT_EQ(report["runs"].size(), 2u);

  EXPECT_EQ(usco_reproduce("sbm", R"({"runs": 0})", &out), USCO_ERR_CONFIG);
  EXPECT_EQ(usco_reproduce("knapsack", nullptr, &out), USCO_ERR_CONFIG);
}
