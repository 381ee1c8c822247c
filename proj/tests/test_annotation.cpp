#include "forge/annotation_server.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace forge;
using json = nlohmann::json;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("forge_ann_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<SentencePair> numbered(const std::string& tag, std::size_t n) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({tag + " en " + std::to_string(i), tag + " xx " + std::to_string(i), {}});
  return out;
}

fs::path make_samples(const std::string& name, std::size_t per_stratum) {
  const auto dir = temp_dir(name);
  StratifiedSample s{numbered("a", per_stratum), numbered("b", per_stratum), numbered("both", per_stratum)};
  write_samples(s, dir / "samples");
  return dir;
}

// Judges every pair of `stratum` so that the tally equals `counts`.
void judge_to(AnnotationSession& s, Stratum stratum, const std::array<std::size_t, 7>& counts) {
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t k = 0; k < counts[c]; ++k) {
      const auto p = s.next_pair(stratum);
      ASSERT_TRUE(p);
      s.record_judgment(p->pair_id, kAllCategories[c]);
    }
  }
}

constexpr std::array<std::size_t, 7> kBothCounts = {79, 0, 3, 3, 0, 10, 5};
constexpr std::array<std::size_t, 7> kOnlyEmbedCounts = {26, 0, 23, 18, 0, 20, 13};
constexpr std::array<std::size_t, 7> kOnlyLengthCounts = {41, 0, 24, 14, 1, 18, 2};

}  // namespace

TEST(Samples, WriteAndLoadLayout) {
  const auto dir = make_samples("layout", 3);
  const auto samples = load_samples(dir / "samples");
  ASSERT_EQ(samples.size(), 9u);
  EXPECT_EQ(samples[0].pair_id, "only_a-0");
  EXPECT_EQ(samples[3].pair_id, "only_b-0");
  EXPECT_EQ(samples[8].pair_id, "both-2");
  EXPECT_EQ(samples[8].en, "both en 2");
  EXPECT_THROW(load_samples(dir / "missing"), Error);
}

TEST(Session, NextPairOrderAndExhaustion) {
  const auto dir = make_samples("next", 2);
  AnnotationSession s("s1", load_samples(dir / "samples"), dir / "s1.jsonl");
  EXPECT_EQ(s.next_pair(Stratum::Both)->pair_id, "both-0");
  s.record_judgment("both-0", "valid_translation");
  EXPECT_EQ(s.next_pair(Stratum::Both)->pair_id, "both-1");
  s.record_judgment("both-1", "free_translation");
  EXPECT_FALSE(s.next_pair(Stratum::Both));
  EXPECT_EQ(s.next_pair(Stratum::OnlyA)->pair_id, "only_a-0");
}

TEST(Session, LaterJudgmentOverwrites) {
  const auto dir = make_samples("overwrite", 2);
  AnnotationSession s("s1", load_samples(dir / "samples"), dir / "s1.jsonl");
  s.record_judgment("only_b-1", "wrong_language");
  const auto t = s.record_judgment("only_b-1", "valid_translation");
  EXPECT_EQ(t.total(), 1u);
  EXPECT_EQ(t[AnnotationCategory::ValidTranslation], 1u);
  EXPECT_EQ(t[AnnotationCategory::WrongLanguage], 0u);
  EXPECT_EQ(s.history().size(), 2u);
  AnnotationSession again("s1", load_samples(dir / "samples"), dir / "s1.jsonl");
  EXPECT_EQ(again.tally(Stratum::OnlyB), t);
}

TEST(Session, RejectsUnknownCategoryAndPair) {
  const auto dir = make_samples("reject", 1);
  AnnotationSession s("s1", load_samples(dir / "samples"), dir / "s1.jsonl");
  EXPECT_THROW(s.record_judgment("both-0", "Spam"), RejectedJudgment);
  EXPECT_THROW(s.record_judgment("both-7", "valid_translation"), RejectedJudgment);
  EXPECT_EQ(s.tally(Stratum::Both).total(), 0u);
  EXPECT_FALSE(fs::exists(dir / "s1.jsonl"));
}

TEST(Session, PublishedTalliesReplayToAccuracies) {
  const auto dir = make_samples("table", 100);
  AnnotationSession s("ta", load_samples(dir / "samples"), dir / "ta.jsonl");
  judge_to(s, Stratum::Both, kBothCounts);
  judge_to(s, Stratum::OnlyA, kOnlyLengthCounts);
  judge_to(s, Stratum::OnlyB, kOnlyEmbedCounts);
  const auto exported = json::parse(s.export_tally().dump());
  const auto tallies = tallies_from_export(exported);
  EXPECT_EQ(tallies.at(Stratum::Both).counts, kBothCounts);
  EXPECT_EQ(accuracy(tallies.at(Stratum::Both), AccuracyMode::Conservative), 0.79);
  EXPECT_EQ(accuracy(tallies.at(Stratum::Both), AccuracyMode::Liberal), 0.94);
  EXPECT_EQ(exported["strata"]["both"]["completion"], 1.0);
  EXPECT_EQ(exported["strata"]["both"]["counts"]["valid_translation"], 79);
}

TEST(Session, CrashReplayReproducesTally) {
  const auto dir = make_samples("crash", 30);
  Rng rng(9);
  StratumTally live;
  {
    AnnotationSession s("c", load_samples(dir / "samples"), dir / "c.jsonl");
    for (int k = 0; k < 200; ++k) {
      const auto stratum = kAllStrata[rng.index(3)];
      const std::string pid = std::string(to_string(stratum)) + "-" + std::to_string(rng.index(30));
      s.record_judgment(pid, kAllCategories[rng.index(7)]);
    }
    live = s.tally(Stratum::OnlyA);
  }  // process "dies": nothing beyond the log survives
  AnnotationSession reloaded("c", load_samples(dir / "samples"), dir / "c.jsonl");
  EXPECT_EQ(reloaded.tally(Stratum::OnlyA), live);
  EXPECT_TRUE(reloaded.load_warnings().empty());
}

TEST(Session, TornFinalLineIsDropped) {
  const auto dir = make_samples("torn", 2);
  {
    AnnotationSession s("t", load_samples(dir / "samples"), dir / "t.jsonl");
    s.record_judgment("both-0", "valid_translation");
  }
  write_file(dir / "t.jsonl", read_file(dir / "t.jsonl") + "{\"seq\":1,\"pair_id\":\"both-1\",\"categ");
  AnnotationSession s("t", load_samples(dir / "samples"), dir / "t.jsonl");
  EXPECT_EQ(s.tally(Stratum::Both).total(), 1u);
  EXPECT_EQ(s.load_warnings().size(), 1u);
}

TEST(Session, IdValidation) {
  EXPECT_TRUE(valid_session_id("ta-en_01"));
  EXPECT_FALSE(valid_session_id(""));
  EXPECT_FALSE(valid_session_id("../x"));
  EXPECT_FALSE(valid_session_id(std::string(65, 'a')));
}

// --- HTTP API ---------------------------------------------------------------

class ApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = make_samples("api_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()), 2);
    service_ = std::make_unique<AnnotationService>(AnnotationServerConfig{dir_ / "samples", {}, {}, "127.0.0.1", 0});
    port_ = service_->bind_any();
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { service_->listen_after_bind(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  httplib::Result post_judgment(const std::string& session, const std::string& body) {
    return client_->Post("/session/" + session + "/judgment", body, "application/json");
  }

  fs::path dir_;
  std::unique_ptr<AnnotationService> service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ApiTest, NextJudgeTallyLoop) {
  auto r = client_->Get("/session/s1/next?stratum=only_a");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  auto j = json::parse(r->body);
  EXPECT_FALSE(j["exhausted"].get<bool>());
  EXPECT_EQ(j["pair"]["pair_id"], "only_a-0");
  EXPECT_EQ(j["pair"]["en"], "a en 0");

  r = post_judgment("s1", R"({"pair_id":"only_a-0","category":"incorrect_alignment","annotator":"r1"})");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  j = json::parse(r->body);
  EXPECT_EQ(j["tally"]["incorrect_alignment"], 1);
  EXPECT_EQ(j["stratum"], "only_a");

  r = client_->Get("/session/s1/next?stratum=only_a");
  EXPECT_EQ(json::parse(r->body)["pair"]["pair_id"], "only_a-1");
  post_judgment("s1", R"({"pair_id":"only_a-1","category":"valid_translation"})");
  r = client_->Get("/session/s1/next?stratum=only_a");
  j = json::parse(r->body);
  EXPECT_TRUE(j["exhausted"].get<bool>());
  EXPECT_TRUE(j["pair"].is_null());

  r = client_->Get("/session/s1/tally");
  ASSERT_EQ(r->status, 200);
  j = json::parse(r->body);
  EXPECT_EQ(j["strata"]["only_a"]["judged"], 2);
  EXPECT_EQ(j["strata"]["only_a"]["completion"], 1.0);
  EXPECT_EQ(j["strata"]["both"]["judged"], 0);
  EXPECT_TRUE(fs::exists(dir_ / "samples" / "sessions" / "s1.jsonl"));
}

TEST_F(ApiTest, BadJudgmentsAre400AndChangeNothing) {
  for (const std::string body : {R"({"pair_id":"both-0","category":"Spam"})", R"({"pair_id":"nope","category":"valid_translation"})",
                                 "not json", R"({"pair_id":3})", "[]"}) {
    const auto r = post_judgment("s2", body);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400) << body;
    EXPECT_TRUE(json::parse(r->body).contains("error"));
  }
  const auto j = json::parse(client_->Get("/session/s2/tally")->body);
  for (auto st : kAllStrata) EXPECT_EQ(j["strata"][std::string(to_string(st))]["judged"], 0);
  EXPECT_EQ(client_->Get("/session/s2/next?stratum=sideways")->status, 400);
  EXPECT_EQ(client_->Get("/session/bad.id/tally")->status, 400);
}

TEST_F(ApiTest, HistoryAndPairLookup) {
  post_judgment("s3", R"({"pair_id":"both-1","category":"mt_translation","annotator":"r2"})");
  post_judgment("s3", R"({"pair_id":"both-1","category":"translation_error"})");
  auto j = json::parse(client_->Get("/session/s3/history")->body);
  ASSERT_EQ(j["history"].size(), 2u);
  EXPECT_EQ(j["history"][0]["annotator"], "r2");
  EXPECT_EQ(j["history"][1]["category"], "translation_error");
  j = json::parse(client_->Get("/session/s3/pair/both-1")->body);
  EXPECT_EQ(j["category"], "translation_error");
  EXPECT_EQ(j["xx"], "both xx 1");
  EXPECT_EQ(client_->Get("/session/s3/pair/zzz")->status, 404);
}

TEST_F(ApiTest, SessionsAreIndependentAndRootServes) {
  post_judgment("x", R"({"pair_id":"both-0","category":"valid_translation"})");
  const auto j = json::parse(client_->Get("/session/y/tally")->body);
  EXPECT_EQ(j["strata"]["both"]["judged"], 0);
  const auto root = client_->Get("/");
  ASSERT_TRUE(root);
  EXPECT_EQ(root->status, 200);
  EXPECT_NE(root->body.find("/session/"), std::string::npos);
}

TEST_F(ApiTest, ConcurrentJudgmentsAllLogged) {
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([this, w] {
      httplib::Client c("127.0.0.1", port_);
      for (int k = 0; k < 10; ++k) {
        const std::string pid = k % 2 ? "only_b-0" : "both-1";
        c.Post("/session/conc/judgment",
               std::string(R"({"pair_id":")") + pid + R"(","category":"valid_translation","annotator":"w)" +
                   std::to_string(w) + "\"}",
               "application/json");
      }
    });
  }
  for (auto& t : workers) t.join();
  EXPECT_EQ(read_lines(dir_ / "samples" / "sessions" / "conc.jsonl").size(), 40u);
  AnnotationSession reloaded("conc", load_samples(dir_ / "samples"), dir_ / "samples" / "sessions" / "conc.jsonl");
  EXPECT_EQ(reloaded.history().size(), 40u);
  EXPECT_EQ(reloaded.tally(Stratum::Both).total(), 1u);
}
