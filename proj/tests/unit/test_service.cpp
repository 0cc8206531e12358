#include <gtest/gtest.h>

#include "interface_drive.hpp"

namespace greybox::service {
namespace {

using testing::TempDir;

constexpr std::int64_t kEpoch = 1700000000;

nlohmann::json participants() {
  return nlohmann::json::array({{{"person", "Ann"}, {"role", "client"}}, {{"person", "Bo"}, {"role", "optimizer"}}});
}

class Http : public ::testing::Test {
 protected:
  TempDir dir{"http"};
  SessionService svc{{dir.path(), [] { return testing::at(kEpoch); }, nullptr}};
  testing::LiveServer server{svc};
  httplib::Client cli = server.client();

  httplib::Result post(const std::string& path, const nlohmann::json& body) {
    return cli.Post(path.c_str(), body.dump(), "application/json");
  }
  nlohmann::json body(const httplib::Result& r) { return nlohmann::json::parse(r->body); }
};

TEST_F(Http, CreateNextAndStatuses) {
  ASSERT_GT(server.port(), 0);
  auto created = post("/sessions", {{"id", "s1"}, {"participants", participants()}});
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  // Participants answer item1 on creation.
  EXPECT_EQ(body(created).at("revision"), 1);
  EXPECT_EQ(body(created).at("next").at("id"), "item2");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "s1.session"));

  EXPECT_EQ(post("/sessions", {{"id", "s1"}, {"participants", participants()}})->status, 409);
  EXPECT_EQ(cli.Get("/sessions/nope/next")->status, 404);
  EXPECT_EQ(post("/sessions", {{"id", "s2"}})->status, 400);
  EXPECT_EQ(cli.Post("/sessions", "{not json", "application/json")->status, 400);
  EXPECT_EQ(post("/sessions", {{"id", "s3"}, {"participants", nlohmann::json::array()}})->status, 422);

  auto ans = post("/sessions/s1/answers", {{"revision", 1}, {"instance", "item3"}, {"value", "context"}});
  ASSERT_TRUE(ans);
  EXPECT_EQ(ans->status, 200) << ans->body;
  EXPECT_EQ(body(ans).at("revision"), 2);

  auto stale = post("/sessions/s1/answers", {{"revision", 1}, {"instance", "item3"}, {"value", "again"}});
  EXPECT_EQ(stale->status, 409);
  EXPECT_EQ(body(stale).at("details").at("current"), 2);

  auto mismatch = post("/sessions/s1/answers", {{"revision", 2}, {"instance", "item2"}, {"value", 42}});
  EXPECT_EQ(mismatch->status, 422);
  EXPECT_EQ(body(mismatch).at("error"), "AnswerTypeMismatch");

  EXPECT_EQ(post("/sessions/s1/answers", {{"revision", 2}, {"instance", "item2"}})->status, 400);
  EXPECT_EQ(post("/sessions/s1/skips", {{"revision", 2}, {"instance", "item2"}, {"reason", ""}})->status, 422);
  EXPECT_EQ(cli.Get("/sessions/s1/spec")->status, 422);

  auto fin = post("/sessions/s1/finalize", {{"revision", 2}});
  EXPECT_EQ(fin->status, 422);
  EXPECT_EQ(body(fin).at("error"), "IncompleteSession");

  auto tpl = cli.Get("/templates/default");
  ASSERT_TRUE(tpl);
  EXPECT_EQ(tpl->status, 200);
  EXPECT_EQ(body(tpl).at("items").size(), 10u);
}

TEST_F(Http, JumpToPendingInstance) {
  post("/sessions", {{"id", "j"}, {"participants", participants()}});
  auto r = cli.Get("/sessions/j/next?jump=item9");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(body(r).at("next").at("id"), "item9");
  EXPECT_EQ(cli.Get("/sessions/j/next?jump=item99")->status, 422);
}

TEST_F(Http, ServiceRestartReloadsSessionFromDisk) {
  post("/sessions", {{"id", "keep"}, {"participants", participants()}});
  post("/sessions/keep/answers", {{"revision", 1}, {"instance", "item3"}, {"value", "ctx"}});
  SessionService fresh({dir.path(), [] { return testing::at(kEpoch); }, nullptr});
  const auto view = fresh.next("keep");
  EXPECT_EQ(view.status, 200);
  EXPECT_EQ(view.body.at("revision"), 2);
}

TEST(Interfaces, WalkthroughFilesIdentical) {
  const auto script = testing::load_script();
  TempDir a("cli"), b("http");
  const auto via_cli = testing::drive_cli(script, a.path(), kEpoch);
  ASSERT_TRUE(via_cli.ok) << via_cli.failure;
  const auto via_http = testing::drive_http(script, b.path(), kEpoch);
  ASSERT_TRUE(via_http.ok) << via_http.failure;
  EXPECT_EQ(testing::read_text(via_cli.session_file), testing::read_text(via_http.session_file));
  EXPECT_EQ(testing::read_text(via_cli.spec_file), testing::read_text(via_http.spec_file));
  // One revision for creation, one per step, one for finalize.
  EXPECT_EQ(checklist::load_session(testing::read_text(via_cli.session_file), checklist::default_template_ptr()).revision,
            static_cast<std::uint64_t>(script.steps.size() + 2));
}

TEST(Cli, ExitCodes) {
  TempDir dir("codes");
  const auto log = dir.path() / "log";
  auto run = [&](const std::string& args) { return testing::run_cli(args, kEpoch, log); };
  const auto spec = testing::fixture_path("specs/convex_gradient.json").string();
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("validate " + spec), 0);
  EXPECT_EQ(run("recommend " + spec + " --format md"), 0);
  EXPECT_EQ(run("qrak --known yes --a-priori yes --relaxable yes --quantifiable yes"), 0);
  EXPECT_EQ(run("qrak --known no --a-priori yes"), 8);

  std::ofstream(dir.path() / "broken.json") << "{\"version\": 1,";
  EXPECT_EQ(run("validate " + (dir.path() / "broken.json").string()), 3);
  auto future = nlohmann::json::parse(testing::fixture("specs/convex_gradient.json"));
  future["schema_version"] = 999;
  std::ofstream(dir.path() / "future.json") << future.dump();
  EXPECT_EQ(run("validate " + (dir.path() / "future.json").string()), 4);
  EXPECT_EQ(run("validate " + (dir.path() / "missing.json").string()), 10);

  const auto session = (dir.path() / "s.session").string();
  EXPECT_EQ(run("intake new --participants A:client,B:optimizer --out " + session), 0);
  EXPECT_EQ(run("intake finalize " + session), 6);
  EXPECT_EQ(run("intake export " + session), 9);
  EXPECT_EQ(run("intake answer " + session + " --item item2 --value 42"), 8);
  EXPECT_EQ(run("intake next " + session + " --format md"), 0);
}

TEST(Cli, BenchMatchesGoldenCsv) {
  TempDir dir("bench");
  const auto out = dir.path() / "out.csv";
  EXPECT_EQ(testing::run_cli("bench " + testing::fixture_path("bench_degeneracy.json").string() + " --threads 3 --out " +
                                 out.string(),
                             kEpoch, dir.path() / "log"),
            0);
  EXPECT_EQ(testing::read_text(out), testing::fixture("bench_degeneracy.csv"));
}

}  // namespace
}  // namespace greybox::service
