#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "formabench/bench/generator.hpp"
#include "formabench/model_client.hpp"
#include "formabench/oracle_client.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/pddl/printer.hpp"
#include "support/fixtures.hpp"

using namespace formabench;

namespace {

ModelRequest make_request(const std::string& task_id,
                          const std::string& pipeline,
                          const std::string& step,
                          const std::string& prompt = "hello") {
  ModelRequest req;
  ModelRequest::Message msg;
  msg.parts.push_back({ModelRequest::Part::Kind::Text, prompt, {}, ""});
  req.messages.push_back(msg);
  req.meta = {task_id, pipeline, step, ""};
  return req;
}

}  // namespace

TEST_CASE("scripted client replays fixtures by key", "[model-client]") {
  ScriptedClient client;
  client.add("t1", "direct-p", "problem", "the fixture text");
  ModelResponse resp = client.complete(make_request("t1", "direct-p",
                                                    "problem"));
  CHECK(resp.text == "the fixture text");
  CHECK(resp.model_id == "scripted");
  CHECK(resp.usage.calls == 1);
  CHECK(resp.usage.estimated);
  CHECK(resp.usage.prompt_tokens == 1);   // "hello" is 5 chars -> 1 token
  CHECK(resp.usage.response_tokens == 4);  // 16 chars -> 4 tokens
}

TEST_CASE("missing scripted fixture is an explicit error", "[model-client]") {
  ScriptedClient client;
  client.add("t1", "direct-p", "problem", "x");
  CHECK_THROWS_AS(client.complete(make_request("t1", "direct-p", "caption")),
                  FixtureMissing);
  CHECK_THROWS_AS(client.complete(make_request("t2", "direct-p", "problem")),
                  FixtureMissing);
}

TEST_CASE("oracle without corruption reproduces the ground truth",
          "[model-client]") {
  GeneratorConfig gen;
  gen.num_blocks = 4;
  gen.rng_seed = 11;
  TaskInstance task = generate_blocksworld(gen);
  Domain d = parse_domain(task.domain_text);
  Problem gt = parse_problem(task.gt_problem_text, d);

  OracleClient oracle(OracleConfig{});
  oracle.add_task(task);
  ModelRequest req = make_request(task.task_id, "direct-p", "problem");
  ModelResponse resp = oracle.complete(req);
  // Strip the code fence and compare the parsed problems.
  std::string text = resp.text;
  std::size_t open = text.find("```\n");
  std::size_t close = text.rfind("```");
  REQUIRE(open != std::string::npos);
  std::string inner = text.substr(open + 4, close - open - 4);
  CHECK(parse_problem(inner, d) == gt);
}

TEST_CASE("oracle corruption is deterministic per (seed, task)",
          "[model-client]") {
  GeneratorConfig gen;
  gen.num_blocks = 5;
  gen.rng_seed = 2;
  TaskInstance task = generate_blocksworld(gen);

  OracleConfig config;
  config.drop_init_rate = 0.4;
  config.rename_rate = 0.4;
  config.rng_seed = 99;
  OracleClient a(config), b(config);
  Problem va = a.corrupted_problem(task);
  Problem vb = b.corrupted_problem(task);
  CHECK(va == vb);
  // Different seed, different draws (overwhelmingly likely at these rates).
  config.rng_seed = 100;
  OracleClient c(config);
  CHECK_FALSE(c.corrupted_problem(task) == va);
  // Steps of one task agree: the problem step renders the same view.
  CHECK(a.respond(task, "problem", "") == b.respond(task, "problem", ""));
}

TEST_CASE("drop rate one empties the corrupted init", "[model-client]") {
  GeneratorConfig gen;
  gen.num_blocks = 3;
  gen.rng_seed = 5;
  TaskInstance task = generate_blocksworld(gen);
  OracleConfig config;
  config.drop_init_rate = 1.0;
  OracleClient oracle(config);
  Problem view = oracle.corrupted_problem(task);
  CHECK(view.init.empty());
  CHECK_FALSE(view.goal.empty());  // goals are renamed, never dropped
}

TEST_CASE("rename rate one suffixes every object", "[model-client]") {
  GeneratorConfig gen;
  gen.num_blocks = 3;
  gen.rng_seed = 5;
  TaskInstance task = generate_blocksworld(gen);
  OracleConfig config;
  config.rename_rate = 1.0;
  OracleClient oracle(config);
  Problem view = oracle.corrupted_problem(task);
  for (const auto& obj : view.objects) {
    CHECK(obj.name.size() > 2);
    CHECK(obj.name.substr(obj.name.size() - 2) == "_r");
  }
  for (const auto& atom : view.init) {
    for (const auto& arg : atom.args) {
      CHECK(arg.substr(arg.size() - 2) == "_r");
    }
  }
}

TEST_CASE("oracle verification labels match its own init", "[model-client]") {
  GeneratorConfig gen;
  gen.num_blocks = 3;
  gen.rng_seed = 8;
  TaskInstance task = generate_blocksworld(gen);
  OracleClient oracle(OracleConfig{});
  oracle.add_task(task);
  Domain d = parse_domain(task.domain_text);
  Problem gt = parse_problem(task.gt_problem_text, d);

  std::string payload;
  GroundAtom present = *gt.init.begin();
  payload += present.str() + "\n";
  payload += "(on nonexistent alsofake)\n";
  std::string out = oracle.respond(task, "verify", payload);
  CHECK(out.find(present.str() + ": True") != std::string::npos);
  CHECK(out.find("(on nonexistent alsofake): False") != std::string::npos);
}

TEST_CASE("http request bodies are byte-deterministic", "[model-client]") {
  ModelRequest req = make_request("t", "direct-p", "problem", "describe this");
  std::string a = HttpClient::request_body(req, "test-model");
  std::string b = HttpClient::request_body(req, "test-model");
  CHECK(a == b);
  nlohmann::json j = nlohmann::json::parse(a);
  CHECK(j["model"] == "test-model");
  CHECK(j["temperature"] == 0.7);
  CHECK(j["max_tokens"] == 1024);
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"][0]["type"] == "text");
}

TEST_CASE("images are embedded as base64 data urls", "[model-client]") {
  ModelRequest req;
  ModelRequest::Message msg;
  msg.parts.push_back({ModelRequest::Part::Kind::Text, "what is this", {},
                       ""});
  ModelRequest::Part img;
  img.kind = ModelRequest::Part::Kind::Image;
  img.bytes = {0x89, 'P', 'N', 'G'};
  img.mime = "image/png";
  msg.parts.push_back(img);
  req.messages.push_back(msg);

  nlohmann::json j =
      nlohmann::json::parse(HttpClient::request_body(req, "m"));
  std::string url = j["messages"][0]["content"][1]["image_url"]["url"];
  CHECK(url.rfind("data:image/png;base64,", 0) == 0);
  CHECK(url.substr(url.find(',') + 1) == "iVBORw==");
}

TEST_CASE("http client round-trips against a local server",
          "[model-client][http]") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  std::string mode = "ok";
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                ++hits;
                seen_auth = req.get_header_value("Authorization");
                seen_body = req.body;
                if (mode == "no-usage") {
                  nlohmann::json out = {
                      {"choices",
                       {{{"message", {{"content", "12345678"}}}}}}};
                  res.set_content(out.dump(), "application/json");
                  return;
                }
                if (mode == "error") {
                  res.status = 500;
                  res.set_content("internal", "text/plain");
                  return;
                }
                nlohmann::json out = {
                    {"model", "local-test"},
                    {"choices",
                     {{{"message", {{"content", "a reply"}}}}}},
                    {"usage",
                     {{"prompt_tokens", 42}, {"completion_tokens", 7}}}};
                res.set_content(out.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("FORMABENCH_API_KEY", "sk-test-123", 1);
  HttpClientConfig config;
  config.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  config.model = "local-test";
  HttpClient client(config);
  ModelResponse resp = client.complete(make_request("t", "p", "s", "hi"));

  CHECK(resp.text == "a reply");
  CHECK(resp.model_id == "local-test");
  CHECK(resp.usage.prompt_tokens == 42);
  CHECK(resp.usage.response_tokens == 7);
  CHECK_FALSE(resp.usage.estimated);
  CHECK(hits == 1);
  CHECK(seen_auth == "Bearer sk-test-123");
  CHECK(nlohmann::json::parse(seen_body)["model"] == "local-test");

  SECTION("missing usage falls back to the character estimate") {
    mode = "no-usage";
    ModelResponse est = client.complete(make_request("t", "p", "s", "hi"));
    CHECK(est.usage.estimated);
    CHECK(est.usage.response_tokens == 2);  // 8 chars / 4
  }

  SECTION("server errors surface as ApiError with the status") {
    mode = "error";
    try {
      client.complete(make_request("t", "p", "s", "hi"));
      FAIL("expected ApiError");
    } catch (const ApiError& e) {
      CHECK(e.status() == 500);
    }
  }

  server.stop();
  t.join();
  unsetenv("FORMABENCH_API_KEY");
}

TEST_CASE("unreachable hosts fail after bounded retries",
          "[model-client][http]") {
  HttpClientConfig config;
  config.base_url = "http://127.0.0.1:1";  // nothing listens here
  config.model = "m";
  config.max_attempts = 2;
  HttpClient client(config);
  CHECK_THROWS_AS(client.complete(make_request("t", "p", "s", "hi")),
                  NetworkError);
}
