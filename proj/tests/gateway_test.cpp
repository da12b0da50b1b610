#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "readi/gateway.hpp"
#include "test_support.hpp"

using readi::GatewayError;
using readi::RenderError;
using readi::Role;
using readi::RoleName;
using readi::Transcript;

TEST_SUITE_BEGIN("gateway");

TEST_CASE("default shot counts per role") {
    CHECK(readi::default_role(RoleName::kg_generate).shot_count == 6);
    CHECK(readi::default_role(RoleName::kg_edit).shot_count == 5);
    CHECK(readi::default_role(RoleName::kg_reason).shot_count == 5);
    CHECK(readi::default_role(RoleName::table_generate).shot_count == 7);
    CHECK(readi::default_role(RoleName::table_edit).shot_count == 2);
    CHECK(readi::default_role(RoleName::table_reason).shot_count == 7);
}

TEST_CASE("reason prompt carries the rendered evidence verbatim") {
    std::string evidence =
        "(France, location.location.adjoin, cvt1),\n"
        "(cvt1, location.adjoining_relationship.country, Germany)";
    std::string prompt =
        readi::render_prompt(readi::default_role(RoleName::kg_reason),
                             {{"question", readi_test::kFig3Question},
                              {"evidence", evidence}});
    CHECK(prompt.find("(France, location.location.adjoin, cvt1)") != std::string::npos);
    CHECK(prompt.find("Use {} to enclose the answer") != std::string::npos);
    // Byte-deterministic.
    CHECK(prompt == readi::render_prompt(readi::default_role(RoleName::kg_reason),
                                         {{"question", readi_test::kFig3Question},
                                          {"evidence", evidence}}));
}

TEST_CASE("edit prompt has Error Message and Candidate Relations blocks") {
    std::string feedback =
        "Error Message\n1. <compound node> in the end.\nInstantiation Context\n"
        "Instantiate Paths: France --location.location.adjoin--> compound node\n"
        "Candidate Relations\n['location.adjoining_relationship.country']";
    std::string prompt =
        readi::render_prompt(readi::default_role(RoleName::kg_edit),
                             {{"question", readi_test::kFig3Question},
                              {"initial_path", "Path: {\"France\": [France -> border]}"},
                              {"feedback", feedback}});
    CHECK(prompt.find("Error Message") != std::string::npos);
    CHECK(prompt.find("Candidate Relations") != std::string::npos);
    CHECK(prompt.find("Corrected Path") != std::string::npos);
}

TEST_CASE("shot count controls the number of demonstrations") {
    Role role = readi::default_role(RoleName::kg_generate);
    role.shot_count = 3;
    std::string prompt = readi::render_prompt(
        role, {{"question", "q"}, {"entities", "[\"e\"]"}});
    std::size_t count = 0;
    for (std::size_t pos = prompt.find("Topic Entities:"); pos != std::string::npos;
         pos = prompt.find("Topic Entities:", pos + 1)) {
        ++count;
    }
    CHECK(count == 4);  // three demonstrations plus the query
}

TEST_CASE("missing slots are render errors naming the slot") {
    CHECK_THROWS_WITH_AS(
        readi::render_prompt(readi::default_role(RoleName::kg_generate), {}),
        doctest::Contains("question"), RenderError);
    CHECK_THROWS_WITH_AS(
        readi::render_prompt(readi::default_role(RoleName::kg_generate),
                             {{"question", "q"}}),
        doctest::Contains("entities"), RenderError);
}

TEST_CASE("scripted transcript replays in order and ignores prompts") {
    Transcript transcript(true);
    transcript.push(RoleName::kg_generate, "Path: {\"a\": [a -> r]}");
    transcript.push(RoleName::kg_generate, "second");
    Role role = readi::default_role(RoleName::kg_generate);
    CHECK(transcript.complete(role, "whatever", 0.3) == "Path: {\"a\": [a -> r]}");
    CHECK(transcript.complete(role, "different prompt", 0.9) == "second");
}

TEST_CASE("strict underflow is a gateway error, non-strict a sentinel") {
    Transcript strict(true);
    CHECK_THROWS_WITH_AS(
        strict.complete(readi::default_role(RoleName::kg_generate), "p", 0.3),
        doctest::Contains("kg_generate"), GatewayError);

    Transcript lenient(false);
    CHECK(lenient.complete(readi::default_role(RoleName::kg_generate), "p", 0.3) ==
          readi::kTranscriptExhausted);
}

TEST_CASE("queues never cross roles") {
    Transcript transcript(true);
    transcript.push(RoleName::kg_edit, "edited");
    CHECK_THROWS_AS(
        transcript.complete(readi::default_role(RoleName::kg_generate), "p", 0.3),
        GatewayError);
    CHECK(transcript.complete(readi::default_role(RoleName::kg_edit), "p", 0.3) ==
          "edited");
}

TEST_CASE("transcript json round trip") {
    Transcript original = Transcript::from_file(readi_test::fixture_path("fig3_transcript.json"));
    Transcript reparsed = Transcript::from_json(original.to_json());
    CHECK(reparsed.strict() == original.strict());
    CHECK(reparsed.remaining(RoleName::kg_generate) == 1);
    CHECK(reparsed.remaining(RoleName::kg_edit) == 1);
    CHECK(reparsed.remaining(RoleName::kg_reason) == 1);
    Role role = readi::default_role(RoleName::kg_reason);
    CHECK(reparsed.complete(role, "", 0.3) == original.complete(role, "", 0.3));
}

TEST_CASE("http backend extracts choices[0].message.content") {
    httplib::Server server;
    std::string seen_body;
    std::string seen_auth;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    seen_body = req.body;
                    seen_auth = req.get_header_value("Authorization");
                    nlohmann::json reply = {
                        {"choices",
                         {{{"message", {{"role", "assistant"},
                                        {"content", "Path: {\"a\": [a -> r]}"}}}}}}};
                    res.set_content(reply.dump(), "application/json");
                });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("READI_API_KEY", "test-key", 1);
    readi::HttpBackend backend("http://127.0.0.1:" + std::to_string(port));
    backend.set_retries(0);
    std::string out =
        backend.complete(readi::default_role(RoleName::kg_generate), "prompt text", 0.3);
    unsetenv("READI_API_KEY");
    CHECK(out == "Path: {\"a\": [a -> r]}");
    CHECK(seen_auth == "Bearer test-key");

    nlohmann::json body = nlohmann::json::parse(seen_body);
    CHECK(body.at("temperature").get<double>() == doctest::Approx(0.3));
    CHECK(body.at("messages").size() == 2);
    CHECK(body.at("messages")[1].at("content").get<std::string>() == "prompt text");

    server.stop();
    thread.join();
}

TEST_CASE("http non-success exhausts retries then raises with role context") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                    ++hits;
                    res.status = 500;
                });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    readi::HttpBackend backend("http://127.0.0.1:" + std::to_string(port));
    backend.set_retries(2);
    backend.set_backoff(std::chrono::milliseconds(1));
    CHECK_THROWS_WITH_AS(
        backend.complete(readi::default_role(RoleName::kg_reason), "p", 0.3),
        doctest::Contains("kg_reason"), GatewayError);
    CHECK(hits == 3);  // initial try plus two retries

    server.stop();
    thread.join();
}

TEST_CASE("backend spec parsing") {
    auto scripted =
        readi::make_backend("scripted:" + readi_test::fixture_path("fig3_transcript.json"));
    CHECK(dynamic_cast<Transcript*>(scripted.get()) != nullptr);
    CHECK_THROWS_AS(readi::make_backend("bogus:x"), GatewayError);
}

TEST_SUITE_END();
