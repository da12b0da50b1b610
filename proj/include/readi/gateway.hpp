#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace readi {

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RenderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RoleName {
    kg_generate,
    kg_edit,
    kg_reason,
    table_generate,
    table_edit,
    table_reason,
};

const char* to_string(RoleName name);
RoleName role_from_string(const std::string& name);

// A role bundles the prompt template with its few-shot count. Default
// shot counts are 6/5/5 for the KG roles and 7/2/7 for the table roles
// (generate/edit/reason).
struct Role {
    RoleName name;
    std::size_t shot_count;
    std::string template_id;
};

Role default_role(RoleName name);

// Instruction + shot_count demonstrations + the slotted query, rendered
// byte-deterministically. Each role has a small built-in demonstration
// bank that is cycled when shot_count exceeds it. Throws RenderError
// naming the first missing slot.
//
// Slots per role:
//   kg_generate    question, entities
//   kg_edit        question, initial_path, feedback
//   kg_reason      question, evidence
//   table_generate question, table
//   table_edit     question, table, previous, feedback
//   table_reason   question, items
std::string render_prompt(const Role& role,
                          const std::map<std::string, std::string>& slots);

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const Role& role, const std::string& prompt,
                                 double temperature) = 0;
};

// Returned by a non-strict transcript when a role's queue runs dry.
inline constexpr const char* kTranscriptExhausted = "<<transcript exhausted>>";

// Deterministic replay backend: per-role FIFO queues of canned responses,
// popped in call order with the prompt ignored. Order-based keying keeps
// recorded fixtures stable when prompt templates evolve. One Transcript
// serves exactly one session.
class Transcript : public LlmBackend {
public:
    Transcript() = default;
    explicit Transcript(bool strict) : strict_(strict) {}

    void push(RoleName role, std::string response);
    std::size_t remaining(RoleName role) const;
    bool strict() const { return strict_; }
    void set_strict(bool strict) { strict_ = strict; }

    // transcript.json: {"roles": {"kg_generate": ["..."], ...}, "strict": true}
    static Transcript from_json(const std::string& json_text);
    static Transcript from_file(const std::string& path);
    std::string to_json() const;

    std::string complete(const Role& role, const std::string& prompt,
                         double temperature) override;

private:
    std::map<RoleName, std::vector<std::string>> queues_;
    std::map<RoleName, std::size_t> cursors_;
    bool strict_ = true;
};

// Chat-completion HTTP backend. Posts {model, messages, temperature} and
// reads choices[0].message.content. Transport failures and non-2xx
// statuses are retried with exponential backoff before surfacing as a
// GatewayError carrying the role name. The bearer token comes from the
// READI_API_KEY environment variable when set.
class HttpBackend : public LlmBackend {
public:
    // base_url: "http://host:port[/path]"; the path defaults to
    // /v1/chat/completions when absent.
    explicit HttpBackend(std::string base_url,
                         std::string model = "gpt-3.5-turbo");

    void set_retries(std::size_t retries) { retries_ = retries; }
    void set_backoff(std::chrono::milliseconds base) { backoff_base_ = base; }
    void set_timeout(std::chrono::seconds timeout) { timeout_ = timeout; }

    std::string complete(const Role& role, const std::string& prompt,
                         double temperature) override;

private:
    std::string host_;  // scheme://host:port
    std::string path_;
    std::string model_;
    std::size_t retries_ = 3;
    std::chrono::milliseconds backoff_base_{100};
    std::chrono::seconds timeout_{60};
};

// "scripted:FILE" -> Transcript loaded from FILE; "http:URL" -> HttpBackend.
std::unique_ptr<LlmBackend> make_backend(const std::string& spec);

}  // namespace readi
