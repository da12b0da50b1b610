#include "readi/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace readi {

namespace {

struct Template {
    std::string instruction;
    std::vector<std::string> demos;
    std::vector<std::string> required_slots;
    // Query section with {slot} placeholders.
    std::string query;
};

const Template& template_for(RoleName name) {
    static const Template kKgGenerate{
        "Given a question and some Topic Entities in the Question, output possible "
        "freebase Relation Paths starting from each Topic Entities in order to answer "
        "the question.",
        {
            "Question: Find the person who said \"Taste cannot be controlled by law\", "
            "where did this person die from?\n"
            "Topic Entities: [\"Taste cannot be controlled by law\"]\n"
            "Thought: There is only one topic entity, the answer is constrained by one "
            "path. For the path from \"Taste cannot be controlled by law\", firstly, it "
            "should cover the person quote it. Second, it should cover the place where "
            "the person died.\n"
            "Path: {\"Taste cannot be controlled by law\": [Taste cannot be controlled "
            "by law -> people.person.quotations -> people.deceased_person.place_of_death]}",
        },
        {"question", "entities"},
        "Question: {question}\nTopic Entities: {entities}\nThought:",
    };
    static const Template kKgEdit{
        "Task: Given an Initial Path and some feedback information of a Question, "
        "please correct the initial path.",
        {
            "Question: The movie featured Miley Cyrus and was produced by Tobin "
            "Armbrust?\n"
            "Initial Path: Path: {\"Miley Cyrus\": [Miley Cyrus -> film.film.actor -> "
            "film.film.producer]}\n"
            "Error Message\n"
            "1. <compound node> in the end.\n"
            "2. relation \"film.film.producer\" not instantiated.\n"
            "Instantiation Context\n"
            "Instantiate Paths: Miley Cyrus --film.actor.film--> compound node\n"
            "Candidate Relations\n"
            "['film.director.film', 'film.performance.film', 'film.producer.film']\n"
            "Corrected Path\n"
            "Goal: The Initial Path starts from Miley Cyrus, which should cover the "
            "movies featured by Miley Cyrus.\n"
            "Thought: In Instantiate Paths I know that Miley Cyrus acts some films, "
            "described by a compound node. In candidates, I find "
            "\"film.performance.film\" most relevant to get the films. Meanwhile, "
            "\"film.film.producer\" is not relevant to my Goal.\n"
            "Final Path: {\"Miley Cyrus\": [Miley Cyrus -> film.actor.film -> "
            "film.performance.film]}",
        },
        {"question", "initial_path", "feedback"},
        "Question: {question}\nInitial Path: {initial_path}\n{feedback}\nCorrected Path",
    };
    static const Template kKgReason{
        "Given a question and the associated retrieved knowledge graph triplets "
        "(entity, relation, entity), you are asked to answer the question with these "
        "triplets. If the given knowledge triples is not enough or missing, you can "
        "use your own knowledge. Use {} to enclose the answer! Please think step by "
        "step.",
        {
            "Q: The artist nominated for The Long Winter lived where?\n"
            "Knowledge Triplets:\n"
            "(The Long Winter, book.written_work.author, Laura Ingalls Wilder),\n"
            "(Laura Ingalls Wilder, people.person.places_lived, m.28e5697),\n"
            "(m.28e5697, people.place_lived.location, De Smet)\n"
            "A: First, based on (The Long Winter, book.written_work.author, Laura "
            "Ingalls Wilder), the author of The Long Winter is Laura Ingalls Wilder. "
            "Second, based on (Laura Ingalls Wilder, people.person.places_lived, "
            "m.28e5697), (m.28e5697, people.place_lived.location, De Smet), Laura "
            "Ingalls Wilder lived in De Smet. So, the answer is {De Smet}.",
        },
        {"question", "evidence"},
        "Q: {question}\nKnowledge Triplets:\n{evidence}\nA:",
    };
    static const Template kTableGenerate{
        "You should predict the needed header and rows in a table for the question.",
        {
            "Question: what was the last year where this team was a part of the usl "
            "a-league?\n"
            "| year | division | league | regular season | playoffs | open cup | avg. "
            "attendance |\n"
            "| -- | -- | -- | -- | -- | -- | -- |\n"
            "| 2001 | 2 | USL A-League | 4th, Western | Quarterfinals | Did not "
            "qualify | 7,169 |\n"
            "Thought:\n"
            "First, according to headers and example rows, I need the years the team "
            "is in usl a-league league and return the latest year, so I need headers "
            "\"year\" and \"league\".\n"
            "Second, I need to constrain \"league\" = \"usl a-league\" to know the "
            "years of this team as part of the \"usl a-league\", so I need "
            "{\"league\": [\"usl a-league\"]}.\n"
            "Chosen Headers: [\"year\", \"league\"]\n"
            "Constrains: {\"league\": [\"usl a-league\"]}",
        },
        {"question", "table"},
        "Question: {question}\n{table}\nThought:",
    };
    static const Template kTableEdit{
        "There are some mistakes in your previous header or constrains of a question. "
        "Follow the given feedback, fix your mistakes and give the correct header and "
        "constrains.",
        {
            "Question: what was the last year where this team was a part of the usl "
            "a-league?\n"
            "| year | division | league | regular season | playoffs | open cup | avg. "
            "attendance |\n"
            "| -- | -- | -- | -- | -- | -- | -- |\n"
            "| 2001 | 2 | USL A-League | 4th, Western | Quarterfinals | Did not "
            "qualify | 7,169 |\n"
            "Wrong Answer:\n"
            "Chosen Headers: [\"year\", \"team\"]\n"
            "Constrains: {\"Team\": [\"usl a-league\"]}\n"
            "Feedback:\n"
            "1. Header ['team'] not in candidate Headers. You can only choose headers "
            "from [\"year\", \"division\", \"league\", \"regular season\", "
            "\"playoffs\", \"open cup\", \"avg. attendance\"].\n"
            "Thought:\n"
            "First, previously I chose headers \"year\" and \"team\", but \"team\" is "
            "not in Header list. Following the feedback, I need the team in "
            "\"league\"=\"usl a-league\", so I need headers \"year\" and \"league\".\n"
            "Second, I need to constrain \"league\" = \"usl a-league\".\n"
            "Chosen Headers: [\"year\", \"league\"]\n"
            "Constrains: {\"league\": [\"usl a-league\"]}",
        },
        {"question", "table", "previous", "feedback"},
        "Question: {question}\n{table}\nWrong Answer:\n{previous}\nFeedback:\n{feedback}\nThought:",
    };
    static const Template kTableReason{
        "You should output the answer of question based on a table.\n"
        "Output your answer in the last line as \"Answer: ['your answer']\"!",
        {
            "Question: what was the last year where this team was a part of the usl "
            "a-league?\n"
            "Table:\n"
            "Headers: league, year\n"
            "item 1: (league, usl a-league); (year, 2001)\n"
            "item 2: (league, usl a-league); (year, 2002)\n"
            "item 3: (league, usl a-league); (year, 2003)\n"
            "item 4: (league, usl a-league); (year, 2004)\n"
            "Thought:\n"
            "First, I know the years the teams is a part of usl a-league are 2001, "
            "2002, 2003 and 2004 from the items in Table.\n"
            "Second, I calculate the last year is 2004, so the answer is ['2004'].\n"
            "Answer: ['2004']",
        },
        {"question", "items"},
        "Question: {question}\nTable:\n{items}\nThought:",
    };
    switch (name) {
        case RoleName::kg_generate: return kKgGenerate;
        case RoleName::kg_edit: return kKgEdit;
        case RoleName::kg_reason: return kKgReason;
        case RoleName::table_generate: return kTableGenerate;
        case RoleName::table_edit: return kTableEdit;
        case RoleName::table_reason: return kTableReason;
    }
    return kKgGenerate;
}

std::string fill_slots(const std::string& query,
                       const std::map<std::string, std::string>& slots) {
    std::string out = query;
    for (const auto& [name, value] : slots) {
        std::string placeholder = "{" + name + "}";
        std::size_t pos = 0;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return out;
}

}  // namespace

const char* to_string(RoleName name) {
    switch (name) {
        case RoleName::kg_generate: return "kg_generate";
        case RoleName::kg_edit: return "kg_edit";
        case RoleName::kg_reason: return "kg_reason";
        case RoleName::table_generate: return "table_generate";
        case RoleName::table_edit: return "table_edit";
        case RoleName::table_reason: return "table_reason";
    }
    return "unknown";
}

RoleName role_from_string(const std::string& name) {
    if (name == "kg_generate") return RoleName::kg_generate;
    if (name == "kg_edit") return RoleName::kg_edit;
    if (name == "kg_reason") return RoleName::kg_reason;
    if (name == "table_generate") return RoleName::table_generate;
    if (name == "table_edit") return RoleName::table_edit;
    if (name == "table_reason") return RoleName::table_reason;
    throw GatewayError("unknown role name: " + name);
}

Role default_role(RoleName name) {
    switch (name) {
        case RoleName::kg_generate: return Role{name, 6, "kg_generate"};
        case RoleName::kg_edit: return Role{name, 5, "kg_edit"};
        case RoleName::kg_reason: return Role{name, 5, "kg_reason"};
        case RoleName::table_generate: return Role{name, 7, "table_generate"};
        case RoleName::table_edit: return Role{name, 2, "table_edit"};
        case RoleName::table_reason: return Role{name, 7, "table_reason"};
    }
    return Role{name, 1, "unknown"};
}

std::string render_prompt(const Role& role,
                          const std::map<std::string, std::string>& slots) {
    const Template& tpl = template_for(role.name);
    for (const std::string& slot : tpl.required_slots) {
        if (slots.find(slot) == slots.end()) {
            throw RenderError(std::string("missing slot \"") + slot + "\" for role " +
                              to_string(role.name));
        }
    }
    std::string prompt = tpl.instruction;
    for (std::size_t shot = 0; shot < role.shot_count; ++shot) {
        prompt += "\n\n";
        prompt += tpl.demos[shot % tpl.demos.size()];
    }
    prompt += "\n\n";
    prompt += fill_slots(tpl.query, slots);
    return prompt;
}

void Transcript::push(RoleName role, std::string response) {
    queues_[role].push_back(std::move(response));
}

std::size_t Transcript::remaining(RoleName role) const {
    auto it = queues_.find(role);
    if (it == queues_.end()) {
        return 0;
    }
    auto ct = cursors_.find(role);
    std::size_t used = ct == cursors_.end() ? 0 : ct->second;
    return it->second.size() - used;
}

std::string Transcript::complete(const Role& role, const std::string& /*prompt*/,
                                 double /*temperature*/) {
    std::size_t& cursor = cursors_[role.name];
    auto it = queues_.find(role.name);
    if (it == queues_.end() || cursor >= it->second.size()) {
        if (strict_) {
            throw GatewayError(std::string("transcript exhausted for role ") +
                               to_string(role.name));
        }
        return kTranscriptExhausted;
    }
    return it->second[cursor++];
}

Transcript Transcript::from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    Transcript transcript(j.value("strict", true));
    for (const auto& [key, responses] : j.at("roles").items()) {
        RoleName role = role_from_string(key);
        for (const auto& response : responses) {
            transcript.push(role, response.get<std::string>());
        }
    }
    return transcript;
}

Transcript Transcript::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw GatewayError("cannot open transcript file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string Transcript::to_json() const {
    nlohmann::json roles = nlohmann::json::object();
    for (const auto& [role, responses] : queues_) {
        roles[to_string(role)] = responses;
    }
    nlohmann::json j;
    j["roles"] = std::move(roles);
    j["strict"] = strict_;
    return j.dump(2);
}

HttpBackend::HttpBackend(std::string base_url, std::string model)
    : model_(std::move(model)) {
    std::size_t scheme = base_url.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t slash = base_url.find('/', host_start);
    if (slash == std::string::npos) {
        host_ = base_url;
        path_ = "/v1/chat/completions";
    } else {
        host_ = base_url.substr(0, slash);
        path_ = base_url.substr(slash);
    }
}

std::string HttpBackend::complete(const Role& role, const std::string& prompt,
                                  double temperature) {
    nlohmann::json body;
    body["model"] = model_;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "system"}, {"content", "You are a helpful assistant."}},
         nlohmann::json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = temperature;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv("READI_API_KEY")) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= retries_; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff_base_ * (1ULL << (attempt - 1)));
        }
        httplib::Client client(host_);
        client.set_connection_timeout(timeout_.count(), 0);
        client.set_read_timeout(timeout_.count(), 0);
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            nlohmann::json j = nlohmann::json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            last_error = std::string("bad response body: ") + e.what();
        }
    }
    throw GatewayError(std::string("role ") + to_string(role.name) + ": " + last_error);
}

std::unique_ptr<LlmBackend> make_backend(const std::string& spec) {
    if (spec.rfind("scripted:", 0) == 0) {
        return std::make_unique<Transcript>(Transcript::from_file(spec.substr(9)));
    }
    if (spec.rfind("http:", 0) == 0) {
        return std::make_unique<HttpBackend>(spec.substr(5));
    }
    throw GatewayError("backend spec must be scripted:FILE or http:URL, got: " + spec);
}

}  // namespace readi
