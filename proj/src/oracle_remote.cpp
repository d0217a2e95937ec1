#include "mindpalace/oracle_remote.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mindpalace/error.hpp"
#include "mindpalace/text.hpp"

namespace mindpalace {

using nlohmann::json;

RemoteConfig remote_config_from(const std::map<std::string, std::string>& section) {
    RemoteConfig c;
    for (auto& [key, value] : section) {
        try {
            if (key == "endpoint") c.endpoint = value;
            else if (key == "model") c.model = value;
            else if (key == "api_key_env") c.api_key_env = value;
            else if (key == "timeout_s") c.timeout_s = std::stod(value);
            else if (key == "max_retries") c.max_retries = std::stoi(value);
            else throw ValidationError("unknown remote config key '" + key + "'");
        } catch (const std::logic_error&) {
            throw ValidationError("bad value for remote config key '" + key + "': " + value);
        }
    }
    if (c.timeout_s <= 0) throw ValidationError("remote timeout_s must be positive");
    if (c.max_retries < 0) throw ValidationError("remote max_retries must be >= 0");
    return c;
}

std::optional<std::string> labeled_field(const std::string& reply, const std::string& label) {
    std::istringstream in(reply);
    std::string line;
    auto want = text::to_lower(label);
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        // Tolerate markdown decoration such as "**Answer:**" or "- Answer:".
        t.erase(0, t.find_first_not_of("*-#> "));
        auto colon = t.find(':');
        if (colon == std::string::npos) continue;
        auto key = text::to_lower(text::trim(t.substr(0, colon)));
        key.erase(std::remove(key.begin(), key.end(), '*'), key.end());
        if (key != want) continue;
        auto value = text::trim(t.substr(colon + 1));
        value.erase(0, value.find_first_not_of('*'));
        return text::trim(value);
    }
    return std::nullopt;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        auto t = text::trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::string require(const std::string& reply, const std::string& label) {
    auto v = labeled_field(reply, label);
    if (!v || v->empty()) throw OracleParseError("reply has no '" + label + ":' field", reply);
    return *v;
}

bool parse_yes_no(const std::string& reply, const std::string& label) {
    auto v = text::normalize(require(reply, label));
    if (v.rfind("yes", 0) == 0 || v == "true") return true;
    if (v.rfind("no", 0) == 0 || v == "false") return false;
    throw OracleParseError("'" + label + "' is neither yes nor no", reply);
}

std::string reasoning_of(const std::string& reply) {
    return labeled_field(reply, "Reasoning").value_or("");
}

std::string question_block(const Question& q, const WorkingMemory& wm) {
    return "Question: " + q.text + "\nCollected so far:\n" + wm.summary() + "\n";
}

const char* kSystem =
    "You are the reasoning module of a household robot with a long-term memory of past visits "
    "and the ability to explore the present environment. Reply only with the labeled fields requested, "
    "one per line, and always include a 'Reasoning:' line.";

}  // namespace

RemoteOracle::RemoteOracle(RemoteConfig config, std::vector<std::string> recent_first)
    : config_(std::move(config)), recent_first_(std::move(recent_first)) {
    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("remote endpoint needs a scheme: " + config_.endpoint);
    auto scheme = config_.endpoint.substr(0, scheme_end);
    if (scheme != "http") {
        throw ValidationError("only http endpoints are supported by this build: " + config_.endpoint);
    }
    auto path_start = config_.endpoint.find('/', scheme_end + 3);
    scheme_host_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

std::string RemoteOracle::complete(const std::string& system, const std::string& user) {
    httplib::Client client(scheme_host_);
    auto whole = static_cast<time_t>(config_.timeout_s);
    auto micros = static_cast<time_t>((config_.timeout_s - static_cast<double>(whole)) * 1e6);
    client.set_connection_timeout(whole, micros);
    client.set_read_timeout(whole, micros);
    client.set_write_timeout(whole, micros);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    json body = {{"model", config_.model},
                 {"temperature", 0},
                 {"messages", {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw OracleTransportError("remote oracle unreachable: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw OracleTransportError("remote oracle returned HTTP " + std::to_string(res->status));
    }
    json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) throw OracleParseError("reply body is not JSON", res->body);
    try {
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw OracleParseError("reply has no choices[0].message.content", res->body);
    }
}

template <class T>
T RemoteOracle::ask(const std::string& system, const std::string& user,
                    const std::function<T(const std::string&)>& parse) {
    for (int attempt = 0;; ++attempt) {
        try {
            return parse(complete(system, user));
        } catch (const OracleTransportError&) {
            if (attempt >= config_.max_retries) throw;
        } catch (const OracleParseError&) {
            if (attempt >= config_.max_retries) throw;
        }
    }
}

Decision<bool> RemoteOracle::is_ready_to_answer(const Question& q, const WorkingMemory& wm) {
    auto prompt = question_block(q, wm) +
                  "Is there enough information to answer the question now? Reply with:\n"
                  "Reasoning: <why>\nReady: <yes|no>\n";
    return ask<Decision<bool>>(kSystem, prompt, [](const std::string& r) {
        return Decision<bool>{parse_yes_no(r, "Ready"), reasoning_of(r)};
    });
}

Decision<std::string> RemoteOracle::identify_target(const Question& q, const WorkingMemory& wm) {
    auto prompt = question_block(q, wm) +
                  "Name the object or place to search for next, under 10 words. Describe what to look for, "
                  "not the answer itself. Reply with:\nReasoning: <why>\nTarget: <description>\n";
    return ask<Decision<std::string>>(kSystem, prompt, [&](const std::string& r) {
        return Decision<std::string>{enforce_target(require(r, "Target"), q), reasoning_of(r)};
    });
}

Decision<InstancePlan> RemoteOracle::select_world_instances(const std::string& target, const Question& q,
                                                           const std::vector<std::string>& labels,
                                                           const WorkingMemory& wm) {
    std::string listing;
    for (auto& l : labels) listing += "- " + l + "\n";
    auto prompt = question_block(q, wm) + "Target: " + target + "\nAvailable memories, most recent first ('" +
                  kPresentLabel + "' is the present environment):\n" + listing +
                  "Choose a strategy among PAST_ONLY, PRESENT_ONLY, PAST_THEN_PRESENT, MULTI_PAST_AND_PRESENT. "
                  "Prefer PAST_ONLY over PAST_THEN_PRESENT when possible. List at most 5 past instances, in "
                  "search order, separated by ';'. Reply with:\nReasoning: <why>\nStrategy: <name>\n"
                  "Instances: <label; label; ...>\n";
    return ask<Decision<InstancePlan>>(kSystem, prompt, [&](const std::string& r) {
        InstancePlan plan;
        try {
            plan.strategy = parse_strategy(require(r, "Strategy"));
        } catch (const ValidationError& e) {
            throw OracleParseError(e.what(), r);
        }
        for (auto& l : split(require(r, "Instances"), ';')) plan.labels.push_back(text::to_lower(l));
        return Decision<InstancePlan>{enforce_instances(plan, labels), reasoning_of(r)};
    });
}

Decision<AreaProbabilities> RemoteOracle::area_probabilities(const std::string& target, const Question& q,
                                                             const std::string& instance,
                                                             const std::vector<AreaSummary>& areas,
                                                             const WorkingMemory& wm) {
    std::string listing;
    for (auto& a : areas) {
        listing += "- " + a.name + ": objects {";
        bool first = true;
        for (auto& o : a.objects) {
            listing += (first ? "" : ", ") + o;
            first = false;
        }
        listing += "}";
        if (!a.description.empty()) listing += "; " + a.description;
        listing += "\n";
    }
    auto prompt = question_block(q, wm) + "Target: " + target + "\nAreas in world instance '" + instance + "':\n" +
                  listing +
                  "Give up to 10 areas with the probability (0.0 to 0.99) that the target is there. Reply with:\n"
                  "Reasoning: <why>\nProbabilities: <area = p; area = p; ...>\n";
    return ask<Decision<AreaProbabilities>>(kSystem, prompt, [&](const std::string& r) {
        AreaProbabilities raw;
        for (auto& item : split(require(r, "Probabilities"), ';')) {
            auto eq = item.find_last_of("=:");
            if (eq == std::string::npos) throw OracleParseError("probability entry without '=': " + item, r);
            try {
                raw.emplace_back(text::trim(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
            } catch (const std::logic_error&) {
                throw OracleParseError("probability is not a number: " + item, r);
            }
        }
        std::vector<std::string> notes;
        auto kept = enforce_probabilities(std::move(raw), areas, &notes);
        warnings_.insert(warnings_.end(), notes.begin(), notes.end());
        return Decision<AreaProbabilities>{std::move(kept), reasoning_of(r)};
    });
}

Decision<std::vector<int>> RemoteOracle::select_viewpoints(const std::string& target, const Question& q,
                                                           const std::string& instance,
                                                           const std::vector<ViewpointSummary>& index) {
    std::string listing;
    for (auto& v : index) {
        listing += "- " + std::to_string(v.id) + ": " + (v.caption.empty() ? "(no caption)" : v.caption);
        if (!v.objects.empty()) {
            listing += " [";
            bool first = true;
            for (auto& o : v.objects) {
                listing += (first ? "" : ", ") + o;
                first = false;
            }
            listing += "]";
        }
        listing += "\n";
    }
    auto prompt = "Question: " + q.text + "\nTarget: " + target + "\nViewpoints in '" + instance + "':\n" + listing +
                  "List at most five viewpoint ids most likely to show the target, best first. Reply with:\n"
                  "Reasoning: <why>\nViewpoints: <id, id, ...>\n";
    return ask<Decision<std::vector<int>>>(kSystem, prompt, [&](const std::string& r) {
        std::vector<int> ids;
        for (auto& item : split(require(r, "Viewpoints"), ',')) {
            try {
                ids.push_back(std::stoi(item));
            } catch (const std::logic_error&) {
                throw OracleParseError("viewpoint id is not an integer: " + item, r);
            }
        }
        return Decision<std::vector<int>>{enforce_viewpoints(std::move(ids), index), reasoning_of(r)};
    });
}

bool RemoteOracle::detect(const std::string& target, const Observation& obs, const DetectionContext& where) {
    std::string objects;
    for (auto& o : obs.objects) objects += (objects.empty() ? "" : ", ") + o;
    auto prompt = "Image from '" + where.episode + "', viewpoint " + std::to_string(where.viewpoint) +
                  ".\nCaption: " + obs.caption + "\nObjects: " + objects + "\nTarget: " + target +
                  "\nIs the target visible? Reply with:\nReasoning: <why>\nFound: <yes|no>\n";
    return ask<bool>(kSystem, prompt, [](const std::string& r) { return parse_yes_no(r, "Found"); });
}

Decision<std::string> RemoteOracle::answer(const Question& q, const WorkingMemory& wm) {
    auto prompt = question_block(q, wm) +
                  "Answer the question directly and briefly from what was collected. Reply with:\n"
                  "Reasoning: <why>\nAnswer: <answer>\n";
    return ask<Decision<std::string>>(kSystem, prompt, [](const std::string& r) {
        return Decision<std::string>{require(r, "Answer"), reasoning_of(r)};
    });
}

int RemoteOracle::score(const Question& q, const std::string& ground_truth, const std::string& answer) {
    auto prompt = "Question: " + q.text + "\nReference answer: " + ground_truth + "\nCandidate answer: " + answer +
                  "\nRate how well the candidate matches the reference with a single integer from 1 to 5. "
                  "Reply with:\nReasoning: <why>\nScore: <1-5>\n";
    return ask<int>(kSystem, prompt, [](const std::string& r) {
        auto v = text::trim(require(r, "Score"));
        if (v.empty() || v[0] < '1' || v[0] > '5' || (v.size() > 1 && std::isdigit(static_cast<unsigned char>(v[1])))) {
            throw OracleParseError("score is not an integer from 1 to 5: " + v, r);
        }
        return v[0] - '0';
    });
}

}  // namespace mindpalace
