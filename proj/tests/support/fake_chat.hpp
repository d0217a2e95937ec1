#pragma once

// Minimal chat-completions endpoint for exercising the remote oracle without a network.

#include <atomic>
#include <functional>
#include <regex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace fake_chat {

// Plays a sensible agent for the package-delivery scenario.
inline std::string package_agent(const std::string& prompt, int& readiness_calls) {
    auto has = [&](const char* s) { return prompt.find(s) != std::string::npos; };
    if (has("Ready: <yes|no>")) {
        return ++readiness_calls == 1 ? "Reasoning: nothing collected yet.\nReady: no"
                                      : "Reasoning: all instances checked.\nReady: yes";
    }
    if (has("Target: <description>")) return "Reasoning: the question names it.\nTarget: package at the front door";
    if (has("Strategy: <name>")) {
        return "Reasoning: a past event.\nStrategy: PAST ONLY\n"
               "Instances: friday afternoon; thursday afternoon; wednesday afternoon";
    }
    if (has("Probabilities:")) {
        return "Reasoning: deliveries land at the entrance.\n"
               "Probabilities: main entrance = 0.85; living room upstairs = 0.7; stairs = 0.5; attic = 0.9";
    }
    if (has("Viewpoints: <id")) {
        std::regex id_line(R"(\n- (\d+):)");
        std::string ids;
        for (std::sregex_iterator it(prompt.begin(), prompt.end(), id_line), end; it != end; ++it) {
            ids += (ids.empty() ? "" : ", ") + (*it)[1].str();
        }
        return "Reasoning: try them in order.\nViewpoints: " + ids;
    }
    if (has("Found: <yes|no>")) {
        return std::string("Reasoning: looked at the objects.\nFound: ") + (has("cardboard box") ? "yes" : "no");
    }
    if (has("Answer: <answer>")) return "**Reasoning:** seen thursday, not wednesday.\n**Answer:** Before Thursday afternoon";
    if (has("Score: <1-5>")) return "Reasoning: matches.\nScore: 5";
    return "I am not sure what you want.";
}

class Server {
public:
    using Reply = std::function<std::string(const std::string& prompt)>;

    explicit Server(Reply reply) : reply_(std::move(reply)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            auto body = nlohmann::json::parse(req.body, nullptr, false);
            std::string prompt;
            if (!body.is_discarded() && body.contains("messages")) {
                for (auto& m : body["messages"]) prompt += m.value("content", "") + "\n";
            }
            nlohmann::json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply_(prompt)}}}}}}};
            res.set_content(out.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~Server() {
        server_.stop();
        thread_.join();
    }
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
    int requests() const { return requests_; }

private:
    Reply reply_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> requests_{0};
};

}  // namespace fake_chat
