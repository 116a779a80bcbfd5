#include "shopx/llm/session.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace shopx::llm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

void write_json(const fs::path& path, const json& doc) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << doc.dump(2) << '\n';
    }
    fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error("malformed JSON in " + path.string());
    return doc;
}

} // namespace

RecordingProvider::RecordingProvider(Provider& inner, fs::path dir) : inner_(inner), dir_(std::move(dir)) {
    fs::create_directories(dir_);
    if (fs::exists(dir_ / "index.json")) {
        index_ = read_json(dir_ / "index.json").at("exchanges");
        for (const auto& e : index_) {
            std::string h = e.at("hash").get<std::string>();
            if (!files_.count(h)) files_[h] = read_json(dir_ / (h + ".json"));
        }
    }
}

CompletionResponse RecordingProvider::complete(const CompletionRequest& req) {
    CompletionResponse resp = inner_.complete(req);
    const std::string hash = request_hash(req);
    const std::string ts = utc_timestamp();
    std::lock_guard lock(mutex_);
    json& file = files_[hash];
    if (file.is_null()) {
        file = {{"request",
                 {{"model_id", req.model_id},
                  {"system_prompt", req.system_prompt},
                  {"user_prompt", req.user_prompt},
                  {"schema", req.schema}}},
                {"responses", json::array()}};
    }
    json r = {{"response_text", resp.json_text}, {"timestamp", ts}};
    r["usage"] = resp.usage ? usage_to_json(*resp.usage) : json(nullptr);
    file["responses"].push_back(std::move(r));
    index_.push_back({{"hash", hash}, {"model_id", req.model_id}, {"timestamp", ts}});
    write_json(dir_ / (hash + ".json"), file);
    write_json(dir_ / "index.json", json{{"exchanges", index_}});
    return resp;
}

ReplayProvider::ReplayProvider(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::is_directory(dir_)) throw Error("replay session directory not found: " + dir_.string());
    if (!fs::exists(dir_ / "index.json")) throw Error("replay session has no index.json: " + dir_.string());
    index_ = read_json(dir_ / "index.json").at("exchanges");
    for (const auto& e : index_) {
        std::string h = e.at("hash").get<std::string>();
        if (files_.count(h)) continue;
        fs::path p = dir_ / (h + ".json");
        if (!fs::exists(p)) throw Error("incomplete replay session: missing " + p.string());
        files_[h] = read_json(p);
    }
}

CompletionResponse ReplayProvider::complete(const CompletionRequest& req) {
    const std::string hash = request_hash(req);
    std::lock_guard lock(mutex_);
    auto it = files_.find(hash);
    if (it == files_.end()) throw ReplayMiss("no recorded exchange for request " + hash);
    const json& responses = it->second.at("responses");
    if (responses.empty()) throw ReplayMiss("recorded exchange " + hash + " has no responses");
    std::size_t& cur = cursor_[hash];
    const json& r = responses[std::min(cur, responses.size() - 1)];
    ++cur;
    ++call_count_;
    CompletionResponse out;
    out.json_text = r.at("response_text").get<std::string>();
    if (!r.at("usage").is_null()) out.usage = usage_from_json(r["usage"]);
    return out;
}

std::vector<ChatExchange> ReplayProvider::exchanges() const {
    std::vector<ChatExchange> out;
    std::map<std::string, std::size_t> seen;
    for (const auto& e : index_) {
        std::string h = e.at("hash").get<std::string>();
        const json& file = files_.at(h);
        const json& responses = file.at("responses");
        std::size_t i = std::min(seen[h]++, responses.size() - 1);
        ChatExchange x;
        x.model_id = file["request"].at("model_id").get<std::string>();
        x.system_prompt = file["request"].at("system_prompt").get<std::string>();
        x.user_prompt = file["request"].at("user_prompt").get<std::string>();
        x.schema = file["request"].at("schema");
        x.response_text = responses[i].at("response_text").get<std::string>();
        if (!responses[i].at("usage").is_null()) x.usage = usage_from_json(responses[i]["usage"]);
        x.timestamp = responses[i].value("timestamp", std::string());
        out.push_back(std::move(x));
    }
    return out;
}

} // namespace shopx::llm
