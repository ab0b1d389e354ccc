#include "hypersona/enhance.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace hypersona {

namespace {

using nlohmann::json;

constexpr std::size_t kNarrativeCap = 4096;

constexpr const char* kTaskText =
    "Generate a descriptive paragraph about the given user's persona.";
constexpr const char* kDemand1 =
    "For some unknown attributes, you should try to complete them with your knowledge.";
constexpr const char* kDemand2 =
    "Your description of this user should focus on personal traits, with references to "
    "demographic details given below.";
constexpr const char* kDemand3 = "Make the description concise and brief.";

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// "Fixed template that concatenates the attribute pairs into sentences"; also
// the shape of the mock client's output.
std::string template_narrative(const std::vector<std::pair<std::string, std::string>>& pairs,
                               const std::string& lead) {
    std::string out = lead;
    for (const auto& [name, content] : pairs) {
        out += " ";
        if (content == "Unknown")
            out += "Their " + lower(name) + " is not disclosed.";
        else
            out += "Their " + lower(name) + " is " + content + ".";
    }
    return out;
}

std::string cap_narrative(std::string s) {
    if (s.size() > kNarrativeCap) s.resize(kNarrativeCap);
    return s;
}

std::int64_t now_seconds() {
    return static_cast<std::int64_t>(std::time(nullptr));
}

}  // namespace

PromptBundle build_prompt(const UserRecord& record) {
    if (record.mbti.has_value() || record.enneagram.has_value())
        throw InvalidArgument("build_prompt: record still carries a personality label; run "
                              "strip_labels first");
    for (const auto& [key, value] : record.attributes) {
        (void)value;
        const std::string k = lower(key);
        if (k == "mbti" || k == "enneagram")
            throw InvalidArgument("build_prompt: record attribute \"" + key +
                                  "\" is a personality label; run strip_labels first");
    }

    PromptBundle bundle;
    bundle.task_text = kTaskText;
    bundle.demands = {kDemand1, kDemand2, kDemand3};

    if (!record.username.empty()) bundle.record_pairs.emplace_back("Name", record.username);
    for (const auto& [key, value] : record.attributes)
        bundle.record_pairs.emplace_back(capitalize(key), value.value_or("Unknown"));
    if (record.follower_count.has_value())
        bundle.record_pairs.emplace_back("Followers", std::to_string(*record.follower_count));
    else if (!record.attributes.empty() || !record.username.empty())
        bundle.record_pairs.emplace_back("Followers", "Unknown");
    if (!record.group_names.empty()) {
        std::string joined;
        for (const auto& g : record.group_names) {
            if (!joined.empty()) joined += ", ";
            joined += g;
        }
        bundle.record_pairs.emplace_back("Groups", joined);
    }

    if (bundle.record_pairs.empty())
        throw InvalidArgument("build_prompt: record has no attributes to describe");

    std::string records;
    for (const auto& [name, content] : bundle.record_pairs) {
        if (!records.empty()) records += " ";
        records += "<" + name + ">: <" + content + ">;";
    }
    bundle.rendered = "Task: " + bundle.task_text + "\n" +
                      "Demand: #1. " + bundle.demands[0] + " #2. " + bundle.demands[1] + " #3. " +
                      bundle.demands[2] + "\n" +
                      "User Records: " + records;
    bundle.prompt_hash = fnv1a64(bundle.rendered);
    return bundle;
}

std::string MockLlmClient::complete(const std::string& prompt, double temperature) {
    (void)temperature;  // the mock is deterministic regardless
    const std::string marker = "User Records: ";
    const std::size_t pos = prompt.find(marker);
    std::vector<std::pair<std::string, std::string>> pairs;
    if (pos != std::string::npos) {
        std::string records = prompt.substr(pos + marker.size());
        std::size_t i = 0;
        while (i < records.size()) {
            const std::size_t open = records.find('<', i);
            if (open == std::string::npos) break;
            const std::size_t close = records.find(">: <", open);
            if (close == std::string::npos) break;
            const std::size_t end = records.find(">;", close + 4);
            if (end == std::string::npos) break;
            pairs.emplace_back(records.substr(open + 1, close - open - 1),
                               records.substr(close + 4, end - close - 4));
            i = end + 2;
        }
    }
    return cap_narrative(
        template_narrative(pairs, "This persona was synthesized from the available records."));
}

std::string HttpLlmClient::complete(const std::string& prompt, double temperature) {
    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    json body = {
        {"model", config_.model},
        {"temperature", temperature},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
    };
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res)
        throw IoError("llm request failed: no response from " + config_.base_url);
    if (res->status != 200)
        throw IoError("llm request failed: HTTP " + std::to_string(res->status));
    try {
        json reply = json::parse(res->body);
        const auto& choice = reply.at("choices").at(0);
        if (choice.contains("message")) return choice["message"].at("content").get<std::string>();
        return choice.at("text").get<std::string>();
    } catch (const json::exception& e) {
        throw IoError(std::string("llm response parse error: ") + e.what());
    }
}

std::optional<EnhanceCache::Entry> EnhanceCache::lookup(const std::string& model_id,
                                                        std::uint64_t prompt_hash) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = entries_.find(model_id + '\0' + std::to_string(prompt_hash));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EnhanceCache::store(const std::string& model_id, std::uint64_t prompt_hash, Entry entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_[model_id + '\0' + std::to_string(prompt_hash)] = std::move(entry);
}

std::size_t EnhanceCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

void EnhanceCache::warm_from_profiles(const std::vector<EnhancedProfile>& profiles) {
    for (const auto& p : profiles)
        store(p.model_id, p.prompt_hash, Entry{p.narrative, p.fallback, p.created_at});
}

std::vector<EnhancedProfile> enhance_profiles(LlmClient& client,
                                              const std::vector<PromptBundle>& bundles,
                                              const std::vector<int>& user_ids,
                                              const EnhanceOptions& options, EnhanceCache* cache) {
    if (bundles.size() != user_ids.size())
        throw InvalidArgument("enhance_profiles: bundle/user id count mismatch");
    if (options.max_inflight < 1)
        throw InvalidArgument("enhance_profiles: max_inflight must be >= 1");

    const std::string model_id = client.model_id();
    std::vector<EnhancedProfile> profiles(bundles.size());

    // Work is grouped by prompt hash so identical prompts resolve once, no
    // matter how the workers interleave.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
    std::vector<std::uint64_t> work_order;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        auto& slot = by_hash[bundles[i].prompt_hash];
        if (slot.empty()) work_order.push_back(bundles[i].prompt_hash);
        slot.push_back(i);
    }

    auto process = [&](std::uint64_t hash) {
        const std::vector<std::size_t>& indices = by_hash[hash];
        const PromptBundle& bundle = bundles[indices.front()];

        EnhanceCache::Entry entry;
        bool resolved = false;
        if (cache) {
            if (auto hit = cache->lookup(model_id, hash)) {
                entry = *hit;
                resolved = true;
            }
        }
        if (!resolved) {
            bool ok = false;
            for (int attempt = 0; attempt <= options.max_retries && !ok; ++attempt) {
                if (attempt > 0 && options.backoff_ms > 0)
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(options.backoff_ms << (attempt - 1)));
                try {
                    entry.narrative = cap_narrative(client.complete(bundle.rendered,
                                                                    options.temperature));
                    ok = !entry.narrative.empty();
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok) {
                entry.narrative = cap_narrative(template_narrative(
                    bundle.record_pairs, "Profile assembled locally from raw records."));
                entry.fallback = true;
            }
            entry.created_at =
                options.fixed_timestamp >= 0 ? options.fixed_timestamp : now_seconds();
            if (cache) cache->store(model_id, hash, entry);
        }

        for (std::size_t i : indices) {
            EnhancedProfile profile;
            profile.user_id = user_ids[i];
            profile.prompt_hash = hash;
            profile.model_id = model_id;
            profile.narrative = entry.narrative;
            profile.fallback = entry.fallback;
            profile.created_at = entry.created_at;
            profiles[i] = std::move(profile);
        }
    };

    const std::size_t n = work_order.size();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(options.max_inflight), n);
    if (workers <= 1) {
        for (std::size_t w = 0; w < n; ++w) process(work_order[w]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    process(work_order[i]);
            });
        for (auto& t : pool) t.join();
    }
    return profiles;
}

void EmbedderSpec::validate() const {
    if (dim < 1) throw InvalidArgument("embedder: dim must be >= 1");
    if (kind == EmbedderKind::EXTERNAL && endpoint.empty())
        throw InvalidArgument("embedder: EXTERNAL kind needs an endpoint");
}

namespace {

FeatureMatrix hash_embed(int dim, const std::vector<std::string>& narratives,
                         std::vector<std::string>* warnings) {
    FeatureMatrix features(narratives.size(), static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < narratives.size(); ++i) {
        const std::string& text = narratives[i];
        double* row = features.row(i);
        std::size_t tokens = 0;
        std::size_t start = 0;
        while (start < text.size()) {
            while (start < text.size() &&
                   !std::isalnum(static_cast<unsigned char>(text[start])))
                ++start;
            std::size_t end = start;
            while (end < text.size() && std::isalnum(static_cast<unsigned char>(text[end])))
                ++end;
            if (end > start) {
                std::string token = lower(text.substr(start, end - start));
                const std::uint64_t h = fnv1a64(token);
                const std::size_t bucket = h % static_cast<std::uint64_t>(dim);
                row[bucket] += ((h >> 32) & 1ULL) ? 1.0 : -1.0;
                ++tokens;
            }
            start = end;
        }
        if (tokens == 0) {
            if (warnings)
                warnings->push_back("embed: empty narrative at row " + std::to_string(i) +
                                    "; emitting a zero feature row");
            continue;
        }
        double norm = 0.0;
        for (int j = 0; j < dim; ++j) norm += row[j] * row[j];
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (int j = 0; j < dim; ++j) row[j] /= norm;
    }
    return features;
}

FeatureMatrix external_embed(const EmbedderSpec& spec, const std::vector<std::string>& narratives,
                             std::vector<std::string>* warnings) {
    std::vector<std::size_t> live;
    json inputs = json::array();
    for (std::size_t i = 0; i < narratives.size(); ++i) {
        if (narratives[i].empty()) {
            if (warnings)
                warnings->push_back("embed: empty narrative at row " + std::to_string(i) +
                                    "; emitting a zero feature row");
            continue;
        }
        live.push_back(i);
        inputs.push_back(narratives[i]);
    }

    FeatureMatrix features(narratives.size(), static_cast<std::size_t>(spec.dim));
    if (live.empty()) return features;

    httplib::Client client(spec.endpoint);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(spec.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);
    json body = {{"model", spec.model}, {"input", inputs}};
    auto res = client.Post(spec.path, headers, body.dump(), "application/json");
    if (!res) throw IoError("embedding request failed: no response from " + spec.endpoint);
    if (res->status != 200)
        throw IoError("embedding request failed: HTTP " + std::to_string(res->status));

    try {
        json reply = json::parse(res->body);
        const auto& data = reply.at("data");
        if (data.size() != live.size())
            throw IoError("embedding service returned " + std::to_string(data.size()) +
                          " rows, expected " + std::to_string(live.size()));
        for (std::size_t r = 0; r < live.size(); ++r) {
            const auto& vec = data.at(r).at("embedding");
            if (static_cast<int>(vec.size()) != spec.dim)
                throw IoError("embedding service returned dimension " +
                              std::to_string(vec.size()) + ", expected " +
                              std::to_string(spec.dim));
            double* row = features.row(live[r]);
            double norm = 0.0;
            for (int j = 0; j < spec.dim; ++j) {
                row[j] = vec.at(static_cast<std::size_t>(j)).get<double>();
                norm += row[j] * row[j];
            }
            norm = std::sqrt(norm);
            if (norm > 0.0)
                for (int j = 0; j < spec.dim; ++j) row[j] /= norm;
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("embedding response parse error: ") + e.what());
    }
    return features;
}

}  // namespace

FeatureMatrix embed(const EmbedderSpec& spec, const std::vector<std::string>& narratives,
                    std::vector<std::string>* warnings) {
    spec.validate();
    if (narratives.empty()) throw InvalidArgument("embed: no narratives");
    if (spec.kind == EmbedderKind::HASH) return hash_embed(spec.dim, narratives, warnings);
    return external_embed(spec, narratives, warnings);
}

FeatureMatrix raw_feature_matrix(const DatasetBundle& bundle) {
    const std::size_t n = bundle.users.size();

    // Follower standardization over observed values (population std).
    double mean = 0.0;
    std::size_t observed = 0;
    for (const auto& user : bundle.users)
        if (user.follower_count) {
            mean += static_cast<double>(*user.follower_count);
            ++observed;
        }
    if (observed > 0) mean /= static_cast<double>(observed);
    double var = 0.0;
    for (const auto& user : bundle.users)
        if (user.follower_count) {
            const double d = static_cast<double>(*user.follower_count) - mean;
            var += d * d;
        }
    const double stddev = observed > 0 ? std::sqrt(var / static_cast<double>(observed)) : 0.0;

    // Observed vocabulary per categorical attribute; "about" is free text and
    // stays out of the raw baseline.
    std::vector<std::string> categorical;
    for (const auto& key : standard_attribute_keys())
        if (key != "about") categorical.push_back(key);

    std::map<std::string, std::map<std::string, std::size_t>> vocab;  // attr -> value -> column
    for (const auto& key : categorical) {
        std::set<std::string> values;
        for (const auto& user : bundle.users)
            if (const auto* v = user.find_attribute(key); v && v->has_value())
                values.insert(**v);
        std::size_t idx = 0;
        for (const auto& value : values) vocab[key][value] = idx++;
    }

    std::vector<std::string> group_names;
    for (const auto& [name, members] : bundle.group_index) {
        (void)members;
        group_names.push_back(name);
    }
    std::map<std::string, std::size_t> group_col;
    for (std::size_t i = 0; i < group_names.size(); ++i) group_col[group_names[i]] = i;

    std::size_t cols = 1;
    std::map<std::string, std::size_t> block_start;
    for (const auto& key : categorical) {
        block_start[key] = cols;
        cols += vocab[key].size();
    }
    const std::size_t group_start = cols;
    cols += group_names.size();

    FeatureMatrix features(n, cols);
    for (const auto& user : bundle.users) {
        const auto i = static_cast<std::size_t>(user.user_id);
        if (user.follower_count && stddev > 1e-12)
            features(i, 0) = (static_cast<double>(*user.follower_count) - mean) / stddev;
        for (const auto& key : categorical)
            if (const auto* v = user.find_attribute(key); v && v->has_value()) {
                const auto it = vocab[key].find(**v);
                if (it != vocab[key].end()) features(i, block_start[key] + it->second) = 1.0;
            }
        for (const auto& g : user.group_names) {
            const auto it = group_col.find(g);
            if (it != group_col.end()) features(i, group_start + it->second) = 1.0;
        }
    }
    return features;
}

}  // namespace hypersona
