#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypersona/ingest.hpp"
#include "hypersona/matrix.hpp"
#include "hypersona/rng.hpp"
#include "hypersona/types.hpp"

namespace hypersona {

// The rendered persona prompt for one user record. `rendered` is a pure
// function of the other fields; `prompt_hash` is a stable 64-bit hash of it.
struct PromptBundle {
    std::string task_text;
    std::array<std::string, 3> demands;
    std::vector<std::pair<std::string, std::string>> record_pairs;  // (name, content)
    std::string rendered;
    std::uint64_t prompt_hash = 0;
};

// Builds the persona prompt from a label-stripped record. Rejects records
// that still carry a personality label (leak guard) and records with nothing
// to describe. Missing attribute values render as <Unknown>.
PromptBundle build_prompt(const UserRecord& record);

struct EnhancedProfile {
    int user_id = 0;
    std::string narrative;
    std::string model_id;
    std::uint64_t prompt_hash = 0;
    std::int64_t created_at = 0;  // seconds since epoch; 0 for the offline mock
    bool fallback = false;
};

// Contract for a text-generation backend: send one prompt, get one narrative.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string model_id() const = 0;
    // Throws Error on failure.
    virtual std::string complete(const std::string& prompt, double temperature) = 0;
};

// Deterministic offline client: restates the record pairs from the prompt as
// narrative sentences. Byte-identical across runs for identical prompts.
class MockLlmClient : public LlmClient {
public:
    std::string model_id() const override { return "mock-llm"; }
    std::string complete(const std::string& prompt, double temperature) override;
};

// Generic chat-completion endpoint client. The auth token is read from an
// environment variable, never from configuration files.
struct HttpLlmConfig {
    std::string base_url;  // e.g. http://localhost:8085
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    std::string api_key_env = "LLM_API_KEY";
    int timeout_seconds = 60;
};

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig config) : config_(std::move(config)) {}
    std::string model_id() const override { return config_.model; }
    std::string complete(const std::string& prompt, double temperature) override;

private:
    HttpLlmConfig config_;
};

// Narrative cache keyed by (model_id, prompt_hash). Thread safe.
class EnhanceCache {
public:
    struct Entry {
        std::string narrative;
        bool fallback = false;
        std::int64_t created_at = 0;
    };

    std::optional<Entry> lookup(const std::string& model_id, std::uint64_t prompt_hash) const;
    void store(const std::string& model_id, std::uint64_t prompt_hash, Entry entry);
    std::size_t size() const;

    void warm_from_profiles(const std::vector<EnhancedProfile>& profiles);

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;  // key = model_id + '\0' + hash
};

struct EnhanceOptions {
    double temperature = 0.0;
    int max_retries = 3;
    int backoff_ms = 100;   // doubles after each failed attempt
    int max_inflight = 4;   // bound on concurrent client requests
    std::int64_t fixed_timestamp = -1;  // >= 0 pins created_at for reproducible output
};

// One profile per bundle, in input order. Cache hits never re-call the
// client; failures after the retry budget fall back to a deterministic local
// template narrative flagged `fallback`.
std::vector<EnhancedProfile> enhance_profiles(LlmClient& client,
                                              const std::vector<PromptBundle>& bundles,
                                              const std::vector<int>& user_ids,
                                              const EnhanceOptions& options,
                                              EnhanceCache* cache = nullptr);

enum class EmbedderKind { EXTERNAL, HASH };

struct EmbedderSpec {
    EmbedderKind kind = EmbedderKind::HASH;
    int dim = 384;
    std::string endpoint;  // EXTERNAL: base URL of the embedding service
    std::string path = "/v1/embeddings";
    std::string model = "sentence-embedder";
    std::string api_key_env = "EMBED_API_KEY";

    void validate() const;
};

// Text -> N x d feature matrix, rows L2-normalized.
//
// HASH: signed token hashing; each lowercased alphanumeric token lands in
// bucket fnv1a64(token) % d with sign from hash bit 32. A deterministic
// offline stand-in for a sentence-embedding service.
// EXTERNAL: rows come from the configured embedding endpoint; any service
// error fails the call (no silent fallback across embedder kinds).
// Empty narratives produce a zero row and a warning.
FeatureMatrix embed(const EmbedderSpec& spec, const std::vector<std::string>& narratives,
                    std::vector<std::string>* warnings = nullptr);

// Baseline features without LLM enhancement. Column order: standardized
// follower count (missing -> 0), then one-hot blocks over the observed
// vocabulary of each categorical attribute in standard order ("about" free
// text is excluded), then multi-hot group memberships over sorted group
// names.
FeatureMatrix raw_feature_matrix(const DatasetBundle& bundle);

}  // namespace hypersona
