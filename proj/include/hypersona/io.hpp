#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hypersona/enhance.hpp"
#include "hypersona/hgnn.hpp"
#include "hypersona/matrix.hpp"
#include "hypersona/types.hpp"

namespace hypersona {

inline constexpr const char* kToolVersion = "0.1.0";

// Identifies the configuration and seed that produced an artifact; embedded
// in every output file.
struct Provenance {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
};

// Lossless double -> text (round-trips through strtod).
std::string d2s(double v);

std::string provenance_comment(const Provenance& prov);

// Hypergraph store: line-delimited `edge_id<TAB>kind<TAB>member ids...` plus a
// sidecar carrying the U and W diagonals.
void write_hypergraph(const std::string& path, const std::string& weights_path,
                      const Hypergraph& graph, const Provenance& prov);
Hypergraph read_hypergraph(const std::string& path, const std::string& weights_path);

// Embedding store: binary header (magic, provenance, N, d) + row-major 64-bit
// floats, plus a line-delimited human-readable twin.
void write_embeddings(const std::string& bin_path, const std::string& txt_path,
                      const FeatureMatrix& features, const Provenance& prov);
FeatureMatrix read_embeddings(const std::string& bin_path);

// Model checkpoint: versioned header + shape table + row-major parameter
// blocks, BN running statistics included.
void write_checkpoint(const std::string& path, const ModelParams& params, const Provenance& prov);
std::pair<ModelParams, Provenance> read_checkpoint(const std::string& path);

// Training history: line-delimited (epoch, train loss, val accuracy).
void write_history(const std::string& path, const std::vector<EpochStats>& history,
                   const Provenance& prov);

// Enhanced-profile store: one JSON object per line after a provenance line.
void write_profiles(const std::string& path, const std::vector<EnhancedProfile>& profiles,
                    const Provenance& prov);
std::vector<EnhancedProfile> read_profiles(const std::string& path);

}  // namespace hypersona
