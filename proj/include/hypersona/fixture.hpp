#pragma once

#include <cstdint>
#include <string>

#include "hypersona/ingest.hpp"

namespace hypersona {

// Synthetic dataset with a planted community signal: users belong to one
// forum group each and the group's class determines their label with the
// configured purity. Everything is derived from the seed.
struct FixtureConfig {
    int num_users = 200;
    int num_groups = 20;
    int num_classes = 4;  // mapped onto 4 MBTI types / Enneagram types 1..4
    double purity = 0.9;
    std::uint64_t seed = 7;
};

DatasetBundle make_planted_bundle(const FixtureConfig& config);

// Writes the bundle in the ingest formats (JSONL users, CSV edges).
void write_fixture_files(const DatasetBundle& bundle, const std::string& users_path,
                         const std::string& edges_path);

}  // namespace hypersona
