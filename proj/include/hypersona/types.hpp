#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypersona/error.hpp"
#include "hypersona/matrix.hpp"

namespace hypersona {

// MBTI type as four binary dichotomies. Bit convention per position:
// E/S/T/J -> 0, I/N/F/P -> 1. The 16-class index packs the bits big-endian:
// class_index = 8*t1 + 4*t2 + 2*t3 + t4, so INFP -> (1,1,1,1) -> 15 and
// ESTJ -> (0,0,0,0) -> 0.
struct MbtiCode {
    std::array<int, 4> dichotomies{};

    int class_index() const {
        return 8 * dichotomies[0] + 4 * dichotomies[1] + 2 * dichotomies[2] + dichotomies[3];
    }
};

// Parses a 4-letter MBTI code, case-insensitive. Throws ParseError naming the
// first offending position (1-based).
MbtiCode parse_mbti(const std::string& code);

// Four-letter string form; inverse of parse_mbti.
std::string format_mbti(const MbtiCode& code);

// MbtiCode for a 16-class index in 0..15.
MbtiCode mbti_from_class_index(int class_index);

// Parses an Enneagram core type from its raw string form. Wing suffixes such
// as "4w5" are stripped; returns the leading core digit in 1..9.
int parse_enneagram(const std::string& raw);

enum class LabelScheme { MBTI16, ENNEAGRAM9 };

inline int num_classes(LabelScheme scheme) { return scheme == LabelScheme::MBTI16 ? 16 : 9; }

std::string label_name(LabelScheme scheme, int class_index);

struct PersonalityLabel {
    LabelScheme scheme = LabelScheme::MBTI16;
    int class_index = 0;  // 0..P-1 for the scheme
};

// Length-P binary vector with a single 1 at the label's class index.
std::vector<double> one_hot(const PersonalityLabel& label);

// One user's fragmented record. `attributes` is an ordered list of
// (name, optional value) pairs; a missing value is kept as an explicit
// std::nullopt so downstream prompts can render it as <Unknown>.
struct UserRecord {
    int user_id = 0;  // dense, 0..N-1 within a dataset
    std::string username;
    std::vector<std::pair<std::string, std::optional<std::string>>> attributes;
    std::optional<std::int64_t> follower_count;  // >= 0 when present
    std::vector<std::string> group_names;
    std::optional<MbtiCode> mbti;
    std::optional<int> enneagram;  // 1..9

    const std::optional<std::string>* find_attribute(const std::string& name) const;
};

enum class HyperedgeKind { TOP, SEM, FOR };

std::string kind_name(HyperedgeKind kind);
HyperedgeKind kind_from_name(const std::string& name);

struct Hyperedge {
    int edge_id = 0;
    HyperedgeKind kind = HyperedgeKind::TOP;
    std::vector<int> members;  // sorted, unique node ids
};

// Node set plus typed hyperedges with diagonal node weights U and hyperedge
// weights W (stored as vectors of the diagonals).
struct Hypergraph {
    int num_nodes = 0;
    std::vector<Hyperedge> edges;
    std::vector<double> node_weights;  // U, length num_nodes, positive
    std::vector<double> edge_weights;  // W, length edges.size(), positive

    // Throws on any violated structural invariant.
    void validate() const;
};

}  // namespace hypersona
