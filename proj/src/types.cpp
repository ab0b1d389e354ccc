#include "hypersona/types.hpp"

#include <cctype>
#include <set>
#include <unordered_set>

namespace hypersona {

namespace {

// Per position: the letter mapping to bit 0 and the letter mapping to bit 1.
constexpr std::array<std::pair<char, char>, 4> kMbtiLetters = {{
    {'E', 'I'},
    {'S', 'N'},
    {'T', 'F'},
    {'J', 'P'},
}};

}  // namespace

MbtiCode parse_mbti(const std::string& code) {
    if (code.size() != 4)
        throw ParseError("MBTI code must be exactly 4 characters, got \"" + code + "\"");
    MbtiCode out;
    for (int i = 0; i < 4; ++i) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(code[i])));
        if (c == kMbtiLetters[i].first)
            out.dichotomies[i] = 0;
        else if (c == kMbtiLetters[i].second)
            out.dichotomies[i] = 1;
        else
            throw ParseError("invalid MBTI letter '" + std::string(1, code[i]) + "' at position " +
                             std::to_string(i + 1) + " in \"" + code + "\"");
    }
    return out;
}

std::string format_mbti(const MbtiCode& code) {
    std::string s(4, '?');
    for (int i = 0; i < 4; ++i)
        s[i] = code.dichotomies[i] == 0 ? kMbtiLetters[i].first : kMbtiLetters[i].second;
    return s;
}

MbtiCode mbti_from_class_index(int class_index) {
    if (class_index < 0 || class_index > 15)
        throw InvalidArgument("MBTI class index out of range: " + std::to_string(class_index));
    MbtiCode out;
    out.dichotomies = {(class_index >> 3) & 1, (class_index >> 2) & 1, (class_index >> 1) & 1,
                       class_index & 1};
    return out;
}

int parse_enneagram(const std::string& raw) {
    if (raw.empty()) throw ParseError("empty Enneagram value");
    const char c = raw[0];
    if (c < '1' || c > '9')
        throw ParseError("Enneagram core type must start with a digit in 1..9, got \"" + raw +
                         "\"");
    // Anything after the leading digit is wing notation ("4w5") or noise; the
    // core type alone is the label.
    return c - '0';
}

std::string label_name(LabelScheme scheme, int class_index) {
    if (scheme == LabelScheme::MBTI16) return format_mbti(mbti_from_class_index(class_index));
    if (class_index < 0 || class_index > 8)
        throw InvalidArgument("Enneagram class index out of range: " + std::to_string(class_index));
    return std::to_string(class_index + 1);
}

std::vector<double> one_hot(const PersonalityLabel& label) {
    const int p = num_classes(label.scheme);
    if (label.class_index < 0 || label.class_index >= p)
        throw InvalidArgument("label class index " + std::to_string(label.class_index) +
                              " out of range for scheme with P=" + std::to_string(p));
    std::vector<double> v(static_cast<std::size_t>(p), 0.0);
    v[static_cast<std::size_t>(label.class_index)] = 1.0;
    return v;
}

const std::optional<std::string>* UserRecord::find_attribute(const std::string& name) const {
    for (const auto& [key, value] : attributes)
        if (key == name) return &value;
    return nullptr;
}

std::string kind_name(HyperedgeKind kind) {
    switch (kind) {
        case HyperedgeKind::TOP: return "TOP";
        case HyperedgeKind::SEM: return "SEM";
        case HyperedgeKind::FOR: return "FOR";
    }
    throw InvalidArgument("unknown hyperedge kind");
}

HyperedgeKind kind_from_name(const std::string& name) {
    if (name == "TOP") return HyperedgeKind::TOP;
    if (name == "SEM") return HyperedgeKind::SEM;
    if (name == "FOR") return HyperedgeKind::FOR;
    throw ParseError("unknown hyperedge kind \"" + name + "\"");
}

void Hypergraph::validate() const {
    if (num_nodes < 0) throw InvalidArgument("hypergraph: negative node count");
    if (node_weights.size() != static_cast<std::size_t>(num_nodes))
        throw InvalidArgument("hypergraph: node weight vector length != num_nodes");
    if (edge_weights.size() != edges.size())
        throw InvalidArgument("hypergraph: edge weight vector length != |E|");
    for (double u : node_weights)
        if (!(u > 0.0)) throw InvalidArgument("hypergraph: node weights must be positive");
    for (double w : edge_weights)
        if (!(w > 0.0)) throw InvalidArgument("hypergraph: edge weights must be positive");

    std::unordered_set<int> ids;
    std::set<std::pair<int, std::vector<int>>> member_sets;  // keyed by (kind, members)
    for (const auto& e : edges) {
        if (!ids.insert(e.edge_id).second)
            throw InvalidArgument("hypergraph: duplicate edge id " + std::to_string(e.edge_id));
        if (e.members.empty())
            throw InvalidArgument("hypergraph: empty hyperedge " + std::to_string(e.edge_id));
        int prev = -1;
        for (int m : e.members) {
            if (m < 0 || m >= num_nodes)
                throw InvalidArgument("hypergraph: member " + std::to_string(m) +
                                      " out of range in edge " + std::to_string(e.edge_id));
            if (m <= prev)
                throw InvalidArgument("hypergraph: members must be sorted unique in edge " +
                                      std::to_string(e.edge_id));
            prev = m;
        }
        if (!member_sets.insert({static_cast<int>(e.kind), e.members}).second)
            throw InvalidArgument("hypergraph: duplicate member set within kind " +
                                  kind_name(e.kind));
    }
}

}  // namespace hypersona
