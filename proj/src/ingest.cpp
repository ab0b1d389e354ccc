#include "hypersona/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace hypersona {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// JSON scalar -> attribute string; null/empty counts as missing.
std::optional<std::string> scalar_to_string(const json& v) {
    if (v.is_null()) return std::nullopt;
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (trim(s).empty()) return std::nullopt;
        return s;
    }
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return std::to_string(v.get<double>());
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    return std::nullopt;
}

}  // namespace

std::string edge_kind_name(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::FOLLOW: return "follow";
        case EdgeKind::QUOTE: return "quote";
        case EdgeKind::MENTION: return "mention";
        case EdgeKind::OTHER: return "other";
    }
    throw InvalidArgument("unknown edge kind");
}

EdgeKind edge_kind_from_name(const std::string& name) {
    const std::string n = lower(trim(name));
    if (n == "follow" || n == "following") return EdgeKind::FOLLOW;
    if (n == "quote" || n == "quoting") return EdgeKind::QUOTE;
    if (n == "mention" || n == "mentioning") return EdgeKind::MENTION;
    return EdgeKind::OTHER;
}

const std::vector<std::string>& standard_attribute_keys() {
    static const std::vector<std::string> keys = {"gender",     "sexual",     "location",
                                                  "about",      "occupation", "relationship"};
    return keys;
}

DatasetBundle load_dataset(const std::string& users_path, const std::string& edges_path) {
    DatasetBundle bundle;

    std::ifstream users_in(users_path);
    if (!users_in) throw IoError("cannot open users file: " + users_path);

    std::unordered_map<std::string, int> id_map;
    std::string line;
    int line_no = 0;
    while (std::getline(users_in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(users_path + ":" + std::to_string(line_no) +
                             ": malformed JSON record: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("id"))
            throw ParseError(users_path + ":" + std::to_string(line_no) +
                             ": record missing required field `id`");

        std::string external_id;
        if (obj["id"].is_string())
            external_id = obj["id"].get<std::string>();
        else if (obj["id"].is_number_integer())
            external_id = std::to_string(obj["id"].get<std::int64_t>());
        else
            throw ParseError(users_path + ":" + std::to_string(line_no) +
                             ": `id` must be a string or integer");

        if (id_map.count(external_id))
            throw ParseError(users_path + ":" + std::to_string(line_no) + ": duplicate user id \"" +
                             external_id + "\"");

        UserRecord user;
        user.user_id = static_cast<int>(bundle.users.size());
        id_map[external_id] = user.user_id;
        bundle.external_ids.push_back(external_id);

        if (obj.contains("username") && obj["username"].is_string())
            user.username = obj["username"].get<std::string>();

        for (const auto& key : standard_attribute_keys()) {
            std::optional<std::string> value;
            if (obj.contains(key)) value = scalar_to_string(obj[key]);
            user.attributes.emplace_back(key, std::move(value));
        }

        if (obj.contains("followers") && !obj["followers"].is_null()) {
            std::int64_t followers = 0;
            if (obj["followers"].is_number_integer())
                followers = obj["followers"].get<std::int64_t>();
            else if (obj["followers"].is_string()) {
                try {
                    followers = std::stoll(obj["followers"].get<std::string>());
                } catch (...) {
                    throw ParseError(users_path + ":" + std::to_string(line_no) +
                                     ": `followers` is not an integer");
                }
            } else {
                throw ParseError(users_path + ":" + std::to_string(line_no) +
                                 ": `followers` is not an integer");
            }
            if (followers < 0)
                throw ParseError(users_path + ":" + std::to_string(line_no) +
                                 ": negative follower count");
            user.follower_count = followers;
        }

        if (obj.contains("groups")) {
            if (!obj["groups"].is_array())
                throw ParseError(users_path + ":" + std::to_string(line_no) +
                                 ": `groups` must be a list of strings");
            for (const auto& g : obj["groups"]) {
                if (!g.is_string())
                    throw ParseError(users_path + ":" + std::to_string(line_no) +
                                     ": `groups` must be a list of strings");
                std::string name = trim(g.get<std::string>());
                if (!name.empty()) user.group_names.push_back(name);
            }
        }

        // Labels are fragmented in the wild; unparseable values degrade to a
        // warning instead of failing the load.
        if (obj.contains("mbti") && obj["mbti"].is_string()) {
            const std::string raw = trim(obj["mbti"].get<std::string>());
            if (!raw.empty()) {
                try {
                    user.mbti = parse_mbti(raw);
                } catch (const ParseError& e) {
                    bundle.warnings.push_back(users_path + ":" + std::to_string(line_no) + ": " +
                                              e.what());
                }
            }
        }
        if (obj.contains("enneagram") && !obj["enneagram"].is_null()) {
            std::string raw;
            if (obj["enneagram"].is_string())
                raw = trim(obj["enneagram"].get<std::string>());
            else if (obj["enneagram"].is_number_integer())
                raw = std::to_string(obj["enneagram"].get<std::int64_t>());
            if (!raw.empty()) {
                try {
                    user.enneagram = parse_enneagram(raw);
                } catch (const ParseError& e) {
                    bundle.warnings.push_back(users_path + ":" + std::to_string(line_no) + ": " +
                                              e.what());
                }
            }
        }

        bundle.users.push_back(std::move(user));
    }

    // Inverse group index.
    for (const auto& user : bundle.users)
        for (const auto& g : user.group_names) bundle.group_index[g].push_back(user.user_id);

    std::ifstream edges_in(edges_path);
    if (!edges_in) throw IoError("cannot open edges file: " + edges_path);

    line_no = 0;
    bool saw_header = false;
    while (std::getline(edges_in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(t);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (!saw_header) {
            if (fields.size() < 2 || lower(fields[0]) != "src" || lower(fields[1]) != "dst")
                throw ParseError(edges_path + ":" + std::to_string(line_no) +
                                 ": expected header `src,dst,kind`");
            saw_header = true;
            continue;
        }
        if (fields.size() < 2)
            throw ParseError(edges_path + ":" + std::to_string(line_no) +
                             ": expected at least src and dst fields");

        const auto src_it = id_map.find(fields[0]);
        const auto dst_it = id_map.find(fields[1]);
        if (src_it == id_map.end() || dst_it == id_map.end()) {
            bundle.warnings.push_back(edges_path + ":" + std::to_string(line_no) +
                                      ": dropped edge with unknown endpoint (" + fields[0] + " -> " +
                                      fields[1] + ")");
            continue;
        }
        if (src_it->second == dst_it->second) {
            bundle.warnings.push_back(edges_path + ":" + std::to_string(line_no) +
                                      ": dropped self-loop edge on \"" + fields[0] + "\"");
            continue;
        }
        EdgeRecord edge;
        edge.src = src_it->second;
        edge.dst = dst_it->second;
        edge.kind = fields.size() >= 3 ? edge_kind_from_name(fields[2]) : EdgeKind::OTHER;
        bundle.edges.push_back(edge);
    }

    return bundle;
}

DatasetBundle strip_labels(const DatasetBundle& bundle) {
    DatasetBundle out = bundle;
    for (auto& user : out.users) {
        user.mbti.reset();
        user.enneagram.reset();
        std::erase_if(user.attributes, [](const auto& kv) {
            const std::string k = lower(kv.first);
            return k == "mbti" || k == "enneagram";
        });
    }
    return out;
}

ValidationReport validate(const DatasetBundle& bundle) {
    ValidationReport report;
    report.num_users = bundle.num_users();
    report.num_edges = static_cast<int>(bundle.edges.size());
    report.num_groups = static_cast<int>(bundle.group_index.size());
    report.warnings = bundle.warnings;

    int mbti_count = 0;
    int enneagram_count = 0;
    for (const auto& user : bundle.users) {
        for (const auto& [key, value] : user.attributes)
            if (!value.has_value()) report.missing_attribute_counts[key] += 1;
        if (!user.follower_count.has_value()) report.missing_attribute_counts["followers"] += 1;
        if (user.mbti.has_value()) ++mbti_count;
        if (user.enneagram.has_value()) ++enneagram_count;
    }
    if (report.num_users > 0) {
        report.mbti_coverage = static_cast<double>(mbti_count) / report.num_users;
        report.enneagram_coverage = static_cast<double>(enneagram_count) / report.num_users;
    }

    std::unordered_set<int> touched;
    for (const auto& edge : bundle.edges) {
        touched.insert(edge.src);
        touched.insert(edge.dst);
    }
    for (const auto& user : bundle.users)
        if (user.group_names.empty() && !touched.count(user.user_id))
            report.isolated_nodes.push_back(user.user_id);

    for (const auto& [name, members] : bundle.group_index)
        if (members.empty()) report.empty_groups.push_back(name);

    return report;
}

}  // namespace hypersona
