#include "hypersona/fixture.hpp"

#include <array>
#include <fstream>

#include <json.hpp>

#include "hypersona/rng.hpp"
#include "hypersona/stats.hpp"

namespace hypersona {

namespace {

constexpr std::array<const char*, 20> kGroupNames = {
    "bookworms", "stargazers", "hikers",    "gamers",   "painters",
    "runners",   "bakers",     "cyclists",  "anglers",  "chessmates",
    "gardeners", "drummers",   "poets",     "skaters",  "divers",
    "climbers",  "welders",    "birders",   "dancers",  "coders"};

constexpr std::array<const char*, 4> kClassMbti = {"INFP", "ENTJ", "ISTP", "ESFJ"};

constexpr std::array<const char*, 3> kGenders = {"female", "male", "nonbinary"};
constexpr std::array<const char*, 4> kSexual = {"straight", "bisexual", "gay", "asexual"};
constexpr std::array<const char*, 6> kLocations = {"Lisbon", "Osaka",  "Toronto",
                                                   "Nairobi", "Berlin", "Austin"};
constexpr std::array<const char*, 6> kOccupations = {"student",  "nurse",     "engineer",
                                                     "teacher",  "barista",   "librarian"};
constexpr std::array<const char*, 4> kRelationship = {"single", "taken", "married", "complicated"};
constexpr std::array<const char*, 6> kAbout = {
    "I spend my weekends outdoors and my evenings online.",
    "Mostly here to meet people who share my hobbies.",
    "Lurker turned regular; say hi anytime.",
    "I write long posts about small things.",
    "Trying to log off more and live more.",
    "Ask me about my latest project."};

// Most members describe themselves through their group's topic, the way
// forum regulars do, so the narratives of group peers overlap beyond the
// group name alone.
std::string about_for_group(const std::string& group_name) {
    return "Mostly here for the " + group_name + " threads.";
}

}  // namespace

DatasetBundle make_planted_bundle(const FixtureConfig& config) {
    if (config.num_users < config.num_groups || config.num_groups < 1)
        throw InvalidArgument("fixture: need at least one user per group");
    if (config.num_classes < 2 || config.num_classes > static_cast<int>(kClassMbti.size()))
        throw InvalidArgument("fixture: supported class counts are 2..4");
    if (config.purity < 0.0 || config.purity > 1.0)
        throw InvalidArgument("fixture: purity must lie in [0, 1]");

    Rng rng(config.seed);
    DatasetBundle bundle;
    const int per_group = config.num_users / config.num_groups;

    std::vector<std::int64_t> followers =
        sample_discrete_powerlaw(2.5, 1, static_cast<std::size_t>(config.num_users),
                                 config.seed ^ 0xF0110F0110ULL);

    for (int i = 0; i < config.num_users; ++i) {
        const int group = std::min(i / per_group, config.num_groups - 1);
        const int group_class = group % config.num_classes;
        const int label = rng.uniform() < config.purity
                              ? group_class
                              : static_cast<int>(rng.uniform_int(
                                    static_cast<std::uint64_t>(config.num_classes)));

        UserRecord user;
        user.user_id = i;
        user.username = "user" + std::to_string(i);
        user.attributes.emplace_back("gender",
                                     std::string(kGenders[rng.uniform_int(kGenders.size())]));
        user.attributes.emplace_back("sexual",
                                     rng.uniform() < 0.3
                                         ? std::optional<std::string>(
                                               kSexual[rng.uniform_int(kSexual.size())])
                                         : std::nullopt);
        user.attributes.emplace_back("location",
                                     rng.uniform() < 0.7
                                         ? std::optional<std::string>(
                                               kLocations[rng.uniform_int(kLocations.size())])
                                         : std::nullopt);
        const std::string group_name =
            kGroupNames[static_cast<std::size_t>(group) % kGroupNames.size()];
        std::optional<std::string> about;
        const double about_draw = rng.uniform();
        if (about_draw < 0.7)
            about = about_for_group(group_name);
        else if (about_draw < 0.9)
            about = std::string(kAbout[rng.uniform_int(kAbout.size())]);
        user.attributes.emplace_back("about", about);
        user.attributes.emplace_back("occupation",
                                     rng.uniform() < 0.6
                                         ? std::optional<std::string>(
                                               kOccupations[rng.uniform_int(kOccupations.size())])
                                         : std::nullopt);
        user.attributes.emplace_back("relationship",
                                     rng.uniform() < 0.5
                                         ? std::optional<std::string>(kRelationship[rng.uniform_int(
                                               kRelationship.size())])
                                         : std::nullopt);
        user.follower_count = followers[static_cast<std::size_t>(i)];
        user.group_names.push_back(group_name);
        user.mbti = parse_mbti(kClassMbti[static_cast<std::size_t>(label)]);
        user.enneagram = label + 1;
        bundle.users.push_back(std::move(user));
        bundle.external_ids.push_back("u" + std::to_string(i));
    }

    for (const auto& user : bundle.users)
        for (const auto& g : user.group_names) bundle.group_index[g].push_back(user.user_id);

    // A couple of in-group links per user plus sparse cross-group noise.
    for (int i = 0; i < config.num_users; ++i) {
        const int group = std::min(i / per_group, config.num_groups - 1);
        const int base = group * per_group;
        const int span = (group == config.num_groups - 1) ? config.num_users - base : per_group;
        for (int l = 0; l < 2; ++l) {
            const int peer = base + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(span)));
            if (peer != i) bundle.edges.push_back({i, peer, EdgeKind::FOLLOW});
        }
        if (rng.uniform() < 0.1) {
            const int other =
                static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config.num_users)));
            if (other != i) bundle.edges.push_back({i, other, EdgeKind::MENTION});
        }
    }
    return bundle;
}

void write_fixture_files(const DatasetBundle& bundle, const std::string& users_path,
                         const std::string& edges_path) {
    std::ofstream users_out(users_path);
    if (!users_out) throw IoError("cannot open for writing: " + users_path);
    for (const auto& user : bundle.users) {
        nlohmann::json obj;
        obj["id"] = bundle.external_ids[static_cast<std::size_t>(user.user_id)];
        obj["username"] = user.username;
        for (const auto& [key, value] : user.attributes)
            if (value) obj[key] = *value;
        if (user.follower_count) obj["followers"] = *user.follower_count;
        if (!user.group_names.empty()) obj["groups"] = user.group_names;
        if (user.mbti) obj["mbti"] = format_mbti(*user.mbti);
        if (user.enneagram) obj["enneagram"] = std::to_string(*user.enneagram);
        users_out << obj.dump() << "\n";
    }

    std::ofstream edges_out(edges_path);
    if (!edges_out) throw IoError("cannot open for writing: " + edges_path);
    edges_out << "src,dst,kind\n";
    for (const auto& edge : bundle.edges)
        edges_out << bundle.external_ids[static_cast<std::size_t>(edge.src)] << ","
                  << bundle.external_ids[static_cast<std::size_t>(edge.dst)] << ","
                  << edge_kind_name(edge.kind) << "\n";
}

}  // namespace hypersona
