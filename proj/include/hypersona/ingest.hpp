#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypersona/types.hpp"

namespace hypersona {

enum class EdgeKind { FOLLOW, QUOTE, MENTION, OTHER };

std::string edge_kind_name(EdgeKind kind);
EdgeKind edge_kind_from_name(const std::string& name);  // unknown strings map to OTHER

// One pairwise interaction link between two dense user ids.
struct EdgeRecord {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::OTHER;
};

// A loaded and validated dataset. External string ids are re-mapped to dense
// integers 0..N-1 in file order; `external_ids` retains the mapping.
// `group_index` is always the exact inverse of UserRecord::group_names.
struct DatasetBundle {
    std::vector<UserRecord> users;
    std::vector<EdgeRecord> edges;
    std::map<std::string, std::vector<int>> group_index;
    std::vector<std::string> external_ids;
    std::vector<std::string> warnings;  // dropped edges, unparseable labels, ...

    int num_users() const { return static_cast<int>(users.size()); }
};

// Attribute keys every loaded record carries, in prompt order. Missing values
// are stored as explicit unknowns rather than omitted.
const std::vector<std::string>& standard_attribute_keys();

// Loads the users file (one JSON object per line; required field `id`) and
// the edges file (delimiter-separated, header `src,dst,kind`).
//
// Malformed lines and duplicate user ids are hard errors reported with line
// numbers. Edges with unknown endpoints or src == dst are dropped with a
// warning; the released raw data is fragmented enough that failing the whole
// load on a dangling link would be unusable.
DatasetBundle load_dataset(const std::string& users_path, const std::string& edges_path);

// Returns a copy with every personality label removed: the mbti/enneagram
// fields and any attribute key case-insensitively matching a label name.
// Idempotent; the input bundle is not modified.
DatasetBundle strip_labels(const DatasetBundle& bundle);

struct ValidationReport {
    int num_users = 0;
    int num_edges = 0;
    int num_groups = 0;
    std::map<std::string, int> missing_attribute_counts;
    double mbti_coverage = 0.0;
    double enneagram_coverage = 0.0;
    std::vector<int> isolated_nodes;       // zero groups and zero edges
    std::vector<std::string> empty_groups;
    std::vector<std::string> warnings;     // carried over from the load
};

ValidationReport validate(const DatasetBundle& bundle);

}  // namespace hypersona
