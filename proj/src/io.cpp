#include "hypersona/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hypersona {

namespace {

using nlohmann::json;

constexpr char kEmbeddingMagic[8] = {'H', 'S', 'E', 'M', 'B', '0', '0', '1'};
constexpr char kCheckpointMagic[8] = {'H', 'S', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in, const std::string& what) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw IoError("truncated file while reading " + what);
    return v;
}

void write_doubles(std::ofstream& out, const double* data, std::size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* data, std::size_t n, const std::string& what) {
    if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double))))
        throw IoError("truncated file while reading " + what);
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string d2s(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string provenance_comment(const Provenance& prov) {
    return "# config_hash=" + hex64(prov.config_hash) + " seed=" + std::to_string(prov.seed) +
           " version=" + prov.version;
}

void write_hypergraph(const std::string& path, const std::string& weights_path,
                      const Hypergraph& graph, const Provenance& prov) {
    graph.validate();
    auto out = open_out(path);
    out << provenance_comment(prov) << "\n";
    out << "# nodes=" << graph.num_nodes << " edges=" << graph.edges.size() << "\n";
    for (const auto& e : graph.edges) {
        out << e.edge_id << "\t" << kind_name(e.kind) << "\t";
        for (std::size_t i = 0; i < e.members.size(); ++i) {
            if (i) out << " ";
            out << e.members[i];
        }
        out << "\n";
    }

    auto wout = open_out(weights_path);
    wout << provenance_comment(prov) << "\n";
    wout << "U";
    for (double u : graph.node_weights) wout << " " << d2s(u);
    wout << "\nW";
    for (double w : graph.edge_weights) wout << " " << d2s(w);
    wout << "\n";
}

Hypergraph read_hypergraph(const std::string& path, const std::string& weights_path) {
    auto in = open_in(path);
    Hypergraph graph;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("nodes=");
            if (pos != std::string::npos)
                graph.num_nodes = std::stoi(line.substr(pos + 6));
            continue;
        }
        std::stringstream ss(line);
        std::string id_field, kind_field, members_field;
        if (!std::getline(ss, id_field, '\t') || !std::getline(ss, kind_field, '\t') ||
            !std::getline(ss, members_field))
            throw ParseError("hypergraph store: malformed line: " + line);
        Hyperedge e;
        e.edge_id = std::stoi(id_field);
        e.kind = kind_from_name(kind_field);
        std::stringstream ms(members_field);
        int m;
        while (ms >> m) e.members.push_back(m);
        graph.edges.push_back(std::move(e));
    }

    auto win = open_in(weights_path);
    while (std::getline(win, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string tag;
        ss >> tag;
        double v;
        if (tag == "U")
            while (ss >> v) graph.node_weights.push_back(v);
        else if (tag == "W")
            while (ss >> v) graph.edge_weights.push_back(v);
        else
            throw ParseError("weights store: unknown section \"" + tag + "\"");
    }
    graph.validate();
    return graph;
}

void write_embeddings(const std::string& bin_path, const std::string& txt_path,
                      const FeatureMatrix& features, const Provenance& prov) {
    auto out = open_out(bin_path, /*binary=*/true);
    out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
    write_u64(out, prov.config_hash);
    write_u64(out, prov.seed);
    write_u64(out, features.rows());
    write_u64(out, features.cols());
    write_doubles(out, features.data().data(), features.data().size());

    auto txt = open_out(txt_path);
    txt << provenance_comment(prov) << "\n";
    txt << features.rows() << " " << features.cols() << "\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) {
            if (j) txt << " ";
            txt << d2s(features(i, j));
        }
        txt << "\n";
    }
}

FeatureMatrix read_embeddings(const std::string& bin_path) {
    auto in = open_in(bin_path, /*binary=*/true);
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) != 0)
        throw IoError("not an embedding store: " + bin_path);
    read_u64(in, "config hash");
    read_u64(in, "seed");
    const std::uint64_t rows = read_u64(in, "row count");
    const std::uint64_t cols = read_u64(in, "column count");
    FeatureMatrix features(rows, cols);
    read_doubles(in, features.data().data(), features.data().size(), "embedding rows");
    return features;
}

void write_checkpoint(const std::string& path, const ModelParams& params, const Provenance& prov) {
    auto out = open_out(path, /*binary=*/true);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_u64(out, prov.config_hash);
    write_u64(out, prov.seed);
    write_u64(out, params.layers.size());
    write_u64(out, params.head_weight.rows());
    write_u64(out, params.head_weight.cols());
    for (const auto& layer : params.layers) {
        write_u64(out, layer.theta.rows());
        write_u64(out, layer.theta.cols());
        write_u64(out, layer.skip_proj.has_value() ? 1 : 0);
        write_doubles(out, layer.theta.data().data(), layer.theta.data().size());
        write_doubles(out, layer.bn.scale.data(), layer.bn.scale.size());
        write_doubles(out, layer.bn.shift.data(), layer.bn.shift.size());
        write_doubles(out, layer.bn.running_mean.data(), layer.bn.running_mean.size());
        write_doubles(out, layer.bn.running_var.data(), layer.bn.running_var.size());
        if (layer.skip_proj)
            write_doubles(out, layer.skip_proj->data().data(), layer.skip_proj->data().size());
    }
    write_doubles(out, params.head_weight.data().data(), params.head_weight.data().size());
    write_doubles(out, params.head_bias.data(), params.head_bias.size());
}

std::pair<ModelParams, Provenance> read_checkpoint(const std::string& path) {
    auto in = open_in(path, /*binary=*/true);
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw IoError("not a model checkpoint: " + path);
    Provenance prov;
    prov.config_hash = read_u64(in, "config hash");
    prov.seed = read_u64(in, "seed");
    const std::uint64_t num_layers = read_u64(in, "layer count");
    const std::uint64_t head_rows = read_u64(in, "head rows");
    const std::uint64_t head_cols = read_u64(in, "head cols");

    ModelParams params;
    for (std::uint64_t l = 0; l < num_layers; ++l) {
        const std::uint64_t rows = read_u64(in, "theta rows");
        const std::uint64_t cols = read_u64(in, "theta cols");
        const std::uint64_t has_skip = read_u64(in, "skip flag");
        LayerParams layer;
        layer.theta = Matrix(rows, cols);
        read_doubles(in, layer.theta.data().data(), layer.theta.data().size(), "theta");
        layer.bn = BatchNormState::identity(cols);
        read_doubles(in, layer.bn.scale.data(), cols, "bn scale");
        read_doubles(in, layer.bn.shift.data(), cols, "bn shift");
        read_doubles(in, layer.bn.running_mean.data(), cols, "bn running mean");
        read_doubles(in, layer.bn.running_var.data(), cols, "bn running var");
        if (has_skip) {
            layer.skip_proj = Matrix(rows, cols);
            read_doubles(in, layer.skip_proj->data().data(), layer.skip_proj->data().size(),
                         "skip projection");
        }
        params.layers.push_back(std::move(layer));
    }
    params.head_weight = Matrix(head_rows, head_cols);
    read_doubles(in, params.head_weight.data().data(), params.head_weight.data().size(),
                 "head weight");
    params.head_bias.assign(head_cols, 0.0);
    read_doubles(in, params.head_bias.data(), head_cols, "head bias");
    return {std::move(params), prov};
}

void write_history(const std::string& path, const std::vector<EpochStats>& history,
                   const Provenance& prov) {
    auto out = open_out(path);
    out << provenance_comment(prov) << "\n";
    out << "epoch,train_loss,val_accuracy\n";
    for (const auto& e : history)
        out << e.epoch << "," << d2s(e.train_loss) << "," << d2s(e.val_accuracy) << "\n";
}

void write_profiles(const std::string& path, const std::vector<EnhancedProfile>& profiles,
                    const Provenance& prov) {
    auto out = open_out(path);
    json head = {{"type", "provenance"},
                 {"config_hash", hex64(prov.config_hash)},
                 {"seed", prov.seed},
                 {"version", prov.version}};
    out << head.dump() << "\n";
    for (const auto& p : profiles) {
        json obj = {{"user_id", p.user_id},          {"model_id", p.model_id},
                    {"prompt_hash", p.prompt_hash},  {"narrative", p.narrative},
                    {"fallback", p.fallback},        {"created_at", p.created_at}};
        out << obj.dump() << "\n";
    }
}

std::vector<EnhancedProfile> read_profiles(const std::string& path) {
    auto in = open_in(path);
    std::vector<EnhancedProfile> profiles;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (obj.value("type", "") == "provenance") continue;
        EnhancedProfile p;
        p.user_id = obj.at("user_id").get<int>();
        p.model_id = obj.at("model_id").get<std::string>();
        p.prompt_hash = obj.at("prompt_hash").get<std::uint64_t>();
        p.narrative = obj.at("narrative").get<std::string>();
        p.fallback = obj.value("fallback", false);
        p.created_at = obj.value("created_at", static_cast<std::int64_t>(0));
        profiles.push_back(std::move(p));
    }
    return profiles;
}

}  // namespace hypersona
