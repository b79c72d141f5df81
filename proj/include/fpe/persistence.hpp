#pragma once

#include <charconv>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include <fpe/cognition.hpp>
#include <fpe/episodic.hpp>
#include <fpe/metacluster.hpp>

// Versioned, canonical on-disk form for every model level. Keys are sorted,
// reals are decimal strings with 17 significant digits (binary64 exact), so
// identical models serialize to identical bytes on any platform.

namespace fpe::persist {

using json = nlohmann::json;

inline constexpr const char* kMagic = "FPENG";
inline constexpr std::int64_t kVersion = 1;
inline constexpr const char* kExtension = ".fpe.json";

using Model = std::variant<Cluster, Metacluster, SyntheticCognition>;

// --- scalar formatting ------------------------------------------------------

inline std::string format_scalar(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (ec != std::errc())
        throw ArgumentError("cannot format scalar");
    return std::string(buf, ptr);
}

inline double parse_scalar(const std::string& text, const std::string& field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw FormatError("field '" + field + "' is not a decimal number");
    return v;
}

// --- structural field access (FormatError on shape problems) ----------------

inline const json& member(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field))
        throw FormatError("missing field '" + field + "'");
    return j.at(field);
}

inline std::uint64_t get_u64(const json& j, const std::string& field) {
    const json& v = member(j, field);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0))
        throw FormatError("field '" + field + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::int64_t get_i64(const json& j, const std::string& field) {
    const json& v = member(j, field);
    if (!v.is_number_integer())
        throw FormatError("field '" + field + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::string get_string(const json& j, const std::string& field) {
    const json& v = member(j, field);
    if (!v.is_string())
        throw FormatError("field '" + field + "' must be a string");
    return v.get<std::string>();
}

inline double get_scalar(const json& j, const std::string& field) {
    return parse_scalar(get_string(j, field), field);
}

inline const json& get_array(const json& j, const std::string& field) {
    const json& v = member(j, field);
    if (!v.is_array())
        throw FormatError("field '" + field + "' must be an array");
    return v;
}

// --- policies and codecs ----------------------------------------------------

inline json policy_to_json(const ClusterPolicy& p) {
    json j;
    j["theta_seed"] = format_scalar(p.theta_seed);
    j["theta_step"] = format_scalar(p.theta_step);
    j["theta_max"] = format_scalar(p.theta_max);
    j["spawn_count"] = p.spawn_count;
    j["max_depth"] = static_cast<std::uint64_t>(p.max_depth);
    return j;
}

inline ClusterPolicy policy_from_json(const json& j) {
    ClusterPolicy p;
    p.theta_seed = get_scalar(j, "theta_seed");
    p.theta_step = get_scalar(j, "theta_step");
    p.theta_max = get_scalar(j, "theta_max");
    p.spawn_count = get_u64(j, "spawn_count");
    p.max_depth = static_cast<std::size_t>(get_u64(j, "max_depth"));
    p.validate();
    return p;
}

inline json codec_to_json(const Codec& c) {
    json j;
    if (const auto* img = std::get_if<ImageCodec>(&c)) {
        j["type"] = "image";
        j["width"] = static_cast<std::uint64_t>(img->width);
        j["height"] = static_cast<std::uint64_t>(img->height);
        j["threshold"] = format_scalar(img->threshold);
    } else {
        const auto& cat = std::get<CategoricalCodec>(c);
        j["type"] = "categorical";
        j["symbols"] = static_cast<std::uint64_t>(cat.symbols);
        j["block_size"] = static_cast<std::uint64_t>(cat.block_size);
    }
    return j;
}

inline Codec codec_from_json(const json& j) {
    std::string type = get_string(j, "type");
    if (type == "image")
        return ImageCodec(static_cast<std::size_t>(get_u64(j, "width")),
                          static_cast<std::size_t>(get_u64(j, "height")),
                          get_scalar(j, "threshold"));
    if (type == "categorical")
        return CategoricalCodec(static_cast<std::size_t>(get_u64(j, "symbols")),
                                static_cast<std::size_t>(get_u64(j, "block_size")));
    throw FormatError("unknown codec type '" + type + "'");
}

// --- activation values ------------------------------------------------------

inline json values_to_json(const std::vector<Scalar>& values) {
    json arr = json::array();
    for (Scalar v : values)
        arr.push_back(format_scalar(v));
    return arr;
}

inline std::vector<Scalar> values_from_json(const json& arr, const std::string& field) {
    if (!arr.is_array())
        throw FormatError("field '" + field + "' must be an array");
    std::vector<Scalar> values;
    values.reserve(arr.size());
    for (const json& v : arr) {
        if (!v.is_string())
            throw FormatError("field '" + field + "' must hold decimal strings");
        values.push_back(parse_scalar(v.get<std::string>(), field));
    }
    return values;
}

// --- cluster ----------------------------------------------------------------

inline json cluster_to_json(const Cluster& c) {
    json j;
    j["dim"] = static_cast<std::uint64_t>(c.dim());
    j["policy"] = policy_to_json(c.policy());
    json cells = json::array();
    for (const Cluster::CellNode& node : c.cells()) {
        json cell;
        cell["id"] = static_cast<std::int64_t>(node.id);
        cell["depth"] = static_cast<std::uint64_t>(node.depth);
        cell["parent"] = static_cast<std::int64_t>(node.parent);
        cell["parent_footprint"] =
            node.parent < 0 ? std::int64_t{-1} : static_cast<std::int64_t>(node.parent_footprint);
        cell["theta"] = format_scalar(node.cell.theta());
        cell["next_id"] = node.cell.next_id();
        json footprints = json::array();
        for (const Footprint& fp : node.cell.footprints()) {
            json f;
            f["id"] = fp.id();
            f["count"] = fp.count();
            f["value"] = values_to_json(fp.value());
            footprints.push_back(std::move(f));
        }
        cell["footprints"] = std::move(footprints);
        json children = json::array();
        for (const auto& [fp_id, child] : node.children) {
            json link;
            link["footprint"] = fp_id;
            link["cell"] = static_cast<std::int64_t>(child);
            children.push_back(std::move(link));
        }
        cell["children"] = std::move(children);
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    return j;
}

inline Cluster cluster_from_json(const json& j) {
    std::size_t dim = static_cast<std::size_t>(get_u64(j, "dim"));
    if (dim == 0)
        throw ValidationError("cluster dim must be positive");
    ClusterPolicy policy = policy_from_json(member(j, "policy"));
    std::vector<Cluster::CellNode> nodes;
    for (const json& cell : get_array(j, "cells")) {
        int parent = static_cast<int>(get_i64(cell, "parent"));
        std::int64_t parent_fp = get_i64(cell, "parent_footprint");
        if ((parent < 0) != (parent_fp < 0))
            throw ValidationError("cell parent and parent_footprint disagree");

        double theta = get_scalar(cell, "theta");
        if (!(theta >= 0.0 && theta <= 1.0))
            throw ValidationError("cell theta outside [0,1]");
        std::vector<Footprint> footprints;
        for (const json& f : get_array(cell, "footprints")) {
            std::vector<Scalar> value = values_from_json(member(f, "value"), "value");
            if (value.size() != dim)
                throw ValidationError("footprint value length disagrees with cluster dim");
            footprints.push_back(
                Footprint::restore(get_u64(f, "id"), get_u64(f, "count"), std::move(value)));
        }
        std::map<FootprintId, int> children;
        for (const json& link : get_array(cell, "children"))
            children[get_u64(link, "footprint")] = static_cast<int>(get_i64(link, "cell"));
        nodes.push_back(Cluster::CellNode{
            static_cast<int>(get_i64(cell, "id")),
            static_cast<std::size_t>(get_u64(cell, "depth")),
            parent,
            parent_fp < 0 ? FootprintId{0} : static_cast<FootprintId>(parent_fp),
            Cell::restore(dim, theta, get_u64(cell, "next_id"), std::move(footprints)),
            std::move(children)});
    }
    return Cluster::restore(dim, policy, std::move(nodes));
}

// --- metacluster ------------------------------------------------------------

inline json spec_to_json(const MetaclusterSpec& spec) {
    json j;
    json channels = json::array();
    for (const ChannelSpec& ch : spec.channels) {
        json c;
        c["name"] = ch.name;
        c["dim"] = static_cast<std::uint64_t>(ch.dim);
        c["codec"] = ch.codec ? codec_to_json(*ch.codec) : json(nullptr);
        channels.push_back(std::move(c));
    }
    j["channels"] = std::move(channels);
    json nodes = json::array();
    for (const NodeSpec& n : spec.nodes) {
        json node;
        node["name"] = n.name;
        node["children"] = n.children;
        node["policy"] = policy_to_json(n.policy);
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    j["binarize_tau"] = spec.binarize_tau ? json(format_scalar(*spec.binarize_tau)) : json(nullptr);
    return j;
}

inline MetaclusterSpec spec_from_json(const json& j) {
    MetaclusterSpec spec;
    for (const json& c : get_array(j, "channels")) {
        ChannelSpec ch;
        ch.name = get_string(c, "name");
        ch.dim = static_cast<std::size_t>(get_u64(c, "dim"));
        const json& codec = member(c, "codec");
        if (!codec.is_null())
            ch.codec = codec_from_json(codec);
        spec.channels.push_back(std::move(ch));
    }
    for (const json& n : get_array(j, "nodes")) {
        NodeSpec node;
        node.name = get_string(n, "name");
        for (const json& child : get_array(n, "children")) {
            if (!child.is_string())
                throw FormatError("node children must be strings");
            node.children.push_back(child.get<std::string>());
        }
        node.policy = policy_from_json(member(n, "policy"));
        spec.nodes.push_back(std::move(node));
    }
    const json& tau = member(j, "binarize_tau");
    if (!tau.is_null())
        spec.binarize_tau = parse_scalar(tau.get<std::string>(), "binarize_tau");
    return spec;
}

inline json metacluster_to_json(const Metacluster& mc) {
    json j;
    j["spec"] = spec_to_json(mc.spec());
    json clusters;
    for (const std::string& name : mc.node_names())
        clusters[name] = cluster_to_json(mc.node_cluster(name));
    j["clusters"] = std::move(clusters);
    return j;
}

inline Metacluster metacluster_from_json(const json& j) {
    MetaclusterSpec spec = spec_from_json(member(j, "spec"));
    const json& clusters = member(j, "clusters");
    if (!clusters.is_object())
        throw FormatError("field 'clusters' must be an object");
    std::map<std::string, Cluster> loaded;
    for (const auto& [name, payload] : clusters.items())
        loaded.emplace(name, cluster_from_json(payload));
    return Metacluster::restore(std::move(spec), std::move(loaded));
}

// --- declarative memory and cognition ----------------------------------------

inline json declarative_to_json(const DeclarativeMemory& dm) {
    json j;
    j["frame_dim"] = static_cast<std::uint64_t>(dm.frame_dim());
    j["episode_length"] = static_cast<std::uint64_t>(dm.episode_length());
    json frames = json::array();
    for (const ActivationVector& f : dm.frames())
        frames.push_back(values_to_json(f.data()));
    j["frames"] = std::move(frames);
    j["cluster"] = cluster_to_json(dm.episode_cluster());
    return j;
}

inline DeclarativeMemory declarative_from_json(const json& j) {
    std::size_t frame_dim = static_cast<std::size_t>(get_u64(j, "frame_dim"));
    std::size_t episode_length = static_cast<std::size_t>(get_u64(j, "episode_length"));
    if (frame_dim == 0)
        throw ValidationError("frame_dim must be positive");
    if (episode_length < 2)
        throw ValidationError("episode_length must be at least 2");
    std::deque<ActivationVector> frames;
    for (const json& f : get_array(j, "frames")) {
        std::vector<Scalar> values = values_from_json(f, "frames");
        if (values.size() != frame_dim)
            throw ValidationError("frames entry does not match frame_dim");
        for (Scalar v : values)
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("frames value outside [0,1]");
        frames.push_back(ActivationVector(std::move(values)));
    }
    Cluster cluster = cluster_from_json(member(j, "cluster"));
    return DeclarativeMemory::restore(frame_dim, episode_length, std::move(frames),
                                      std::move(cluster));
}

inline json cognition_to_json(const SyntheticCognition& sc) {
    json j;
    j["mode"] = sc.mode() == AgentMode::episodic ? "episodic" : "reactive";
    j["motor_channel"] = sc.motor_channel();
    j["metacluster"] = metacluster_to_json(sc.motoperceptive());
    j["declarative"] = sc.declarative() ? declarative_to_json(*sc.declarative()) : json(nullptr);
    // Reserved slot; no behavior is defined for it yet.
    j["procedural"] = json(nullptr);
    return j;
}

inline SyntheticCognition cognition_from_json(const json& j) {
    std::string mode_name = get_string(j, "mode");
    AgentMode mode;
    if (mode_name == "reactive")
        mode = AgentMode::reactive;
    else if (mode_name == "episodic")
        mode = AgentMode::episodic;
    else
        throw FormatError("unknown agent mode '" + mode_name + "'");
    Metacluster mc = metacluster_from_json(member(j, "metacluster"));
    std::optional<DeclarativeMemory> dm;
    const json& declarative = member(j, "declarative");
    if (!declarative.is_null())
        dm = declarative_from_json(declarative);
    return SyntheticCognition::restore(std::move(mc), get_string(j, "motor_channel"), mode,
                                       std::move(dm));
}

// --- model documents ----------------------------------------------------------

inline json envelope(const char* kind, json payload) {
    json doc;
    doc["magic"] = kMagic;
    doc["version"] = kVersion;
    doc["kind"] = kind;
    doc["model"] = std::move(payload);
    return doc;
}

inline json model_to_json(const Cluster& m) { return envelope("cluster", cluster_to_json(m)); }
inline json model_to_json(const Metacluster& m) {
    return envelope("metacluster", metacluster_to_json(m));
}
inline json model_to_json(const SyntheticCognition& m) {
    return envelope("cognition", cognition_to_json(m));
}
inline json model_to_json(const Model& m) {
    return std::visit([](const auto& model) { return model_to_json(model); }, m);
}

template <typename ModelT>
std::string to_string(const ModelT& m) {
    return model_to_json(m).dump(2) + "\n";
}

inline Model model_from_json(const json& doc) {
    if (get_string(doc, "magic") != kMagic)
        throw FormatError("bad magic: not a model file");
    if (get_i64(doc, "version") != kVersion)
        throw FormatError("unsupported model file version");
    std::string kind = get_string(doc, "kind");
    const json& payload = member(doc, "model");
    if (kind == "cluster")
        return cluster_from_json(payload);
    if (kind == "metacluster")
        return metacluster_from_json(payload);
    if (kind == "cognition")
        return cognition_from_json(payload);
    throw FormatError("unknown model kind '" + kind + "'");
}

inline Model from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

template <typename ModelT>
void save_model(const ModelT& m, const std::filesystem::path& path) {
    std::string text = to_string(m);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out)
        throw IoError("failed writing model to '" + path.string() + "'");
}

inline Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw IoError("failed reading model from '" + path.string() + "'");
    return from_string(buffer.str());
}

} // namespace fpe::persist
