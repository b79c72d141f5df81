// fpe — train, inspect, and drive footprint-engine models from the shell.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fpe/cognition.hpp>
#include <fpe/io.hpp>
#include <fpe/metacluster.hpp>
#include <fpe/persistence.hpp>
#include <fpe/synthetic.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fpe;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 10;
constexpr int kExitFormat = 11;
constexpr int kExitValidation = 12;
constexpr int kExitNoMatch = 13;
constexpr int kExitLookup = 14;
constexpr int kExitDimension = 15;
constexpr int kExitArgument = 16;

// --- config reading (numbers may be plain JSON numbers or decimal strings) ---

double cfg_scalar(const json& j, const std::string& field, std::optional<double> fallback = {}) {
    if (!j.contains(field)) {
        if (fallback)
            return *fallback;
        throw FormatError("config: missing field '" + field + "'");
    }
    const json& v = j.at(field);
    if (v.is_number())
        return v.get<double>();
    if (v.is_string())
        return persist::parse_scalar(v.get<std::string>(), field);
    throw FormatError("config: field '" + field + "' must be a number");
}

std::uint64_t cfg_u64(const json& j, const std::string& field,
                      std::optional<std::uint64_t> fallback = {}) {
    if (!j.contains(field)) {
        if (fallback)
            return *fallback;
        throw FormatError("config: missing field '" + field + "'");
    }
    const json& v = j.at(field);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw FormatError("config: field '" + field + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string cfg_string(const json& j, const std::string& field,
                       std::optional<std::string> fallback = {}) {
    if (!j.contains(field)) {
        if (fallback)
            return *fallback;
        throw FormatError("config: missing field '" + field + "'");
    }
    if (!j.at(field).is_string())
        throw FormatError("config: field '" + field + "' must be a string");
    return j.at(field).get<std::string>();
}

ClusterPolicy cfg_policy(const json& j) {
    ClusterPolicy p;
    p.theta_seed = cfg_scalar(j, "theta_seed", p.theta_seed);
    p.theta_step = cfg_scalar(j, "theta_step", p.theta_step);
    p.theta_max = cfg_scalar(j, "theta_max", p.theta_max);
    p.spawn_count = cfg_u64(j, "spawn_count", p.spawn_count);
    p.max_depth = static_cast<std::size_t>(cfg_u64(j, "max_depth", p.max_depth));
    p.validate();
    return p;
}

Codec cfg_codec(const json& j) {
    std::string type = cfg_string(j, "type");
    if (type == "image")
        return ImageCodec(static_cast<std::size_t>(cfg_u64(j, "width")),
                          static_cast<std::size_t>(cfg_u64(j, "height")),
                          cfg_scalar(j, "threshold", 0.5));
    if (type == "categorical")
        return CategoricalCodec(static_cast<std::size_t>(cfg_u64(j, "symbols")),
                                static_cast<std::size_t>(cfg_u64(j, "block_size")));
    throw FormatError("config: unknown codec type '" + type + "'");
}

MetaclusterSpec cfg_metacluster_spec(const json& model) {
    MetaclusterSpec spec;
    if (!model.contains("channels") || !model.at("channels").is_array())
        throw FormatError("config: model.channels must be an array");
    for (const json& c : model.at("channels")) {
        ChannelSpec ch;
        ch.name = cfg_string(c, "name");
        if (c.contains("codec") && !c.at("codec").is_null())
            ch.codec = cfg_codec(c.at("codec"));
        ch.dim = static_cast<std::size_t>(cfg_u64(c, "dim", ch.codec ? codec_dim(*ch.codec) : 0));
        spec.channels.push_back(std::move(ch));
    }
    if (!model.contains("nodes") || !model.at("nodes").is_array())
        throw FormatError("config: model.nodes must be an array");
    for (const json& n : model.at("nodes")) {
        NodeSpec node;
        node.name = cfg_string(n, "name");
        if (!n.contains("children") || !n.at("children").is_array())
            throw FormatError("config: node '" + node.name + "' needs a children array");
        for (const json& child : n.at("children"))
            node.children.push_back(child.get<std::string>());
        node.policy = n.contains("policy") ? cfg_policy(n.at("policy")) : ClusterPolicy{};
        spec.nodes.push_back(std::move(node));
    }
    if (model.contains("binarize_tau") && !model.at("binarize_tau").is_null())
        spec.binarize_tau = cfg_scalar(model, "binarize_tau");
    return spec;
}

// A "cluster" config is sugar for a single-node metacluster over one channel.
MetaclusterSpec cfg_single_cluster_spec(const json& model) {
    if (!model.contains("codec"))
        throw FormatError("config: cluster model needs a codec");
    Codec codec = cfg_codec(model.at("codec"));
    std::string channel = cfg_string(model, "channel", "image");
    MetaclusterSpec spec;
    spec.channels.push_back({channel, codec_dim(codec), codec});
    spec.nodes.push_back(
        {"root", {channel}, model.contains("policy") ? cfg_policy(model.at("policy"))
                                                     : ClusterPolicy{}});
    return spec;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(std::string("config is not valid JSON: ") + e.what());
    }
}

// --- common helpers -----------------------------------------------------------

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

void write_report(const fs::path& path, const json& report) {
    write_text(path, report.dump(2) + "\n");
}

json cluster_stats(const Cluster& c) {
    json stats;
    stats["dim"] = static_cast<std::uint64_t>(c.dim());
    stats["depth"] = static_cast<std::uint64_t>(c.depth());
    stats["total_footprints"] = c.total_footprints();
    json cells = json::array();
    for (const auto& node : c.cells()) {
        json cell;
        cell["id"] = node.id;
        cell["depth"] = static_cast<std::uint64_t>(node.depth);
        cell["theta"] = node.cell.theta();
        cell["footprints"] = static_cast<std::uint64_t>(node.cell.size());
        cell["learned"] = node.cell.learned_count();
        cells.push_back(std::move(cell));
    }
    stats["cells"] = std::move(cells);
    return stats;
}

json model_stats(const persist::Model& model) {
    json stats;
    if (const auto* cluster = std::get_if<Cluster>(&model)) {
        stats["kind"] = "cluster";
        stats["cluster"] = cluster_stats(*cluster);
        return stats;
    }
    const Metacluster* mc = nullptr;
    if (const auto* m = std::get_if<Metacluster>(&model)) {
        stats["kind"] = "metacluster";
        mc = m;
    } else {
        const auto& sc = std::get<SyntheticCognition>(model);
        stats["kind"] = "cognition";
        stats["mode"] = sc.mode() == AgentMode::episodic ? "episodic" : "reactive";
        stats["motor_channel"] = sc.motor_channel();
        if (sc.declarative()) {
            stats["declarative"] = cluster_stats(sc.declarative()->episode_cluster());
            stats["declarative"]["episode_length"] =
                static_cast<std::uint64_t>(sc.declarative()->episode_length());
            stats["declarative"]["buffered_frames"] =
                static_cast<std::uint64_t>(sc.declarative()->frames().size());
        }
        mc = &sc.motoperceptive();
    }
    json nodes;
    for (const std::string& name : mc->node_names())
        nodes[name] = cluster_stats(mc->node_cluster(name));
    stats["nodes"] = std::move(nodes);
    return stats;
}

const Metacluster& metacluster_of(const persist::Model& model) {
    if (const auto* mc = std::get_if<Metacluster>(&model))
        return *mc;
    if (const auto* sc = std::get_if<SyntheticCognition>(&model))
        return sc->motoperceptive();
    throw ArgumentError("this command needs a metacluster or cognition model");
}

const Cluster& select_cluster(const persist::Model& model, const std::string& node) {
    if (const auto* cluster = std::get_if<Cluster>(&model)) {
        if (!node.empty())
            throw ArgumentError("--node only applies to metacluster/cognition models");
        return *cluster;
    }
    if (const auto* sc = std::get_if<SyntheticCognition>(&model); sc && node == "declarative") {
        if (!sc->declarative())
            throw LookupError("model has no declarative memory");
        return sc->declarative()->episode_cluster();
    }
    const Metacluster& mc = metacluster_of(model);
    return mc.node_cluster(node.empty() ? mc.root_name() : node);
}

// --- train ---------------------------------------------------------------------

int cmd_train(const std::string& config_path, const std::string& dataset_override,
              std::optional<std::uint64_t> seed_override, const std::string& out_override) {
    json config = load_config(config_path);
    if (!config.contains("model"))
        throw FormatError("config: missing model section");
    const json& model_cfg = config.at("model");

    std::string kind = cfg_string(model_cfg, "kind", "cluster");
    if (kind != "cluster" && kind != "metacluster")
        throw ArgumentError("train supports cluster and metacluster configs; demos train "
                            "cognition models");
    MetaclusterSpec spec = kind == "cluster" ? cfg_single_cluster_spec(model_cfg)
                                             : cfg_metacluster_spec(model_cfg);
    Metacluster mc(spec);

    // Dataset: IDX images streamed through the model's single image channel.
    std::string images_path = dataset_override;
    std::optional<std::string> labels_path;
    std::optional<std::uint64_t> label_filter;
    std::uint64_t limit = 0;
    if (config.contains("dataset")) {
        const json& ds = config.at("dataset");
        if (images_path.empty())
            images_path = cfg_string(ds, "images", "");
        if (ds.contains("labels"))
            labels_path = cfg_string(ds, "labels");
        if (ds.contains("label_filter"))
            label_filter = cfg_u64(ds, "label_filter");
        limit = cfg_u64(ds, "limit", std::uint64_t{0});
    }
    if (images_path.empty())
        throw ArgumentError("train needs a dataset (--dataset or config dataset.images)");
    if (label_filter && !labels_path)
        throw ArgumentError("dataset.label_filter needs dataset.labels");

    const ImageCodec* image_codec = nullptr;
    std::string image_channel;
    for (const ChannelSpec& ch : mc.spec().channels) {
        if (ch.codec && std::holds_alternative<ImageCodec>(*ch.codec)) {
            image_codec = &std::get<ImageCodec>(*ch.codec);
            image_channel = ch.name;
            break;
        }
    }
    if (image_codec == nullptr)
        throw ArgumentError("train needs a channel with an image codec");

    io::IdxImages images = io::load_idx_images(images_path);
    std::optional<io::IdxLabels> labels;
    if (labels_path) {
        labels = io::load_idx_labels(*labels_path);
        if (labels->labels.size() != images.count)
            throw ValidationError("dataset labels and images disagree on sample count");
    }
    if (images.rows * images.cols != image_codec->dim())
        throw DimensionError("dataset image size does not match the image codec");

    fs::path out_dir(out_override.empty() ? cfg_string(config, "out", "out") : out_override);
    fs::create_directories(out_dir);

    auto started = std::chrono::steady_clock::now();
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < images.count; ++i) {
        if (limit && used >= limit)
            break;
        if (label_filter && labels->labels[i] != *label_filter)
            continue;
        ChannelInputs inputs;
        inputs.emplace(image_channel, image_codec->encode(images.sample(i)));
        mc.process(inputs, true);
        ++used;
    }
    auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();

    fs::path model_path = out_dir / "model.fpe.json";
    persist::save_model(mc, model_path);

    json stats = model_stats(persist::Model(std::move(mc)));
    stats["samples"] = used;
    stats["wall_ms"] = wall_ms;
    stats["model"] = model_path.string();
    (void)seed_override; // training is stream-ordered; the seed shapes nothing here
    write_report(out_dir / "stats.json", stats);

    std::cout << "trained " << used << " samples in " << wall_ms << " ms -> " << model_path.string()
              << "\n";
    return 0;
}

// --- stats ----------------------------------------------------------------------

int cmd_stats(const std::string& model_path) {
    persist::Model model = persist::load_model(model_path);
    std::cout << model_stats(model).dump(2) << "\n";
    return 0;
}

// --- render ---------------------------------------------------------------------

struct Selector {
    bool seed_only = false;
    std::optional<int> cell;
    std::optional<FootprintId> footprint;
};

Selector parse_selector(const std::string& text) {
    Selector sel;
    if (text == "seed") {
        sel.seed_only = true;
        return sel;
    }
    if (text.rfind("cell:", 0) == 0) {
        std::string rest = text.substr(5);
        auto fp_at = rest.find(":fp:");
        try {
            if (fp_at == std::string::npos) {
                sel.cell = std::stoi(rest);
            } else {
                sel.cell = std::stoi(rest.substr(0, fp_at));
                sel.footprint = std::stoull(rest.substr(fp_at + 4));
            }
            return sel;
        } catch (const std::exception&) {
            // fall through
        }
    }
    throw LookupError("bad selector '" + text + "' (use seed | cell:<id> | cell:<id>:fp:<id>)");
}

int cmd_render(const std::string& model_path, const std::string& selector_text,
               const std::string& node, const std::string& out_dir_text) {
    persist::Model model = persist::load_model(model_path);
    Selector sel = parse_selector(selector_text);

    if (std::holds_alternative<Cluster>(model))
        throw ArgumentError("render needs a model with channel codecs (metacluster/cognition)");
    const Metacluster& mc = metacluster_of(model);
    std::string cluster_name = node.empty() ? mc.root_name() : node;
    const Cluster& cluster = mc.node_cluster(cluster_name); // LookupError on bad node

    // Footprints are decodable as images when the cluster consumes exactly
    // one image-codec channel.
    const ImageCodec* codec = nullptr;
    const SegmentLayout& layout = mc.node_layout(cluster_name);
    if (layout.segments().size() == 1) {
        const std::string& child = layout.segments()[0].name;
        for (const ChannelSpec& ch : mc.spec().channels) {
            if (ch.name == child && ch.codec && std::holds_alternative<ImageCodec>(*ch.codec))
                codec = &std::get<ImageCodec>(*ch.codec);
        }
    }
    if (codec == nullptr)
        throw ArgumentError("render: node '" + cluster_name +
                            "' does not consume a single image channel");

    if (sel.cell) {
        const auto& cell_node = cluster.cell(*sel.cell); // LookupError on bad id
        if (sel.footprint)
            cell_node.cell.footprint(*sel.footprint); // LookupError on bad id
    }

    fs::path out_dir(out_dir_text);
    fs::create_directories(out_dir);

    std::vector<fs::path> written;
    for (const auto& cell_node : cluster.cells()) {
        if (sel.seed_only && cell_node.parent != -1)
            continue;
        if (sel.cell && cell_node.id != *sel.cell)
            continue;
        for (const Footprint& fp : cell_node.cell.footprints()) {
            if (sel.footprint && fp.id() != *sel.footprint)
                continue;
            auto bytes = codec->decode(fp.projection());
            fs::path path = out_dir / ("cell" + std::to_string(cell_node.id) + "_fp" +
                                       std::to_string(fp.id()) + ".pgm");
            io::write_pgm(path, codec->width, codec->height, bytes);
            written.push_back(path);
        }
    }
    if (written.empty())
        throw LookupError("selector matched no footprints");

    for (const auto& path : written)
        std::cout << path.string() << "\n";
    return 0;
}

// --- export-dot -----------------------------------------------------------------

int cmd_export_dot(const std::string& model_path, const std::string& node,
                   const std::string& out_dir_text, const std::string& name) {
    persist::Model model = persist::load_model(model_path);
    const Cluster& cluster = select_cluster(model, node);
    fs::path out_dir(out_dir_text);
    fs::create_directories(out_dir);
    fs::path path = out_dir / name;
    write_text(path, cluster.to_dot());
    std::cout << path.string() << "\n";
    return 0;
}

// --- complete -------------------------------------------------------------------

ActivationVector parse_channel_input(const Metacluster& mc, const std::string& channel,
                                     const std::string& value) {
    const ChannelSpec& ch = mc.channel(channel);
    if (!value.empty() && value[0] == '@') {
        if (!ch.codec || !std::holds_alternative<ImageCodec>(*ch.codec))
            throw ArgumentError("channel '" + channel + "' does not take image files");
        const auto& codec = std::get<ImageCodec>(*ch.codec);
        io::PgmImage img = io::read_pgm(value.substr(1));
        if (img.width != codec.width || img.height != codec.height)
            throw DimensionError("input image size does not match channel '" + channel + "'");
        return codec.encode(img.pixels);
    }
    if (!ch.codec || !std::holds_alternative<CategoricalCodec>(*ch.codec))
        throw ArgumentError("channel '" + channel + "' does not take symbols");
    try {
        return std::get<CategoricalCodec>(*ch.codec).encode(std::stoull(value));
    } catch (const std::invalid_argument&) {
        throw ArgumentError("channel '" + channel + "' input must be a symbol index or @file.pgm");
    } catch (const std::out_of_range&) {
        throw ArgumentError("channel '" + channel + "' symbol out of range");
    }
}

int cmd_complete(const std::string& model_path, const std::string& target,
                 const std::vector<std::string>& input_args, const std::string& out_dir_text) {
    persist::Model model = persist::load_model(model_path);
    const Metacluster& mc = metacluster_of(model);

    ChannelInputs inputs;
    for (const std::string& arg : input_args) {
        auto eq = arg.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("--input expects <channel>=<symbol | @file.pgm>");
        std::string channel = arg.substr(0, eq);
        inputs.emplace(channel, parse_channel_input(mc, channel, arg.substr(eq + 1)));
    }

    auto completed = mc.complete(inputs, target);
    if (!completed) {
        std::cout << "{\"no_match\": true}\n";
        return kExitNoMatch;
    }

    json report;
    report["target"] = target;
    report["no_match"] = false;
    const ChannelSpec& ch = mc.channel(target);
    if (ch.codec && std::holds_alternative<CategoricalCodec>(*ch.codec)) {
        auto [symbol, confidence] = std::get<CategoricalCodec>(*ch.codec).decode(*completed);
        report["decoded_symbol"] = symbol;
        report["confidence"] = confidence;
    } else if (ch.codec && std::holds_alternative<ImageCodec>(*ch.codec)) {
        const auto& codec = std::get<ImageCodec>(*ch.codec);
        fs::path out_dir(out_dir_text);
        fs::create_directories(out_dir);
        fs::path path = out_dir / ("completed_" + target + ".pgm");
        io::write_pgm(path, codec.width, codec.height, codec.decode(*completed));
        report["image"] = path.string();
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

// --- demos ----------------------------------------------------------------------

int cmd_demo_sensorimotor(std::uint64_t seed, int passes, int noise_trials,
                          const std::string& out_dir_text) {
    auto corpus = synthetic::make_sensorimotor_corpus(seed);
    Metacluster mc(corpus.spec);
    for (int pass = 0; pass < passes; ++pass)
        for (const auto& pattern : corpus.patterns)
            mc.process(pattern, true);

    fs::path out_dir(out_dir_text);
    fs::create_directories(out_dir);

    json report;
    report["kind"] = "sensorimotor";
    report["seed"] = seed;
    report["passes"] = passes;
    report["patterns"] = corpus.patterns.size();

    bool any_no_match = false;
    int clean_correct = 0;
    json per_pattern = json::array();
    for (std::size_t p = 0; p < corpus.patterns.size(); ++p) {
        ChannelInputs sensors = corpus.patterns[p];
        sensors.erase("motor");
        auto motor = mc.complete(sensors, "motor");
        json entry;
        entry["pattern"] = p;
        if (!motor) {
            entry["no_match"] = true;
            any_no_match = true;
        } else {
            auto [symbol, confidence] = corpus.motor_codec.decode(*motor);
            entry["decoded"] = symbol;
            entry["confidence"] = confidence;
            entry["correct"] = symbol == corpus.motor_symbols[p];
            clean_correct += symbol == corpus.motor_symbols[p] ? 1 : 0;
        }
        per_pattern.push_back(std::move(entry));
    }
    report["clean"] = {{"correct", clean_correct},
                       {"total", corpus.patterns.size()},
                       {"per_pattern", per_pattern}};

    std::mt19937 noise_rng(static_cast<std::uint32_t>(seed ^ 0x9e3779b9));
    int noisy_correct = 0;
    int noisy_total = 0;
    for (std::size_t p = 0; p < corpus.patterns.size() && !any_no_match; ++p) {
        for (int trial = 0; trial < noise_trials; ++trial) {
            ChannelInputs sensors = corpus.patterns[p];
            sensors.erase("motor");
            sensors["image"] = synthetic::flip_bits(sensors["image"], 0.1, noise_rng);
            auto motor = mc.complete(sensors, "motor");
            ++noisy_total;
            if (motor && corpus.motor_codec.decode(*motor).first == corpus.motor_symbols[p])
                ++noisy_correct;
        }
    }
    report["noise"] = {{"flip_rate", 0.1}, {"trials", noisy_total}, {"correct", noisy_correct}};
    report["no_match"] = any_no_match;

    persist::save_model(mc, out_dir / "model.fpe.json");
    report["model"] = (out_dir / "model.fpe.json").string();
    write_report(out_dir / "sensorimotor_report.json", report);

    std::cout << "clean " << clean_correct << "/" << corpus.patterns.size() << ", noisy "
              << noisy_correct << "/" << noisy_total << " -> "
              << (out_dir / "sensorimotor_report.json").string() << "\n";
    return any_no_match ? kExitNoMatch : 0;
}

json evaluate_two_context(SyntheticCognition& agent, const synthetic::TwoContextCorpus& corpus) {
    json result;
    auto probe_only = [&] {
        ChannelInputs inputs;
        inputs.emplace("sensor", corpus.sensor_codec.encode(corpus.probe));
        return inputs;
    };

    agent.train_step(corpus.encode_step(corpus.context_a, 0));
    auto after_a = agent.step(probe_only());
    agent.train_step(corpus.encode_step(corpus.context_c, 2));
    auto after_c = agent.step(probe_only());

    int correct = 0;
    if (after_a && after_a->decoded_motor) {
        result["after_a"] = after_a->decoded_motor->first;
        result["after_a_mode"] =
            after_a->mode_used == AgentMode::episodic ? "episodic" : "reactive";
        result["after_a_fell_back"] = after_a->fell_back;
        correct += after_a->decoded_motor->first == corpus.motor_after_a ? 1 : 0;
    }
    if (after_c && after_c->decoded_motor) {
        result["after_c"] = after_c->decoded_motor->first;
        result["after_c_mode"] =
            after_c->mode_used == AgentMode::episodic ? "episodic" : "reactive";
        result["after_c_fell_back"] = after_c->fell_back;
        correct += after_c->decoded_motor->first == corpus.motor_after_c ? 1 : 0;
    }
    result["identical"] = after_a && after_c && after_a->motor == after_c->motor;
    result["correct"] = correct;
    result["total"] = 2;
    return result;
}

int cmd_demo_episodic(std::uint64_t seed, const std::string& out_dir_text) {
    auto corpus = synthetic::make_two_context_corpus();

    auto train = [&](SyntheticCognition& agent) {
        for (int pass = 0; pass < 3; ++pass)
            for (const auto& seq : corpus.sequences)
                for (const auto& [sensor, motor] : seq)
                    agent.train_step(corpus.encode_step(sensor, motor));
    };

    SyntheticCognition reactive(Metacluster(corpus.spec), "motor", AgentMode::reactive);
    SyntheticCognition episodic_n2(Metacluster(corpus.spec), "motor", AgentMode::episodic, 2);
    SyntheticCognition episodic_n3(Metacluster(corpus.spec), "motor", AgentMode::episodic, 3);
    train(reactive);
    train(episodic_n2);
    train(episodic_n3);

    json report;
    report["kind"] = "episodic";
    report["seed"] = seed;
    report["reactive"] = evaluate_two_context(reactive, corpus);
    report["episodic_n2"] = evaluate_two_context(episodic_n2, corpus);
    report["episodic_n3"] = evaluate_two_context(episodic_n3, corpus);

    fs::path out_dir(out_dir_text);
    fs::create_directories(out_dir);
    persist::save_model(episodic_n3, out_dir / "model.fpe.json");
    report["model"] = (out_dir / "model.fpe.json").string();
    write_report(out_dir / "episodic_report.json", report);

    std::cout << "reactive " << report["reactive"]["correct"] << "/2 (identical="
              << report["reactive"]["identical"] << "), episodic n=3 "
              << report["episodic_n3"]["correct"] << "/2 -> "
              << (out_dir / "episodic_report.json").string() << "\n";
    return 0;
}

int dispatch_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (dynamic_cast<const DimensionError*>(&e))
        return kExitDimension;
    if (dynamic_cast<const LookupError*>(&e))
        return kExitLookup;
    if (dynamic_cast<const IoError*>(&e))
        return kExitIo;
    if (dynamic_cast<const FormatError*>(&e))
        return kExitFormat;
    if (dynamic_cast<const ValidationError*>(&e))
        return kExitValidation;
    if (dynamic_cast<const ArgumentError*>(&e))
        return kExitArgument;
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"footprint-engine: hierarchical pattern memory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string dataset_path;
    std::string model_path;
    std::string out_dir = "out";
    std::string node;
    std::string selector = "seed";
    std::string dot_name = "cluster.dot";
    std::string target;
    std::vector<std::string> inputs;
    std::uint64_t seed = 7;
    int passes = 3;
    int noise_trials = 20;

    auto* train = app.add_subcommand("train", "stream an IDX dataset through a model");
    train->add_option("--config", config_path, "run configuration (JSON)")->required();
    train->add_option("--dataset", dataset_path, "IDX image file (overrides config)");
    train->add_option("--seed", seed, "seed echo for reports");
    train->add_option("--out", out_dir, "output directory");

    auto* stats = app.add_subcommand("stats", "print statistics for a saved model");
    stats->add_option("--model", model_path, "model file (.fpe.json)")->required();

    auto* render = app.add_subcommand("render", "render footprints as PGM images");
    render->add_option("--model", model_path, "model file (.fpe.json)")->required();
    render->add_option("--select", selector, "seed | cell:<id> | cell:<id>:fp:<id>");
    render->add_option("--node", node, "cluster to render (default: root)");
    render->add_option("--out", out_dir, "output directory");

    auto* export_dot = app.add_subcommand("export-dot", "export a cluster tree as DOT");
    export_dot->add_option("--model", model_path, "model file (.fpe.json)")->required();
    export_dot->add_option("--node", node, "cluster to export (default: root)");
    export_dot->add_option("--out", out_dir, "output directory");
    export_dot->add_option("--name", dot_name, "output file name");

    auto* complete = app.add_subcommand("complete", "complete an absent channel from memory");
    complete->add_option("--model", model_path, "model file (.fpe.json)")->required();
    complete->add_option("--target", target, "channel to complete")->required();
    complete->add_option("--input", inputs, "<channel>=<symbol | @file.pgm> (repeatable)");
    complete->add_option("--out", out_dir, "output directory");

    auto* demo_sm = app.add_subcommand("demo-sensorimotor", "image+sound -> motor loop demo");
    demo_sm->add_option("--seed", seed, "corpus seed");
    demo_sm->add_option("--passes", passes, "training passes");
    demo_sm->add_option("--noise-trials", noise_trials, "noisy completions per pattern");
    demo_sm->add_option("--out", out_dir, "output directory");

    auto* demo_ep = app.add_subcommand("demo-episodic", "context disambiguation demo");
    demo_ep->add_option("--seed", seed, "report seed echo");
    demo_ep->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (train->parsed())
            return cmd_train(config_path, dataset_path,
                             train->count("--seed") ? std::optional<std::uint64_t>(seed)
                                                    : std::nullopt,
                             train->count("--out") ? out_dir : "");
        if (stats->parsed())
            return cmd_stats(model_path);
        if (render->parsed())
            return cmd_render(model_path, selector, node, out_dir);
        if (export_dot->parsed())
            return cmd_export_dot(model_path, node, out_dir, dot_name);
        if (complete->parsed())
            return cmd_complete(model_path, target, inputs, out_dir);
        if (demo_sm->parsed())
            return cmd_demo_sensorimotor(seed, passes, noise_trials, out_dir);
        if (demo_ep->parsed())
            return cmd_demo_episodic(seed, out_dir);
    } catch (const std::exception& e) {
        return dispatch_error(e);
    }
    return kExitUsage;
}
