#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fpe/activation.hpp>
#include <fpe/cluster.hpp>
#include <fpe/codec.hpp>
#include <fpe/errors.hpp>

namespace fpe {

/// An embodiment channel: a named slot of fixed dimension, optionally bound
/// to the codec that produces/interprets its activations.
struct ChannelSpec {
    std::string name;
    std::size_t dim = 0;
    std::optional<Codec> codec;

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

/// One cluster in the graph; children name either channels or other nodes.
struct NodeSpec {
    std::string name;
    std::vector<std::string> children;
    ClusterPolicy policy;

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// Blueprint for a metacluster: channels, the cluster graph over them, and
/// how archetypes travel between clusters (dense, or binarized at tau).
struct MetaclusterSpec {
    std::vector<ChannelSpec> channels;
    std::vector<NodeSpec> nodes;
    std::optional<double> binarize_tau;

    friend bool operator==(const MetaclusterSpec&, const MetaclusterSpec&) = default;
};

using ChannelInputs = std::map<std::string, ActivationVector>;

/// Result of one bottom-up pass.
struct MetaResult {
    /// Traces for every node whose input mask had a present dimension,
    /// in evaluation (children-first) order.
    std::vector<std::pair<std::string, Trace>> node_traces;
    /// The root cluster's input: concatenated child archetypes.
    ActivationVector root_input;
    Mask root_mask;
    bool root_matched = false;
    /// Deepest footprint selected at the root, when it matched.
    std::optional<ActivationVector> top_projection;
    /// Per-channel slices of the leaf projections (present channels only).
    std::map<std::string, ActivationVector> channel_projections;
    /// Concatenation of leaf projections in declared channel order; absent
    /// channels contribute zero segments.
    ActivationVector projection;

    const Trace* trace_of(std::string_view node) const {
        for (const auto& [name, trace] : node_traces)
            if (name == node)
                return &trace;
        return nullptr;
    }
};

/// A graph of clusters over named channels. Leaf clusters consume raw
/// channel activations; parents consume the concatenated archetypes of
/// their children. Absent channels are zero-filled and masked out, which is
/// what makes cross-channel completion (the sensorimotor loop) work.
class Metacluster {
public:
    explicit Metacluster(MetaclusterSpec spec) : spec_(std::move(spec)) { build(); }

    /// Rebuilds from stored state; cluster payloads must match the spec.
    static Metacluster restore(MetaclusterSpec spec, std::map<std::string, Cluster> clusters) {
        Metacluster mc(std::move(spec));
        if (clusters.size() != mc.nodes_.size())
            throw ValidationError("metacluster payload must hold exactly one cluster per node");
        for (auto& node : mc.nodes_) {
            auto it = clusters.find(node.name);
            if (it == clusters.end())
                throw ValidationError("metacluster payload missing cluster for node '" +
                                      node.name + "'");
            if (it->second.dim() != node.layout.total())
                throw ValidationError("metacluster cluster dimension mismatch for node '" +
                                      node.name + "'");
            if (!(it->second.policy() == node_policy(mc.spec_, node.name)))
                throw ValidationError("metacluster cluster policy mismatch for node '" +
                                      node.name + "'");
            node.cluster = std::move(it->second);
        }
        return mc;
    }

    const MetaclusterSpec& spec() const noexcept { return spec_; }

    const std::string& root_name() const noexcept { return nodes_[root_].name; }
    std::size_t root_dim() const noexcept { return nodes_[root_].layout.total(); }
    const SegmentLayout& root_layout() const noexcept { return nodes_[root_].layout; }

    /// Layout of the full projection: all channels in declared order.
    const SegmentLayout& channel_layout() const noexcept { return channel_layout_; }

    const ChannelSpec& channel(std::string_view name) const {
        for (const auto& ch : spec_.channels)
            if (ch.name == name)
                return ch;
        throw LookupError("unknown channel '" + std::string(name) + "'");
    }

    const Cluster& node_cluster(std::string_view name) const {
        return nodes_[node_index(name)].cluster;
    }

    const SegmentLayout& node_layout(std::string_view name) const {
        return nodes_[node_index(name)].layout;
    }

    std::vector<std::string> node_names() const {
        std::vector<std::string> names;
        for (const Node& n : nodes_)
            names.push_back(n.name);
        return names;
    }

    /// Bottom-up pass. Learning touches only nodes whose input mask has at
    /// least one present dimension, so absent channels leave their leaf (and
    /// purely-absent subtrees) untouched.
    MetaResult process(const ChannelInputs& inputs, bool learn) {
        check_inputs(inputs);
        return run_pass(*this, inputs, learn ? this : nullptr);
    }

    /// Read-only bottom-up pass.
    MetaResult query(const ChannelInputs& inputs) const {
        check_inputs(inputs);
        return run_pass(*this, inputs, nullptr);
    }

    /// Fills in an absent channel from memory: queries bottom-up with the
    /// target masked, then walks top-down extracting the target's segment
    /// from each selected footprint and refining it through the clusters on
    /// the way. No state is touched. No match anywhere on the path yields
    /// an empty result.
    std::optional<ActivationVector> complete(const ChannelInputs& inputs,
                                             std::string_view target) const {
        channel(target); // LookupError on unknown target
        if (inputs.count(std::string(target)))
            throw ArgumentError("completion target '" + std::string(target) +
                                "' must be absent from the inputs");
        MetaResult r = query(inputs);
        if (!r.root_matched)
            return std::nullopt;
        return complete_from_root(*r.top_projection, target);
    }

    /// Top-down refinement only: given a vector in the root cluster's input
    /// space, extract and refine the target channel's content.
    std::optional<ActivationVector> complete_from_root(const ActivationVector& root_value,
                                                       std::string_view target) const {
        channel(target);
        if (root_value.dim() != root_dim())
            throw DimensionError("complete_from_root: vector must live in root input space");
        std::size_t node = root_;
        ActivationVector value = root_value;
        for (;;) {
            const Node& n = nodes_[node];
            const ChildRef* next = nullptr;
            for (const ChildRef& child : n.children) {
                if (child.reaches.count(std::string(target))) {
                    next = &child;
                    break;
                }
            }
            // Unreachable by construction: every channel sits under the root.
            if (next == nullptr)
                throw LookupError("channel '" + std::string(target) + "' not reachable");
            ActivationVector seg = segment(value, n.layout, next->name);
            if (next->is_channel)
                return seg;
            if (spec_.binarize_tau)
                seg = binarize(seg, *spec_.binarize_tau);
            const Node& child_node = nodes_[next->index];
            Trace t = child_node.cluster.query(seg, Mask::all(seg.dim()));
            if (!t.matched())
                return std::nullopt;
            value = t.projection();
            node = next->index;
        }
    }

    friend bool operator==(const Metacluster&, const Metacluster&) = default;

private:
    struct ChildRef {
        std::string name;
        bool is_channel = false;
        std::size_t index = 0;          // channel index or node index
        std::size_t dim = 0;
        std::set<std::string> reaches;  // channels in this child's subtree

        friend bool operator==(const ChildRef&, const ChildRef&) = default;
    };

    struct Node {
        std::string name;
        std::vector<ChildRef> children;
        SegmentLayout layout;
        Cluster cluster{1, ClusterPolicy{}};

        friend bool operator==(const Node&, const Node&) = default;
    };

    static const ClusterPolicy& node_policy(const MetaclusterSpec& spec, const std::string& name) {
        for (const NodeSpec& n : spec.nodes)
            if (n.name == name)
                return n.policy;
        throw LookupError("unknown node '" + name + "'");
    }

    std::size_t node_index(std::string_view name) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].name == name)
                return i;
        throw LookupError("unknown node '" + std::string(name) + "'");
    }

    void build() {
        if (spec_.channels.empty())
            throw ValidationError("metacluster spec needs at least one channel");
        if (spec_.nodes.empty())
            throw ValidationError("metacluster spec needs at least one node");
        if (spec_.binarize_tau && !(*spec_.binarize_tau >= 0.0 && *spec_.binarize_tau <= 1.0))
            throw ValidationError("metacluster binarize_tau must lie in [0,1]");

        std::map<std::string, std::size_t> channel_at;
        for (std::size_t i = 0; i < spec_.channels.size(); ++i) {
            ChannelSpec& ch = spec_.channels[i];
            if (ch.name.empty())
                throw ValidationError("channel name must not be empty");
            if (channel_at.count(ch.name))
                throw ValidationError("duplicate channel name '" + ch.name + "'");
            if (ch.codec) {
                std::size_t cd = codec_dim(*ch.codec);
                if (ch.dim == 0)
                    ch.dim = cd;
                else if (ch.dim != cd)
                    throw ValidationError("channel '" + ch.name +
                                          "' dimension disagrees with its codec");
            }
            if (ch.dim == 0)
                throw ValidationError("channel '" + ch.name + "' needs a positive dimension");
            channel_at[ch.name] = i;
        }

        std::map<std::string, std::size_t> node_at;
        for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
            const NodeSpec& n = spec_.nodes[i];
            if (n.name.empty())
                throw ValidationError("node name must not be empty");
            if (node_at.count(n.name) || channel_at.count(n.name))
                throw ValidationError("duplicate name '" + n.name + "' in metacluster spec");
            n.policy.validate();
            if (n.children.empty())
                throw ValidationError("node '" + n.name + "' needs at least one child");
            node_at[n.name] = i;
        }

        // Reference counts decide the root and enforce the tree shape.
        std::map<std::string, int> referenced;
        for (const NodeSpec& n : spec_.nodes) {
            std::set<std::string> seen;
            for (const std::string& child : n.children) {
                if (!channel_at.count(child) && !node_at.count(child))
                    throw ValidationError("node '" + n.name + "' references unknown child '" +
                                          child + "'");
                if (!seen.insert(child).second)
                    throw ValidationError("node '" + n.name + "' lists child '" + child +
                                          "' twice");
                referenced[child] += 1;
            }
        }
        for (const auto& [name, idx] : channel_at) {
            if (referenced[name] != 1)
                throw ValidationError("channel '" + name +
                                      "' must feed exactly one cluster");
        }
        std::string root_name;
        for (const auto& [name, idx] : node_at) {
            int refs = referenced.count(name) ? referenced[name] : 0;
            if (refs == 0) {
                if (!root_name.empty())
                    throw ValidationError("metacluster spec must have a single root node");
                root_name = name;
            } else if (refs != 1) {
                throw ValidationError("node '" + name + "' must feed exactly one parent");
            }
        }
        if (root_name.empty())
            throw ValidationError("metacluster spec has no root (node cycle)");

        // Resolve depth-first from the root; detects unreachable nodes.
        nodes_.clear();
        std::map<std::string, std::size_t> built;
        resolve_node(root_name, channel_at, node_at, built);
        root_ = built.at(root_name);
        if (nodes_.size() != spec_.nodes.size())
            throw ValidationError("metacluster spec contains nodes unreachable from the root");

        std::vector<std::pair<std::string, std::size_t>> sizes;
        for (const ChannelSpec& ch : spec_.channels)
            sizes.emplace_back(ch.name, ch.dim);
        channel_layout_ = SegmentLayout::from_sizes(sizes);

        for (const auto& [name, idx] : channel_at) {
            (void)idx;
            leaf_of_[name] = owner_of_channel(name);
        }
    }

    // Post-order construction: children are built (and indexed) before their
    // parent, so nodes_ is already a valid evaluation order.
    std::size_t resolve_node(const std::string& name,
                             const std::map<std::string, std::size_t>& channel_at,
                             const std::map<std::string, std::size_t>& node_at,
                             std::map<std::string, std::size_t>& built) {
        const NodeSpec& ns = spec_.nodes[node_at.at(name)];
        Node node;
        node.name = name;
        std::vector<std::pair<std::string, std::size_t>> sizes;
        for (const std::string& child : ns.children) {
            ChildRef ref;
            ref.name = child;
            if (auto it = channel_at.find(child); it != channel_at.end()) {
                ref.is_channel = true;
                ref.index = it->second;
                ref.dim = spec_.channels[it->second].dim;
                ref.reaches = {child};
            } else {
                std::size_t idx = resolve_node(child, channel_at, node_at, built);
                ref.is_channel = false;
                ref.index = idx;
                ref.dim = nodes_[idx].layout.total();
                for (const ChildRef& grand : nodes_[idx].children)
                    ref.reaches.insert(grand.reaches.begin(), grand.reaches.end());
            }
            sizes.emplace_back(ref.name, ref.dim);
            node.children.push_back(std::move(ref));
        }
        node.layout = SegmentLayout::from_sizes(sizes);
        node.cluster = Cluster(node.layout.total(), ns.policy);
        nodes_.push_back(std::move(node));
        built[name] = nodes_.size() - 1;
        return nodes_.size() - 1;
    }

    std::size_t owner_of_channel(const std::string& name) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (const ChildRef& child : nodes_[i].children)
                if (child.is_channel && child.name == name)
                    return i;
        throw LookupError("channel '" + name + "' has no owning cluster");
    }

    void check_inputs(const ChannelInputs& inputs) const {
        if (inputs.empty())
            throw ArgumentError("metacluster pass needs at least one present channel");
        for (const auto& [name, vec] : inputs) {
            const ChannelSpec& ch = channel(name);
            if (vec.dim() != ch.dim)
                throw DimensionError("channel '" + name + "' input has wrong dimension");
        }
    }

    // One skeleton for both directions of constness: `learner` is null for
    // queries and `&self` for learning passes.
    static MetaResult run_pass(const Metacluster& self, const ChannelInputs& inputs,
                               Metacluster* learner) {
        struct Eval {
            bool emitted = false;
            ActivationVector archetype;
        };
        std::vector<Eval> evals(self.nodes_.size());
        MetaResult result;

        for (std::size_t i = 0; i < self.nodes_.size(); ++i) {
            const Node& node = self.nodes_[i];
            std::vector<ActivationVector> parts;
            std::vector<Mask> mask_parts;
            for (const ChildRef& child : node.children) {
                if (child.is_channel) {
                    auto it = inputs.find(child.name);
                    if (it != inputs.end()) {
                        parts.push_back(it->second);
                        mask_parts.push_back(Mask::all(child.dim));
                    } else {
                        parts.push_back(ActivationVector::zeros(child.dim));
                        mask_parts.push_back(Mask::none(child.dim));
                    }
                } else if (evals[child.index].emitted) {
                    parts.push_back(evals[child.index].archetype);
                    mask_parts.push_back(Mask::all(child.dim));
                } else {
                    parts.push_back(ActivationVector::zeros(child.dim));
                    mask_parts.push_back(Mask::none(child.dim));
                }
            }
            ActivationVector input = concat(parts);
            Mask mask = concat_masks(mask_parts);

            if (i == self.root_) {
                result.root_input = input;
                result.root_mask = mask;
            }
            if (!mask.any())
                continue;

            Trace trace = learner ? learner->nodes_[i].cluster.process(input, mask, true)
                                  : node.cluster.query(input, mask);
            if (trace.matched()) {
                ActivationVector arch = trace.archetype();
                if (self.spec_.binarize_tau)
                    arch = binarize(arch, *self.spec_.binarize_tau);
                evals[i] = {true, std::move(arch)};
            }
            result.node_traces.emplace_back(node.name, std::move(trace));
        }

        const Trace* root_trace = result.trace_of(self.nodes_[self.root_].name);
        if (root_trace && root_trace->matched()) {
            result.root_matched = true;
            result.top_projection = root_trace->projection();
        }

        // Leaf projections, sliced per channel.
        std::vector<ActivationVector> proj_parts;
        for (const ChannelSpec& ch : self.spec_.channels) {
            const Node& leaf = self.nodes_[self.leaf_of_.at(ch.name)];
            const Trace* t = result.trace_of(leaf.name);
            if (t && t->matched()) {
                ActivationVector slice = segment(t->projection(), leaf.layout, ch.name);
                result.channel_projections.emplace(ch.name, slice);
                proj_parts.push_back(std::move(slice));
            } else {
                proj_parts.push_back(ActivationVector::zeros(ch.dim));
            }
        }
        result.projection = concat(proj_parts);
        return result;
    }

    MetaclusterSpec spec_;
    std::vector<Node> nodes_; // children-first order
    std::size_t root_ = 0;
    SegmentLayout channel_layout_;
    std::map<std::string, std::size_t> leaf_of_;
};

} // namespace fpe
