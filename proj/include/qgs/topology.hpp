#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgs/common.hpp"
#include "qgs/log.hpp"
#include "qgs/rng.hpp"

namespace qgs {

enum class Tier { Backbone, Aggregation, Edge };
enum class TopologyKind { Metro, Distribution, LongHaul };

inline const char* to_string(Tier t) {
    switch (t) {
        case Tier::Backbone: return "backbone";
        case Tier::Aggregation: return "aggregation";
        default: return "edge";
    }
}

inline Tier tier_from_string(const std::string& s) {
    if (s == "backbone") return Tier::Backbone;
    if (s == "aggregation") return Tier::Aggregation;
    if (s == "edge") return Tier::Edge;
    throw config_error("unknown tier: " + s);
}

inline const char* to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::Metro: return "metro";
        case TopologyKind::Distribution: return "distribution";
        default: return "longhaul";
    }
}

inline TopologyKind topology_kind_from_string(const std::string& s) {
    if (s == "metro") return TopologyKind::Metro;
    if (s == "distribution") return TopologyKind::Distribution;
    if (s == "longhaul") return TopologyKind::LongHaul;
    throw config_error("unknown topology kind: " + s);
}

struct NodeSpec {
    std::string id;
    Tier tier = Tier::Edge;
    double b_max_bits = 5e7;
    double b_min_bits = 1e7;
    double phi = 1.0;               // fallback share in [0,1]
    double delta_bps = 0.0;         // supply safety margin
    std::vector<std::string> classes;
    std::map<std::string, double> lambda_overrides;  // class id -> pkt/s

    void validate() const {
        if (b_min_bits < 0 || b_min_bits > b_max_bits)
            throw config_error("node " + id + ": requires 0 <= b_min <= b_max");
        if (phi < 0.0 || phi > 1.0) throw config_error("node " + id + ": phi outside [0,1]");
        if (delta_bps < 0.0) throw config_error("node " + id + ": delta < 0");
    }
};

struct LinkSpec {
    std::string id;
    std::string from, to;
    double d_km = 1.0;
    double l_fix_db = 0.0;
    std::string rate_curve = "dv_default";
    std::map<std::string, double> weights;  // fed node -> allocation weight
    std::optional<double> alpha_override;   // dB/km, overrides the global value

    void validate() const {
        if (d_km <= 0) throw config_error("link " + id + ": d_km must be > 0");
        if (l_fix_db < 0) throw config_error("link " + id + ": l_fix_db must be >= 0");
        for (const auto& [n, w] : weights)
            if (w < 0) throw config_error("link " + id + ": negative weight for " + n);
    }
};

// Total optical loss of a link: attenuation times length plus fixed losses.
inline double link_loss(const LinkSpec& link, double alpha_db_per_km) {
    double alpha = link.alpha_override.value_or(alpha_db_per_km);
    if (alpha <= 0) throw std::invalid_argument("link_loss: alpha must be > 0");
    return alpha * link.d_km + link.l_fix_db;
}

struct Topology {
    TopologyKind kind = TopologyKind::Metro;
    double alpha_db_per_km = 0.2;
    std::map<std::string, NodeSpec> nodes;
    std::map<std::string, LinkSpec> links;

    bool is_connected() const {
        if (nodes.empty()) return false;
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& [id, l] : links) {
            adj[l.from].push_back(l.to);
            adj[l.to].push_back(l.from);
        }
        std::set<std::string> seen;
        std::queue<std::string> q;
        q.push(nodes.begin()->first);
        seen.insert(nodes.begin()->first);
        while (!q.empty()) {
            auto cur = q.front();
            q.pop();
            for (const auto& nb : adj[cur])
                if (seen.insert(nb).second) q.push(nb);
        }
        return seen.size() == nodes.size();
    }

    void validate() const {
        if (alpha_db_per_km <= 0) throw config_error("topology: alpha must be > 0");
        if (nodes.empty()) throw config_error("topology: no nodes");
        for (const auto& [id, n] : nodes) n.validate();
        for (const auto& [id, l] : links) {
            l.validate();
            if (!nodes.count(l.from) || !nodes.count(l.to))
                throw config_error("link " + id + ": endpoint not in node set");
            for (const auto& [n, w] : l.weights)
                if (!nodes.count(n)) throw config_error("link " + id + ": fed node " + n + " unknown");
        }
        if (!is_connected()) throw config_error("topology: graph is not connected");
    }

    // Fed nodes of a link (defaults to both endpoints, weight 1 each).
    static std::map<std::string, double> fed_nodes(const LinkSpec& l) {
        if (!l.weights.empty()) return l.weights;
        return {{l.from, 1.0}, {l.to, 1.0}};
    }

    double total_km() const {
        double s = 0;
        for (const auto& [id, l] : links) s += l.d_km;
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = to_string(kind);
        j["alpha_db_per_km"] = alpha_db_per_km;
        j["nodes"] = nlohmann::json::array();
        for (const auto& [id, n] : nodes) {
            nlohmann::json jn{{"id", n.id},
                              {"tier", to_string(n.tier)},
                              {"b_max_bits", n.b_max_bits},
                              {"b_min_bits", n.b_min_bits},
                              {"phi", n.phi},
                              {"delta_bits_per_s", n.delta_bps},
                              {"classes", n.classes}};
            if (!n.lambda_overrides.empty()) jn["lambda_overrides"] = n.lambda_overrides;
            j["nodes"].push_back(jn);
        }
        j["links"] = nlohmann::json::array();
        for (const auto& [id, l] : links) {
            nlohmann::json jl{{"id", l.id},       {"from", l.from},
                              {"to", l.to},       {"d_km", l.d_km},
                              {"l_fix_db", l.l_fix_db}, {"rate_curve", l.rate_curve},
                              {"weights", l.weights}};
            if (l.alpha_override) jl["alpha_db_per_km"] = *l.alpha_override;
            j["links"].push_back(jl);
        }
        return j;
    }

    static Topology from_json(const nlohmann::json& j) {
        Topology t;
        try {
            t.kind = topology_kind_from_string(j.at("kind").get<std::string>());
            t.alpha_db_per_km = j.at("alpha_db_per_km").get<double>();
            for (const auto& jn : j.at("nodes")) {
                NodeSpec n;
                n.id = jn.at("id").get<std::string>();
                n.tier = tier_from_string(jn.at("tier").get<std::string>());
                n.b_max_bits = jn.at("b_max_bits").get<double>();
                n.b_min_bits = jn.at("b_min_bits").get<double>();
                n.phi = jn.at("phi").get<double>();
                n.delta_bps = jn.at("delta_bits_per_s").get<double>();
                n.classes = jn.at("classes").get<std::vector<std::string>>();
                if (jn.contains("lambda_overrides"))
                    n.lambda_overrides = jn.at("lambda_overrides").get<std::map<std::string, double>>();
                t.nodes[n.id] = std::move(n);
            }
            for (const auto& jl : j.at("links")) {
                LinkSpec l;
                l.id = jl.at("id").get<std::string>();
                l.from = jl.at("from").get<std::string>();
                l.to = jl.at("to").get<std::string>();
                l.d_km = jl.at("d_km").get<double>();
                l.l_fix_db = jl.at("l_fix_db").get<double>();
                l.rate_curve = jl.at("rate_curve").get<std::string>();
                l.weights = jl.at("weights").get<std::map<std::string, double>>();
                if (jl.contains("alpha_db_per_km")) l.alpha_override = jl.at("alpha_db_per_km").get<double>();
                t.links[l.id] = std::move(l);
            }
        } catch (const nlohmann::json::exception& e) {
            throw config_error(std::string("topology json: ") + e.what());
        }
        t.validate();
        return t;
    }
};

// Shared knobs for the generators. The paper's test systems give no
// geometry, so lengths are synthesized: equal partition for ring links and
// long-haul segments, seeded +/-jitter for chords and tree spans.
struct BuilderDefaults {
    double b_max_bits = 5e7;
    double b_min_bits = 1e7;
    double phi = 1.0;
    double delta_bps = 0.0;
    std::vector<std::string> classes;
    std::string rate_curve = "dv_default";
    double l_fix_db = 1.0;
    double alpha_db_per_km = 0.2;
    double length_jitter = 0.2;
};

namespace detail {

inline NodeSpec make_node(std::string id, Tier tier, const BuilderDefaults& d) {
    NodeSpec n;
    n.id = std::move(id);
    n.tier = tier;
    n.b_max_bits = d.b_max_bits;
    n.b_min_bits = d.b_min_bits;
    n.phi = d.phi;
    n.delta_bps = d.delta_bps;
    n.classes = d.classes;
    return n;
}

inline LinkSpec make_link(std::string id, std::string from, std::string to, double km,
                          const BuilderDefaults& d) {
    LinkSpec l;
    l.id = std::move(id);
    l.from = std::move(from);
    l.to = std::move(to);
    l.d_km = km;
    l.l_fix_db = d.l_fix_db;
    l.rate_curve = d.rate_curve;
    return l;
}

inline std::string zpad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

inline int id_width(int count) {
    int w = 1, c = 10;
    while (count > c) {
        ++w;
        c *= 10;
    }
    return w;
}

}  // namespace detail

// Ring of edge substations plus one control-center node tapped onto ring
// node 0, with seeded chords between non-adjacent ring nodes.
inline Topology build_metro(int n_substations, double ring_km, int n_chords, std::uint64_t seed,
                            const BuilderDefaults& d = {}) {
    if (n_substations < 3) throw config_error("build_metro: need at least 3 substations");
    if (ring_km <= 0) throw config_error("build_metro: ring_km must be > 0");
    if (n_chords < 0) throw config_error("build_metro: n_chords must be >= 0");

    Topology t;
    t.kind = TopologyKind::Metro;
    t.alpha_db_per_km = d.alpha_db_per_km;

    const int w = detail::id_width(n_substations);
    std::vector<std::string> ring_ids(n_substations);
    for (int i = 0; i < n_substations; ++i) {
        ring_ids[i] = "sub" + detail::zpad(i, w);
        t.nodes[ring_ids[i]] = detail::make_node(ring_ids[i], Tier::Edge, d);
    }
    t.nodes["cc"] = detail::make_node("cc", Tier::Backbone, d);

    const double spacing = ring_km / n_substations;
    for (int i = 0; i < n_substations; ++i) {
        auto id = "ring" + detail::zpad(i, w);
        t.links[id] = detail::make_link(id, ring_ids[i], ring_ids[(i + 1) % n_substations], spacing, d);
    }
    const double radius = ring_km / (2.0 * kPi);
    t.links["tap_cc"] = detail::make_link("tap_cc", "cc", ring_ids[0], radius, d);

    RngStreams streams(seed);
    auto eng = streams.stream("metro/chords");
    std::set<std::pair<int, int>> used;
    const int cw = detail::id_width(std::max(1, n_chords));
    bool relaxed = n_substations <= 3;  // a triangle has no non-adjacent pairs
    if (relaxed && n_chords > 0)
        log::warn("build_metro: ring too small for non-adjacent chords; allowing parallels");
    int placed = 0;
    long attempts = 0;
    const long max_attempts = 1000L * std::max(1, n_chords) + 10000L;
    while (placed < n_chords) {
        if (++attempts > max_attempts)
            throw config_error("build_metro: cannot place requested chords");
        int a = static_cast<int>(uniform01(eng) * n_substations) % n_substations;
        int b = static_cast<int>(uniform01(eng) * n_substations) % n_substations;
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        int cyc = std::min(b - a, n_substations - (b - a));
        if (!relaxed && cyc <= 1) continue;
        if (!used.insert({a, b}).second) continue;
        // straight-line chord across the ring circle, with seeded jitter
        double geom = 2.0 * radius * std::sin(kPi * cyc / n_substations);
        double km = geom * (1.0 + d.length_jitter * (2.0 * uniform01(eng) - 1.0));
        auto id = "chord" + detail::zpad(placed, cw);
        t.links[id] = detail::make_link(id, ring_ids[a], ring_ids[b], std::max(km, 1e-6), d);
        ++placed;
    }
    t.validate();
    return t;
}

// Tiered star/tree: neighborhoods -> aggregation points -> one station.
inline Topology build_distribution(int n_neighborhoods, int agg_points, double span_km,
                                   std::uint64_t seed, const BuilderDefaults& d = {}) {
    if (n_neighborhoods < 1 || agg_points < 1)
        throw config_error("build_distribution: counts must be >= 1");
    if (span_km <= 0) throw config_error("build_distribution: span_km must be > 0");
    if (agg_points > n_neighborhoods)
        throw config_error("build_distribution: more aggregation points than neighborhoods");
    if (agg_points < 4 || agg_points > 8)
        log::warn("build_distribution: agg_points outside the typical 4-8 range");

    Topology t;
    t.kind = TopologyKind::Distribution;
    t.alpha_db_per_km = d.alpha_db_per_km;
    t.nodes["root"] = detail::make_node("root", Tier::Backbone, d);

    RngStreams streams(seed);
    auto eng = streams.stream("distribution/spans");
    auto jitter = [&] { return 1.0 + d.length_jitter * (2.0 * uniform01(eng) - 1.0); };

    const int aw = detail::id_width(agg_points);
    std::vector<std::string> agg_ids(agg_points);
    for (int i = 0; i < agg_points; ++i) {
        agg_ids[i] = "agg" + detail::zpad(i, aw);
        t.nodes[agg_ids[i]] = detail::make_node(agg_ids[i], Tier::Aggregation, d);
        auto id = "trunk" + detail::zpad(i, aw);
        t.links[id] = detail::make_link(id, "root", agg_ids[i], 0.6 * span_km * jitter(), d);
    }
    const int lw = detail::id_width(n_neighborhoods);
    for (int i = 0; i < n_neighborhoods; ++i) {
        auto id = "leaf" + detail::zpad(i, lw);
        t.nodes[id] = detail::make_node(id, Tier::Edge, d);
        auto lid = "drop" + detail::zpad(i, lw);
        t.links[lid] = detail::make_link(lid, agg_ids[i % agg_points], id, 0.4 * span_km * jitter(), d);
    }
    t.validate();
    return t;
}

// Chain (or dual chain) between two area stations through trusted nodes,
// split into equal-length segments.
inline Topology build_longhaul(double total_km, int n_trusted, bool dual_chain,
                               const BuilderDefaults& d = {}) {
    if (total_km <= 0) throw config_error("build_longhaul: total_km must be > 0");
    if (n_trusted < 0 || n_trusted > 3)
        throw config_error("build_longhaul: n_trusted must be in [0,3]");
    if (total_km < 150.0 || total_km > 300.0)
        log::warn("build_longhaul: length outside the typical 150-300 km band");

    Topology t;
    t.kind = TopologyKind::LongHaul;
    t.alpha_db_per_km = d.alpha_db_per_km;

    std::vector<std::string> chain;
    chain.push_back("end_a");
    t.nodes["end_a"] = detail::make_node("end_a", Tier::Backbone, d);
    for (int i = 1; i <= n_trusted; ++i) {
        auto id = "tn" + std::to_string(i);
        t.nodes[id] = detail::make_node(id, Tier::Aggregation, d);
        chain.push_back(id);
    }
    t.nodes["end_b"] = detail::make_node("end_b", Tier::Backbone, d);
    chain.push_back("end_b");

    const int segments = n_trusted + 1;
    const double seg_km = total_km / segments;
    for (int i = 0; i < segments; ++i) {
        auto base = "seg" + std::to_string(i);
        if (dual_chain) {
            t.links[base + "_a"] = detail::make_link(base + "_a", chain[i], chain[i + 1], seg_km, d);
            t.links[base + "_b"] = detail::make_link(base + "_b", chain[i], chain[i + 1], seg_km, d);
        } else {
            t.links[base] = detail::make_link(base, chain[i], chain[i + 1], seg_km, d);
        }
    }
    t.validate();
    return t;
}

}  // namespace qgs
