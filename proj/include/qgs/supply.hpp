#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qgs/common.hpp"
#include "qgs/topology.hpp"

namespace qgs {

struct DvCurve {
    double r0_bps = 1e6;
    double eta_per_db = 0.1;
};

struct CvCurve {
    double r0_bps = 1e6;
    double eta_per_db = 0.1;
    double cutoff_db = 25.0;  // CV rates collapse past this loss
};

struct TabulatedCurve {
    std::vector<std::pair<double, double>> points;  // (loss dB, rate bps), loss ascending

    void validate() const {
        if (points.empty()) throw config_error("tabulated curve: no points");
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].first <= points[i - 1].first)
                throw config_error("tabulated curve: losses must be strictly increasing");
            if (points[i].second >= points[i - 1].second)
                throw config_error("tabulated curve: rates must be strictly decreasing");
        }
    }
};

// Rate-limited, loss-independent key establishment for the PQC-only
// architecture: handshakes per second times key bits per handshake.
struct PqcHandshakeCurve {
    double hs_per_s = 10.0;
    double bits_per_hs = 256.0;
};

using RateCurve = std::variant<DvCurve, CvCurve, TabulatedCurve, PqcHandshakeCurve>;

inline double rate_from_loss(const RateCurve& curve, double loss_db) {
    if (loss_db < 0) throw std::invalid_argument("rate_from_loss: negative loss");
    if (const auto* dv = std::get_if<DvCurve>(&curve))
        return dv->r0_bps * std::pow(10.0, -dv->eta_per_db * loss_db);
    if (const auto* cv = std::get_if<CvCurve>(&curve)) {
        if (loss_db > cv->cutoff_db) return 0.0;
        return cv->r0_bps * std::pow(10.0, -cv->eta_per_db * loss_db);
    }
    if (const auto* tab = std::get_if<TabulatedCurve>(&curve)) {
        const auto& p = tab->points;
        if (loss_db <= p.front().first) return p.front().second;
        if (loss_db > p.back().first) return 0.0;
        for (std::size_t i = 1; i < p.size(); ++i) {
            if (loss_db <= p[i].first) {
                double t = (loss_db - p[i - 1].first) / (p[i].first - p[i - 1].first);
                return p[i - 1].second + t * (p[i].second - p[i - 1].second);
            }
        }
        return p.back().second;
    }
    const auto& pqc = std::get<PqcHandshakeCurve>(curve);
    return pqc.hs_per_s * pqc.bits_per_hs;
}

inline nlohmann::json curve_to_json(const RateCurve& curve) {
    if (const auto* dv = std::get_if<DvCurve>(&curve))
        return {{"type", "dv"}, {"r0_bps", dv->r0_bps}, {"eta_per_db", dv->eta_per_db}};
    if (const auto* cv = std::get_if<CvCurve>(&curve))
        return {{"type", "cv"},
                {"r0_bps", cv->r0_bps},
                {"eta_per_db", cv->eta_per_db},
                {"cutoff_db", cv->cutoff_db}};
    if (const auto* tab = std::get_if<TabulatedCurve>(&curve)) {
        auto pts = nlohmann::json::array();
        for (const auto& [db, bps] : tab->points) pts.push_back({db, bps});
        return {{"type", "tabulated"}, {"points", pts}};
    }
    const auto& pqc = std::get<PqcHandshakeCurve>(curve);
    return {{"type", "pqc"}, {"hs_per_s", pqc.hs_per_s}, {"bits_per_hs", pqc.bits_per_hs}};
}

inline RateCurve curve_from_json(const nlohmann::json& j) {
    try {
        auto type = j.at("type").get<std::string>();
        if (type == "dv") return DvCurve{j.at("r0_bps").get<double>(), j.at("eta_per_db").get<double>()};
        if (type == "cv")
            return CvCurve{j.at("r0_bps").get<double>(), j.at("eta_per_db").get<double>(),
                           j.value("cutoff_db", 25.0)};
        if (type == "tabulated") {
            TabulatedCurve t;
            for (const auto& p : j.at("points"))
                t.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
            t.validate();
            return t;
        }
        if (type == "pqc")
            return PqcHandshakeCurve{j.at("hs_per_s").get<double>(), j.at("bits_per_hs").get<double>()};
        throw config_error("rate curve: unknown type " + type);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("rate curve json: ") + e.what());
    }
}

inline std::map<std::string, RateCurve> curves_from_json(const nlohmann::json& j) {
    std::map<std::string, RateCurve> m;
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = curve_from_json(it.value());
    return m;
}

inline nlohmann::json curves_to_json(const std::map<std::string, RateCurve>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [id, c] : m) j[id] = curve_to_json(c);
    return j;
}

// Progressive-filling max-min share of one link budget across fed nodes.
// Total handed out is min(budget, total demand); nobody exceeds demand.
inline std::map<std::string, double> allocate_maxmin(double budget,
                                                     const std::map<std::string, double>& demands) {
    if (budget < 0) throw std::invalid_argument("allocate_maxmin: negative budget");
    std::map<std::string, double> out;
    double total = 0.0;
    for (const auto& [n, dmd] : demands) {
        if (dmd < 0) throw std::invalid_argument("allocate_maxmin: negative demand");
        out[n] = 0.0;
        total += dmd;
    }
    if (demands.empty()) return out;
    if (total <= budget) {
        for (const auto& [n, dmd] : demands) out[n] = dmd;
        return out;
    }
    // sort by demand and raise a common water level
    std::vector<std::pair<double, const std::string*>> order;
    order.reserve(demands.size());
    for (const auto& [n, dmd] : demands) order.emplace_back(dmd, &n);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double remaining = budget;
    std::size_t i = 0;
    double level = 0.0;
    while (i < order.size()) {
        double unsat = static_cast<double>(order.size() - i);
        level = remaining / unsat;
        if (level <= order[i].first) break;
        remaining -= order[i].first;
        out[*order[i].second] = order[i].first;
        ++i;
    }
    for (; i < order.size(); ++i) out[*order[i].second] = level;
    return out;
}

// Weighted proportional share, capped at demand, with the excess repeatedly
// redistributed over unsatisfied nodes in proportion to their weights.
// Zero-weight nodes never receive anything.
inline std::map<std::string, double> allocate_weighted(double budget,
                                                       const std::map<std::string, double>& demands,
                                                       const std::map<std::string, double>& weights) {
    if (budget < 0) throw std::invalid_argument("allocate_weighted: negative budget");
    double wsum = 0.0;
    for (const auto& [n, w] : weights) {
        if (w < 0) throw config_error("allocate_weighted: negative weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw config_error("allocate_weighted: all weights are zero");

    std::map<std::string, double> out;
    for (const auto& [n, dmd] : demands) {
        if (dmd < 0) throw std::invalid_argument("allocate_weighted: negative demand");
        out[n] = 0.0;
    }
    double remaining = budget;
    for (int round = 0; round < 64; ++round) {
        double active_w = 0.0;
        for (const auto& [n, dmd] : demands) {
            double w = weights.count(n) ? weights.at(n) : 0.0;
            if (out[n] < dmd && w > 0) active_w += w;
        }
        if (active_w <= 0.0 || remaining <= 1e-15 * (1.0 + budget)) break;
        double handed = 0.0;
        for (const auto& [n, dmd] : demands) {
            double w = weights.count(n) ? weights.at(n) : 0.0;
            if (out[n] >= dmd || w <= 0) continue;
            double give = std::min(dmd - out[n], remaining * w / active_w);
            out[n] += give;
            handed += give;
        }
        remaining -= handed;
        if (handed <= 0.0) break;
    }
    return out;
}

// Per-link piecewise-constant key rate over the horizon, after disturbances.
struct LinkSchedule {
    std::vector<std::int64_t> start;  // segment start step, ascending, start[0] == 0
    std::vector<double> rate_bps;
    std::vector<bool> usable;         // false inside a link-cut window

    std::size_t segment(std::int64_t t) const {
        auto it = std::upper_bound(start.begin(), start.end(), t);
        return static_cast<std::size_t>(it - start.begin()) - 1;
    }
};

struct SupplySchedule {
    std::map<std::string, LinkSchedule> links;

    double rate(const std::string& link, std::int64_t t) const {
        const auto& ls = links.at(link);
        return ls.rate_bps[ls.segment(t)];
    }
    bool usable(const std::string& link, std::int64_t t) const {
        const auto& ls = links.at(link);
        return ls.usable[ls.segment(t)];
    }
};

// Aggregate per-step supply at a node when every fed node receives the full
// link budget (symmetric key pools at both ends of a QKD link).
inline double node_supply(const Topology& topo, const SupplySchedule& schedule,
                          const std::string& node, std::int64_t t, double dt = 1.0) {
    if (!topo.nodes.count(node)) throw std::invalid_argument("node_supply: unknown node " + node);
    double bits = 0.0;
    for (const auto& [id, link] : topo.links) {
        if (!schedule.usable(id, t)) continue;
        auto fed = Topology::fed_nodes(link);
        if (fed.count(node)) bits += schedule.rate(id, t) * dt;
    }
    return bits;
}

}  // namespace qgs
