#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qgs/common.hpp"
#include "qgs/log.hpp"
#include "qgs/rng.hpp"
#include "qgs/topology.hpp"

namespace qgs {

// One power-system traffic class: arrival statistics, SLA targets, and the
// crypto-policy parameters that drive key demand.
struct TrafficClass {
    std::string id;
    std::string name;           // GOOSE, SV, PMU, SCADA, M1..M5
    double lambda_pps = 0.0;    // per-node arrival rate
    double s_bits = 0.0;        // payload per message
    double delay_bound_s = 1.0; // L
    double avail_target = 0.999;
    double beta = 1.0;          // burst factor (peak-to-mean)
    double f_hz = 1.0;          // session refresh frequency
    double l_sess_bits = 256.0;
    double l_mac_bits = 128.0;
    bool uses_otp = false;
    double t_conf_years = 0.0;
    double weight = 1.0;        // w_k
    double q_per_year = 1.0;    // raw service measure
    double c_sla = 0.0;         // penalty per unit of unavailability-weighted volume

    void validate(double otp_cap_bps = 1e4) const {
        if (lambda_pps < 0) throw config_error("class " + id + ": lambda < 0");
        if (beta < 1.0) throw config_error("class " + id + ": beta must be >= 1");
        if (avail_target <= 0.0 || avail_target > 1.0)
            throw config_error("class " + id + ": availability target outside (0,1]");
        if (weight <= 0.0) throw config_error("class " + id + ": weight must be > 0");
        if (f_hz < 0 || l_sess_bits < 0 || l_mac_bits < 0 || s_bits < 0)
            throw config_error("class " + id + ": negative rate or size");
        if (uses_otp && lambda_pps * s_bits > otp_cap_bps)
            throw config_error("class " + id + ": OTP enabled above the low-volume cap");
    }
};

struct ClassTable {
    std::map<std::string, TrafficClass> classes;

    const TrafficClass& at(const std::string& id) const {
        auto it = classes.find(id);
        if (it == classes.end()) throw std::invalid_argument("unknown traffic class: " + id);
        return it->second;
    }

    void validate(double otp_cap_bps = 1e4) const {
        for (const auto& [id, c] : classes) c.validate(otp_cap_bps);
    }

    nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& [id, c] : classes) {
            arr.push_back({{"id", c.id},
                           {"name", c.name},
                           {"lambda_pps", c.lambda_pps},
                           {"s_bits", c.s_bits},
                           {"L_s", c.delay_bound_s},
                           {"A_target", c.avail_target},
                           {"beta", c.beta},
                           {"f_hz", c.f_hz},
                           {"l_sess_bits", c.l_sess_bits},
                           {"l_mac_bits", c.l_mac_bits},
                           {"uses_otp", c.uses_otp},
                           {"T_conf_years", c.t_conf_years},
                           {"weight", c.weight},
                           {"q_per_year", c.q_per_year},
                           {"c_sla", c.c_sla}});
        }
        return arr;
    }

    static ClassTable from_json(const nlohmann::json& j, double otp_cap_bps = 1e4) {
        ClassTable t;
        try {
            for (const auto& jc : j) {
                TrafficClass c;
                c.id = jc.at("id").get<std::string>();
                c.name = jc.at("name").get<std::string>();
                c.lambda_pps = jc.at("lambda_pps").get<double>();
                c.s_bits = jc.at("s_bits").get<double>();
                c.delay_bound_s = jc.at("L_s").get<double>();
                c.avail_target = jc.at("A_target").get<double>();
                c.beta = jc.at("beta").get<double>();
                c.f_hz = jc.at("f_hz").get<double>();
                c.l_sess_bits = jc.at("l_sess_bits").get<double>();
                c.l_mac_bits = jc.at("l_mac_bits").get<double>();
                c.uses_otp = jc.at("uses_otp").get<bool>();
                c.t_conf_years = jc.at("T_conf_years").get<double>();
                c.weight = jc.at("weight").get<double>();
                c.q_per_year = jc.at("q_per_year").get<double>();
                c.c_sla = jc.at("c_sla").get<double>();
                t.classes[c.id] = std::move(c);
            }
        } catch (const nlohmann::json::exception& e) {
            throw config_error(std::string("class table json: ") + e.what());
        }
        t.validate(otp_cap_bps);
        return t;
    }
};

// Effective arrival rate of a class at a node (per-node override wins).
inline double node_rate(const NodeSpec& node, const TrafficClass& c) {
    auto it = node.lambda_overrides.find(c.id);
    return it != node.lambda_overrides.end() ? it->second : c.lambda_pps;
}

struct PoissonArrivals {
    double rate_pps = 0.0;
};

// Two-state ON/OFF modulated Poisson surrogate. ON rate is beta*lambda; the
// OFF rate is chosen so the long-run mean stays at lambda (clipped at zero
// when beta exceeds 1/p_on).
struct BurstArrivals {
    double rate_pps = 0.0;
    double beta = 1.0;
    double on_dwell_s = 10.0;
    double off_dwell_s = 30.0;

    double p_on() const { return on_dwell_s / (on_dwell_s + off_dwell_s); }
    double on_rate() const { return beta * rate_pps; }
    double off_rate() const {
        double p = p_on();
        return std::max(0.0, rate_pps * (1.0 - beta * p) / (1.0 - p));
    }
};

using ArrivalModel = std::variant<PoissonArrivals, BurstArrivals>;

inline ArrivalModel arrival_model_for(const TrafficClass& c, double lambda_pps) {
    if (c.beta > 1.0) return BurstArrivals{lambda_pps, c.beta};
    return PoissonArrivals{lambda_pps};
}

// Stateful sampler for one (node, class) stream. Burst state persists across
// steps; switches inside a step integrate the piecewise-constant rate.
class ArrivalProcess {
public:
    ArrivalProcess() = default;

    template <typename Engine>
    ArrivalProcess(const ArrivalModel& model, Engine& eng) : model_(model) {
        if (const auto* b = std::get_if<BurstArrivals>(&model_)) {
            on_ = uniform01(eng) < b->p_on();
            dwell_left_ = exponential_sample(eng, on_ ? b->on_dwell_s : b->off_dwell_s);
        }
    }

    template <typename Engine>
    std::int64_t sample(double dt, Engine& eng) {
        if (dt <= 0) throw std::invalid_argument("sample_arrivals: dt must be > 0");
        if (const auto* p = std::get_if<PoissonArrivals>(&model_))
            return poisson_sample(eng, p->rate_pps * dt);
        const auto& b = std::get<BurstArrivals>(model_);
        double mean = 0.0, left = dt;
        while (left > 0.0) {
            double seg = std::min(left, dwell_left_);
            mean += (on_ ? b.on_rate() : b.off_rate()) * seg;
            dwell_left_ -= seg;
            left -= seg;
            if (dwell_left_ <= 0.0) {
                on_ = !on_;
                dwell_left_ = exponential_sample(eng, on_ ? b.on_dwell_s : b.off_dwell_s);
            }
        }
        return poisson_sample(eng, mean);
    }

    bool burst_on() const { return on_; }

private:
    ArrivalModel model_ = PoissonArrivals{0.0};
    bool on_ = false;
    double dwell_left_ = 0.0;
};

// Session refresh plus per-message authentication, in bits/s.
inline double demand_sym(const TrafficClass& c, double lambda_inst_pps) {
    if (lambda_inst_pps < 0) throw std::invalid_argument("demand_sym: negative rate");
    return c.f_hz * c.l_sess_bits + lambda_inst_pps * c.l_mac_bits;
}

// One-time-pad demand equals the plaintext rate.
inline double demand_otp(const TrafficClass& c, double lambda_inst_pps) {
    if (!c.uses_otp) throw std::invalid_argument("demand_otp: class " + c.id + " does not use OTP");
    if (lambda_inst_pps < 0) throw std::invalid_argument("demand_otp: negative rate");
    return lambda_inst_pps * c.s_bits;
}

// Realized key demand of a node over one step, from per-class arrival counts.
inline double node_demand(const NodeSpec& node, const ClassTable& table,
                          const std::map<std::string, std::int64_t>& counts, double dt) {
    double bits = 0.0;
    for (const auto& cid : node.classes) {
        auto it = counts.find(cid);
        if (it == counts.end())
            throw std::invalid_argument("node_demand: missing arrival count for class " + cid);
        const auto& c = table.at(cid);
        double n = static_cast<double>(it->second);
        bits += c.f_hz * c.l_sess_bits * dt + n * c.l_mac_bits;
        if (c.uses_otp) bits += n * c.s_bits;
    }
    return bits;
}

// Worst-case demand rate with burst-inflated arrivals, bits/s.
inline double demand_envelope(const NodeSpec& node, const ClassTable& table) {
    double bps = 0.0;
    for (const auto& cid : node.classes) {
        const auto& c = table.at(cid);
        double lam = node_rate(node, c);
        bps += c.f_hz * c.l_sess_bits + c.beta * lam * c.l_mac_bits;
        if (c.uses_otp) bps += lam * c.s_bits;
    }
    return bps;
}

// Long-run mean demand rate, bits/s. Used for stability checks and sizing.
inline double mean_demand_rate(const NodeSpec& node, const ClassTable& table) {
    double bps = 0.0;
    for (const auto& cid : node.classes) {
        const auto& c = table.at(cid);
        double lam = node_rate(node, c);
        bps += c.f_hz * c.l_sess_bits + lam * c.l_mac_bits;
        if (c.uses_otp) bps += lam * c.s_bits;
    }
    return bps;
}

}  // namespace qgs
