#pragma once

// Drives one program alone on a graph, outside the engine.

#include <functional>
#include <vector>

#include "rdv/graph.hpp"
#include "rdv/program.hpp"

struct solo_round {
    rdv::action decision;
    bool fault;
    bool moved;
    rdv::node_id at;  // after the round
};

class solo {
public:
    solo(const rdv::port_graph& g, rdv::node_id start, rdv::agent_program& prog) : g_(g), prog_(prog), at_(start) {}

    // `fault(r)` blocks the move of round r (counted from 0).
    solo_round step(bool fault = false) {
        const rdv::observation obs{g_.degree(at_), entry_, fault_flag_, false};
        const auto a = prog_.decide(obs);
        solo_round out{a, false, false, at_};
        fault_flag_ = false;
        if (a.is_move()) {
            if (fault) {
                out.fault = true;
                fault_flag_ = true;
            } else {
                const auto e = g_.traverse(at_, a.port);
                at_ = e.node;
                entry_ = e.port;
                out.moved = true;
                ++traversals_;
            }
        }
        out.at = at_;
        ++round_;
        return out;
    }

    std::vector<solo_round> run(std::size_t rounds, const std::function<bool(std::size_t)>& fault = {}) {
        std::vector<solo_round> out;
        for (std::size_t i = 0; i < rounds; ++i) {
            out.push_back(step(fault ? fault(round_) : false));
        }
        return out;
    }

    rdv::node_id at() const { return at_; }
    std::size_t round() const { return round_; }
    std::uint64_t traversals() const { return traversals_; }

private:
    const rdv::port_graph& g_;
    rdv::agent_program& prog_;
    rdv::node_id at_;
    std::optional<rdv::port_t> entry_;
    bool fault_flag_ = false;
    std::size_t round_ = 0;
    std::uint64_t traversals_ = 0;
};
