#pragma once

#include <optional>

#include "rdv/error.hpp"

// Error code raised by f, or nullopt when it returns normally.
template <class F>
std::optional<rdv::error_code> raised(F&& f) {
    try {
        f();
    } catch (const rdv::error& e) {
        return e.code();
    }
    return std::nullopt;
}

#include <memory>

#include "rdv/engine.hpp"

inline rdv::run_config make_run(rdv::port_graph g, std::uint64_t la, rdv::node_id sa, std::uint64_t lb,
                                rdv::node_id sb, rdv::program_factory make, rdv::adversary_factory adv = {},
                                std::uint64_t horizon = 1'000'000) {
    rdv::run_config cfg;
    cfg.graph = std::make_shared<const rdv::port_graph>(std::move(g));
    cfg.agents[0] = {la, sa, 0};
    cfg.agents[1] = {lb, sb, 0};
    cfg.make_program = std::move(make);
    cfg.make_adversary = std::move(adv);
    cfg.horizon = horizon;
    return cfg;
}
