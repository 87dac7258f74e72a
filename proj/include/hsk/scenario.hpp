#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsk/types.hpp"
#include "hsk/weighting.hpp"

namespace hsk {

enum class ProtocolMode { centralized, distributed };

std::string to_string(ProtocolMode mode);

// One line of the schedule. Random placeholders are resolved against the
// membership at execution time, from the scenario's event stream.
struct ScheduledEvent {
    enum class Action {
        join_random,   // join <count>
        join_explicit, // join <id> <x> <y> <pa>
        leave_id,      // leave <id>
        leave_random,  // leave random [count]
        move_id,       // move <id> <x> <y>
        move_random,   // move random [count]
        power_id,      // power <id> <pa>
        power_random,  // power random [count]
    };

    Action action = Action::join_random;
    int count = 1;
    NodeId id = 0;
    Vec2 position;
    double value = 0.0;
};

// Parsed "hsk-scenario v1" file. The grammar is line-based key = value
// pairs followed by an `events:` ... `end` block; see the README for the
// full description.
struct Scenario {
    std::uint64_t seed = 1;
    int node_count = 0;
    double area_w = 10.0;
    double area_h = 10.0;
    ProtocolMode mode = ProtocolMode::distributed;
    std::optional<double> d_max;                  // homogeneous range
    std::optional<double> d_leader;               // unbalanced ranges
    std::optional<double> d_normal;
    double weight_m = 1000.0;
    double weight_alpha = 1.0;
    double weight_beta = 1.0;
    double pa_min = 0.0;
    double pa_max = 100.0;
    std::string primitive = "test-double";
    std::size_t session_key_bytes = 32;
    bool rekey_on_edge_events = false;
    std::vector<ScheduledEvent> schedule;

    double range_cutoff() const;       // d_max or d_normal, by mode
    WeightParams weight_params() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Positivity and consistency checks, including that the weight function
// stays positive over the admissible inputs of this scenario.
void validate_scenario(const Scenario& sc);

}  // namespace hsk
