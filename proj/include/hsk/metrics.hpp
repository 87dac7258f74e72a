#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hsk {

struct MessageCounters {
    std::uint64_t hello = 0;
    std::uint64_t id_msg = 0;
    std::uint64_t weight_msg = 0;
    std::uint64_t notification = 0;
    std::uint64_t key_payload = 0;

    MessageCounters& operator+=(const MessageCounters& other);
};

// Per-round and cumulative message accounting.
struct MessageLog {
    MessageCounters round;
    MessageCounters total;

    void begin_round();
    void add(const MessageCounters& counters);
};

// One CSV row per protocol round; the column order in export_csv matches
// the field order here.
struct MetricsReport {
    int round = 0;
    std::string event_kind;
    int epoch = 0;
    std::uint64_t hello = 0;
    std::uint64_t id_msg = 0;
    std::uint64_t weight_msg = 0;
    std::uint64_t notification = 0;
    std::uint64_t key_payload = 0;
    std::uint64_t new_exchanges = 0;
    std::uint64_t reused_links = 0;
    std::uint64_t redundant_edges = 0;
    int max_depth = 0;
    std::uint64_t duplicates = 0;
    bool aborted = false;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

}  // namespace hsk
