#include "hsk/metrics.hpp"

namespace hsk {

MessageCounters& MessageCounters::operator+=(const MessageCounters& other) {
    hello += other.hello;
    id_msg += other.id_msg;
    weight_msg += other.weight_msg;
    notification += other.notification;
    key_payload += other.key_payload;
    return *this;
}

void MessageLog::begin_round() { round = MessageCounters{}; }

void MessageLog::add(const MessageCounters& counters) {
    round += counters;
    total += counters;
}

}  // namespace hsk
