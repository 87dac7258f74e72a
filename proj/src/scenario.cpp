#include "hsk/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hsk/secure_links.hpp"

namespace hsk {

std::string to_string(ProtocolMode mode) {
    return mode == ProtocolMode::centralized ? "centralized" : "distributed";
}

double Scenario::range_cutoff() const {
    if (mode == ProtocolMode::centralized) {
        if (!d_normal) throw ConfigError("centralized scenario needs d_normal");
        return *d_normal;
    }
    if (!d_max) throw ConfigError("distributed scenario needs d_max");
    return *d_max;
}

WeightParams Scenario::weight_params() const {
    return WeightParams{weight_m, weight_alpha, weight_beta, range_cutoff()};
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& tok, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("scenario: bad number '" + tok + "' in " + where);
    }
}

std::uint64_t parse_u64(const std::string& tok, const std::string& where) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ConfigError("scenario: bad integer '" + tok + "' in " + where);
    return v;
}

ScheduledEvent parse_event_line(const std::vector<std::string>& toks, const std::string& line) {
    using Action = ScheduledEvent::Action;
    ScheduledEvent ev;
    const std::string& verb = toks[0];
    const bool random = toks.size() > 1 && toks[1] == "random";

    auto optional_count = [&](std::size_t idx) {
        if (toks.size() > idx) ev.count = static_cast<int>(parse_u64(toks[idx], line));
        if (ev.count < 1) throw ConfigError("scenario: count must be >= 1 in '" + line + "'");
    };

    if (verb == "join") {
        if (random) {
            ev.action = Action::join_random;
            optional_count(2);
        } else if (toks.size() == 5) {
            ev.action = Action::join_explicit;
            ev.id = static_cast<NodeId>(parse_u64(toks[1], line));
            ev.position = Vec2{parse_double(toks[2], line), parse_double(toks[3], line)};
            ev.value = parse_double(toks[4], line);
        } else {
            throw ConfigError("scenario: expected 'join random [count]' or "
                              "'join <id> <x> <y> <pa>' in '" + line + "'");
        }
    } else if (verb == "leave") {
        if (random) {
            ev.action = Action::leave_random;
            optional_count(2);
        } else if (toks.size() == 2) {
            ev.action = Action::leave_id;
            ev.id = static_cast<NodeId>(parse_u64(toks[1], line));
        } else {
            throw ConfigError("scenario: expected 'leave random [count]' or 'leave <id>' in '" +
                              line + "'");
        }
    } else if (verb == "move") {
        if (random) {
            ev.action = Action::move_random;
            optional_count(2);
        } else if (toks.size() == 4) {
            ev.action = Action::move_id;
            ev.id = static_cast<NodeId>(parse_u64(toks[1], line));
            ev.position = Vec2{parse_double(toks[2], line), parse_double(toks[3], line)};
        } else {
            throw ConfigError("scenario: expected 'move random [count]' or "
                              "'move <id> <x> <y>' in '" + line + "'");
        }
    } else if (verb == "power") {
        if (random) {
            ev.action = Action::power_random;
            optional_count(2);
        } else if (toks.size() == 3) {
            ev.action = Action::power_id;
            ev.id = static_cast<NodeId>(parse_u64(toks[1], line));
            ev.value = parse_double(toks[2], line);
        } else {
            throw ConfigError("scenario: expected 'power random [count]' or "
                              "'power <id> <pa>' in '" + line + "'");
        }
    } else {
        throw ConfigError("scenario: unknown event '" + verb + "'");
    }
    return ev;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    Scenario sc;
    bool saw_header = false;
    bool in_events = false;
    bool saw_end = false;

    while (std::getline(in, raw)) {
        const auto comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string line = strip(raw);
        if (line.empty()) continue;

        if (!saw_header) {
            if (line != "hsk-scenario v1")
                throw ConfigError("scenario: first line must be 'hsk-scenario v1'");
            saw_header = true;
            continue;
        }
        if (saw_end) throw ConfigError("scenario: content after 'end'");

        if (!in_events) {
            if (line == "events:") {
                in_events = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("scenario: expected 'key = value', got '" + line + "'");
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            const auto vals = tokenize(value);
            if (vals.empty()) throw ConfigError("scenario: empty value for '" + key + "'");

            if (key == "seed") sc.seed = parse_u64(vals[0], key);
            else if (key == "nodes") sc.node_count = static_cast<int>(parse_u64(vals[0], key));
            else if (key == "area") {
                if (vals.size() != 2) throw ConfigError("scenario: area takes width and height");
                sc.area_w = parse_double(vals[0], key);
                sc.area_h = parse_double(vals[1], key);
            } else if (key == "mode") {
                if (vals[0] == "centralized") sc.mode = ProtocolMode::centralized;
                else if (vals[0] == "distributed") sc.mode = ProtocolMode::distributed;
                else throw ConfigError("scenario: mode must be centralized or distributed");
            } else if (key == "d_max") sc.d_max = parse_double(vals[0], key);
            else if (key == "d_leader") sc.d_leader = parse_double(vals[0], key);
            else if (key == "d_normal") sc.d_normal = parse_double(vals[0], key);
            else if (key == "weights") {
                if (vals.size() != 3)
                    throw ConfigError("scenario: weights takes M alpha beta");
                sc.weight_m = parse_double(vals[0], key);
                sc.weight_alpha = parse_double(vals[1], key);
                sc.weight_beta = parse_double(vals[2], key);
            } else if (key == "pa_range") {
                if (vals.size() != 2) throw ConfigError("scenario: pa_range takes min and max");
                sc.pa_min = parse_double(vals[0], key);
                sc.pa_max = parse_double(vals[1], key);
            } else if (key == "primitive") sc.primitive = vals[0];
            else if (key == "session_key_bytes")
                sc.session_key_bytes = parse_u64(vals[0], key);
            else if (key == "rekey_on_edge_events") {
                if (vals[0] == "true") sc.rekey_on_edge_events = true;
                else if (vals[0] == "false") sc.rekey_on_edge_events = false;
                else throw ConfigError("scenario: rekey_on_edge_events must be true or false");
            } else throw ConfigError("scenario: unknown key '" + key + "'");
            continue;
        }

        if (line == "end") {
            saw_end = true;
            continue;
        }
        sc.schedule.push_back(parse_event_line(tokenize(line), line));
    }

    if (!saw_header) throw ConfigError("scenario: empty file");
    if (in_events && !saw_end) throw ConfigError("scenario: events block missing 'end'");
    validate_scenario(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& sc) {
    if (sc.node_count < 1) throw ConfigError("scenario: nodes must be >= 1");
    if (sc.area_w <= 0.0 || sc.area_h <= 0.0) throw ConfigError("scenario: area must be positive");
    if (sc.pa_min < 0.0 || sc.pa_max < sc.pa_min)
        throw ConfigError("scenario: pa_range must satisfy 0 <= min <= max");
    if (sc.session_key_bytes < 1) throw ConfigError("scenario: session_key_bytes must be >= 1");
    if (sc.weight_m <= 0.0) throw ConfigError("scenario: weight M must be positive");
    if (sc.weight_alpha < 0.0 || sc.weight_beta < 0.0)
        throw ConfigError("scenario: weight ratios must be nonnegative");

    if (sc.mode == ProtocolMode::centralized) {
        if (!sc.d_leader || !sc.d_normal)
            throw ConfigError("scenario: centralized mode needs d_leader and d_normal");
        if (*sc.d_leader <= 0.0 || *sc.d_normal <= 0.0)
            throw ConfigError("scenario: ranges must be positive");
    } else {
        if (!sc.d_max) throw ConfigError("scenario: distributed mode needs d_max");
        if (*sc.d_max <= 0.0) throw ConfigError("scenario: d_max must be positive");
    }

    // Worst admissible case of the weight formula: zero distance, both
    // nodes at pa_max.
    if (sc.weight_m - sc.weight_beta * sc.pa_max <= 0.0)
        throw ConfigError("scenario: weight params violate positivity; need M > beta * pa_max");

    make_key_exchange(sc.primitive);  // rejects unknown names
}

}  // namespace hsk
