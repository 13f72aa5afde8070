#include "edgegov/orch/wire.hpp"

#include <array>
#include <utility>

#include "edgegov/errors.hpp"

namespace edgegov::orch {

namespace {

constexpr std::array<std::pair<MessageKind, std::string_view>, 7> kKindNames{{
    {MessageKind::register_client, "register"},
    {MessageKind::registered, "registered"},
    {MessageKind::command, "command"},
    {MessageKind::pipeline, "pipeline"},
    {MessageKind::ack, "ack"},
    {MessageKind::result, "result"},
    {MessageKind::error, "error"},
}};

// Offset of the value belonging to `"key":` in the raw text, or 0.
std::size_t locate_field(std::string_view bytes, std::string_view key) {
    const std::string needle = "\"" + std::string(key) + "\"";
    auto pos = bytes.find(needle);
    if (pos == std::string_view::npos) return 0;
    pos = bytes.find(':', pos + needle.size());
    if (pos == std::string_view::npos) return 0;
    pos = bytes.find_first_not_of(" \t\r\n", pos + 1);
    return pos == std::string_view::npos ? bytes.size() : pos;
}

std::string string_field(const nlohmann::json& j, std::string_view bytes, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ProtocolError(0, std::string("missing field '") + key + "'");
    if (!it->is_string())
        throw ProtocolError(locate_field(bytes, key), std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(MessageKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

MessageKind kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    throw ProtocolError(0, "unknown message kind '" + std::string(name) + "'");
}

std::string encode_message(const WireMessage& msg) {
    // nlohmann::json objects keep keys sorted, which makes dump() canonical.
    nlohmann::json j{{"kind", to_string(msg.kind)},
                     {"client_id", msg.client_id},
                     {"correlation_id", msg.correlation_id},
                     {"payload", msg.payload.is_null() ? nlohmann::json::object() : msg.payload}};
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

WireMessage decode_message(std::string_view bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError(e.byte > 0 ? e.byte - 1 : 0, e.what());
    }
    if (!j.is_object()) throw ProtocolError(0, "message must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "kind" && key != "client_id" && key != "correlation_id" && key != "payload")
            throw ProtocolError(locate_field(bytes, key), "unexpected field '" + key + "'");

    WireMessage msg;
    const auto kind = string_field(j, bytes, "kind");
    try {
        msg.kind = kind_from_string(kind);
    } catch (const ProtocolError& e) {
        throw ProtocolError(locate_field(bytes, "kind"), "unknown message kind '" + kind + "'");
    }
    msg.client_id = string_field(j, bytes, "client_id");
    msg.correlation_id = string_field(j, bytes, "correlation_id");
    if (auto it = j.find("payload"); it != j.end()) {
        if (!it->is_object()) throw ProtocolError(locate_field(bytes, "payload"), "payload must be an object");
        msg.payload = *it;
    }
    return msg;
}

std::string command_topic(std::string_view client_id) { return "sysgov/command/" + std::string(client_id); }

WireMessage make_pipeline(std::string client_id, std::string correlation_id, std::vector<std::string> commands) {
    return WireMessage{MessageKind::pipeline, std::move(client_id), {{"commands", std::move(commands)}},
                       std::move(correlation_id)};
}

std::vector<std::string> pipeline_commands(const WireMessage& msg) {
    if (msg.kind == MessageKind::command) {
        auto it = msg.payload.find("command");
        if (it == msg.payload.end() || !it->is_string()) throw ProtocolError(0, "command payload needs 'command'");
        return {it->get<std::string>()};
    }
    auto it = msg.payload.find("commands");
    if (msg.kind != MessageKind::pipeline || it == msg.payload.end() || !it->is_array())
        throw ProtocolError(0, "pipeline payload needs a 'commands' array");
    std::vector<std::string> out;
    for (const auto& c : *it) {
        if (!c.is_string()) throw ProtocolError(0, "pipeline commands must be strings");
        out.push_back(c.get<std::string>());
    }
    return out;
}

WireMessage make_reply(MessageKind kind, const WireMessage& request, nlohmann::json payload) {
    return WireMessage{kind, request.client_id, std::move(payload), request.correlation_id};
}

}  // namespace edgegov::orch
