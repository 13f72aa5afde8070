#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace edgegov::orch {

enum class MessageKind { register_client, registered, command, pipeline, ack, result, error };

std::string_view to_string(MessageKind kind);
/// Throws ProtocolError(0, ...) for unknown names.
MessageKind kind_from_string(std::string_view name);

/// One message of the command-pipeline protocol. Replies (ack, result,
/// error) echo the correlation_id of the command or pipeline they answer.
struct WireMessage {
    MessageKind kind{MessageKind::command};
    std::string client_id;
    nlohmann::json payload = nlohmann::json::object();
    std::string correlation_id;

    friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

/// Canonical encoding: compact UTF-8 JSON with lexicographically ordered keys.
std::string encode_message(const WireMessage& msg);

/// Throws ProtocolError carrying the 0-based byte offset of the fault.
WireMessage decode_message(std::string_view bytes);

// Broker topic convention.
inline constexpr std::string_view kFeedbackTopic = "sysgov/feedback";
std::string command_topic(std::string_view client_id);

// Payload helpers.
WireMessage make_pipeline(std::string client_id, std::string correlation_id, std::vector<std::string> commands);
std::vector<std::string> pipeline_commands(const WireMessage& msg);
WireMessage make_reply(MessageKind kind, const WireMessage& request, nlohmann::json payload);

}  // namespace edgegov::orch
