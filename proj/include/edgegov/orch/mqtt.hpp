#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include "edgegov/orch/broker.hpp"

namespace edgegov::orch::mqtt {

// MQTT 3.1.1 control packet types (upper nibble of the fixed header).
enum class PacketType : std::uint8_t {
    connect = 1,
    connack = 2,
    publish = 3,
    subscribe = 8,
    suback = 9,
    pingreq = 12,
    pingresp = 13,
    disconnect = 14,
};

struct Packet {
    std::uint8_t header{0};
    std::string body;  // variable header + payload

    PacketType type() const { return static_cast<PacketType>(header >> 4); }
};

std::string encode_remaining_length(std::size_t n);

std::string encode_connect(std::string_view client_id, std::uint16_t keepalive_s);
std::string encode_subscribe(std::uint16_t packet_id, std::string_view topic);
std::string encode_publish(std::string_view topic, std::string_view payload);
std::string encode_pingreq();
std::string encode_disconnect();

/// Decodes one packet from the front of `buffer`. Returns the packet and
/// the bytes consumed, or nullopt when more input is needed. Throws
/// ProtocolError on a malformed length.
std::optional<std::pair<Packet, std::size_t>> decode_packet(std::string_view buffer);

/// Topic and payload of a QoS 0 PUBLISH.
Delivery parse_publish(const Packet& packet);

struct ConnectionOptions {
    std::string host{"127.0.0.1"};
    std::uint16_t port{1883};
    std::string client_id{"edgegov-orchestrator"};
    std::uint16_t keepalive_s{30};
    std::chrono::milliseconds connect_timeout{5000};
};

/// MessageChannel over a TCP connection to an MQTT broker (QoS 0 only).
class TcpChannel final : public MessageChannel {
public:
    explicit TcpChannel(ConnectionOptions options);
    ~TcpChannel() override;

    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

    void subscribe(const std::string& topic) override;
    void publish(const std::string& topic, const std::string& payload) override;
    std::optional<Delivery> receive(std::chrono::milliseconds timeout) override;

private:
    void send_all(std::string_view bytes);
    std::optional<Packet> read_packet(std::chrono::milliseconds timeout);

    ConnectionOptions options_;
    int fd_{-1};
    std::string buffer_;
    std::deque<Delivery> early_;  // publishes seen while awaiting SUBACK
    std::uint16_t next_packet_id_{1};
    std::chrono::steady_clock::time_point last_send_;
};

}  // namespace edgegov::orch::mqtt
