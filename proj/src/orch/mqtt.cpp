#include "edgegov/orch/mqtt.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "edgegov/errors.hpp"

namespace edgegov::orch::mqtt {

namespace {

std::string encode_string(std::string_view s) {
    if (s.size() > 0xffff) throw ProtocolError(0, "MQTT string longer than 65535 bytes");
    std::string out;
    out += static_cast<char>(s.size() >> 8);
    out += static_cast<char>(s.size() & 0xff);
    out += s;
    return out;
}

std::string frame(std::uint8_t header, std::string_view body) {
    std::string out(1, static_cast<char>(header));
    out += encode_remaining_length(body.size());
    out += body;
    return out;
}

}  // namespace

std::string encode_remaining_length(std::size_t n) {
    if (n > 268'435'455) throw ProtocolError(0, "MQTT packet too large");
    std::string out;
    do {
        auto byte = static_cast<std::uint8_t>(n % 128);
        n /= 128;
        if (n > 0) byte |= 0x80;
        out += static_cast<char>(byte);
    } while (n > 0);
    return out;
}

std::string encode_connect(std::string_view client_id, std::uint16_t keepalive_s) {
    std::string body = encode_string("MQTT");
    body += static_cast<char>(4);     // protocol level 3.1.1
    body += static_cast<char>(0x02);  // clean session
    body += static_cast<char>(keepalive_s >> 8);
    body += static_cast<char>(keepalive_s & 0xff);
    body += encode_string(client_id);
    return frame(0x10, body);
}

std::string encode_subscribe(std::uint16_t packet_id, std::string_view topic) {
    std::string body;
    body += static_cast<char>(packet_id >> 8);
    body += static_cast<char>(packet_id & 0xff);
    body += encode_string(topic);
    body += static_cast<char>(0);  // requested QoS
    return frame(0x82, body);
}

std::string encode_publish(std::string_view topic, std::string_view payload) {
    std::string body = encode_string(topic);
    body += payload;
    return frame(0x30, body);
}

std::string encode_pingreq() { return frame(0xC0, {}); }
std::string encode_disconnect() { return frame(0xE0, {}); }

std::optional<std::pair<Packet, std::size_t>> decode_packet(std::string_view buffer) {
    if (buffer.size() < 2) return std::nullopt;
    std::size_t length = 0, multiplier = 1, pos = 1;
    while (true) {
        if (pos >= buffer.size()) return std::nullopt;
        if (pos > 4) throw ProtocolError(pos, "malformed MQTT remaining length");
        const auto byte = static_cast<std::uint8_t>(buffer[pos++]);
        length += (byte & 0x7f) * multiplier;
        multiplier *= 128;
        if (!(byte & 0x80)) break;
    }
    if (buffer.size() < pos + length) return std::nullopt;
    Packet p{static_cast<std::uint8_t>(buffer[0]), std::string(buffer.substr(pos, length))};
    return std::make_pair(std::move(p), pos + length);
}

Delivery parse_publish(const Packet& packet) {
    if (packet.type() != PacketType::publish) throw ProtocolError(0, "not a PUBLISH packet");
    const auto& b = packet.body;
    if (b.size() < 2) throw ProtocolError(1, "truncated PUBLISH topic");
    const std::size_t len = (static_cast<std::uint8_t>(b[0]) << 8) | static_cast<std::uint8_t>(b[1]);
    if (b.size() < 2 + len) throw ProtocolError(2, "truncated PUBLISH topic");
    std::size_t pos = 2 + len;
    const int qos = (packet.header >> 1) & 0x3;
    if (qos > 0) pos += 2;  // packet identifier
    if (pos > b.size()) throw ProtocolError(pos, "truncated PUBLISH packet");
    return {b.substr(2, len), b.substr(pos)};
}

// ---------------------------------------------------------------------------

TcpChannel::TcpChannel(ConnectionOptions options) : options_(std::move(options)) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto port = std::to_string(options_.port);
    if (int rc = ::getaddrinfo(options_.host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw TransportError("cannot resolve " + options_.host + ": " + ::gai_strerror(rc));
    for (auto* ai = res; ai; ai = ai->ai_next) {
        fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd_ < 0) continue;
        if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd_);
        fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw TransportError("cannot connect to " + options_.host + ":" + port);

    send_all(encode_connect(options_.client_id, options_.keepalive_s));
    auto ack = read_packet(options_.connect_timeout);
    if (!ack || ack->type() != PacketType::connack || ack->body.size() < 2)
        throw TransportTimeout("no CONNACK from " + options_.host + ":" + port);
    if (ack->body[1] != 0)
        throw TransportError("broker refused connection, return code " +
                             std::to_string(static_cast<int>(static_cast<std::uint8_t>(ack->body[1]))));
}

TcpChannel::~TcpChannel() {
    if (fd_ >= 0) {
        try {
            send_all(encode_disconnect());
        } catch (const std::exception&) {
        }
        ::close(fd_);
    }
}

void TcpChannel::send_all(std::string_view bytes) {
    while (!bytes.empty()) {
        const auto n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("MQTT send failed: ") + std::strerror(errno));
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
    last_send_ = std::chrono::steady_clock::now();
}

std::optional<Packet> TcpChannel::read_packet(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        if (auto decoded = decode_packet(buffer_)) {
            buffer_.erase(0, decoded->second);
            return std::move(decoded->first);
        }
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) return std::nullopt;
        if (now - last_send_ > std::chrono::seconds(options_.keepalive_s) / 2) send_all(encode_pingreq());
        pollfd pfd{fd_, POLLIN, 0};
        const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait_ms, 1000)));
        if (rc < 0 && errno != EINTR) throw TransportError(std::string("MQTT poll failed: ") + std::strerror(errno));
        if (rc <= 0) continue;
        char chunk[4096];
        const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n == 0) throw TransportError("MQTT broker closed the connection");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("MQTT recv failed: ") + std::strerror(errno));
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void TcpChannel::subscribe(const std::string& topic) {
    const auto id = next_packet_id_++;
    send_all(encode_subscribe(id, topic));
    const auto deadline = std::chrono::steady_clock::now() + options_.connect_timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        auto p = read_packet(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()));
        if (p && p->type() == PacketType::suback) return;
        if (p && p->type() == PacketType::publish) early_.push_back(parse_publish(*p));
    }
    throw TransportTimeout("no SUBACK for '" + topic + "'");
}

void TcpChannel::publish(const std::string& topic, const std::string& payload) {
    send_all(encode_publish(topic, payload));
}

std::optional<Delivery> TcpChannel::receive(std::chrono::milliseconds timeout) {
    if (!early_.empty()) {
        auto d = std::move(early_.front());
        early_.pop_front();
        return d;
    }
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        auto p = read_packet(left);
        if (!p) return std::nullopt;
        if (p->type() == PacketType::publish) return parse_publish(*p);
    }
}

}  // namespace edgegov::orch::mqtt
