#include "edgegov/orch/broker.hpp"

#include <algorithm>

#include "edgegov/errors.hpp"
#include "edgegov/orch/stress_ng.hpp"

namespace edgegov::orch {

class LocalBroker::Endpoint final : public MessageChannel {
public:
    explicit Endpoint(std::shared_ptr<LocalBroker> broker) : broker_(std::move(broker)) {
        std::lock_guard lock(broker_->mutex_);
        broker_->endpoints_.push_back(this);
    }

    ~Endpoint() override {
        std::lock_guard lock(broker_->mutex_);
        std::erase(broker_->endpoints_, this);
    }

    void subscribe(const std::string& topic) override {
        std::lock_guard lock(mutex_);
        topics_.push_back(topic);
    }

    void publish(const std::string& topic, const std::string& payload) override { broker_->route(topic, payload); }

    std::optional<Delivery> receive(std::chrono::milliseconds timeout) override {
        std::unique_lock lock(mutex_);
        if (!ready_.wait_for(lock, timeout, [&] { return !inbox_.empty(); })) return std::nullopt;
        auto d = std::move(inbox_.front());
        inbox_.pop_front();
        return d;
    }

    void offer(const std::string& topic, const std::string& payload) {
        {
            std::lock_guard lock(mutex_);
            if (std::find(topics_.begin(), topics_.end(), topic) == topics_.end()) return;
            inbox_.push_back({topic, payload});
        }
        ready_.notify_one();
    }

private:
    std::shared_ptr<LocalBroker> broker_;
    std::mutex mutex_;
    std::condition_variable ready_;
    std::vector<std::string> topics_;
    std::deque<Delivery> inbox_;
};

std::unique_ptr<MessageChannel> LocalBroker::connect() { return std::make_unique<Endpoint>(shared_from_this()); }

void LocalBroker::route(const std::string& topic, const std::string& payload) {
    std::lock_guard lock(mutex_);
    for (auto* e : endpoints_) e->offer(topic, payload);
}

// ---------------------------------------------------------------------------

BrokerTransport::BrokerTransport(std::unique_ptr<MessageChannel> channel, std::string client_id,
                                 std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), client_id_(std::move(client_id)), timeout_(timeout) {
    channel_->subscribe(std::string(kFeedbackTopic));
}

void BrokerTransport::await_registration() {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (true) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) break;
        auto d = channel_->receive(left);
        if (!d) break;
        WireMessage msg;
        try {
            msg = decode_message(d->payload);
        } catch (const ProtocolError&) {
            continue;
        }
        if (msg.kind == MessageKind::register_client && msg.client_id == client_id_) {
            channel_->publish(command_topic(client_id_),
                              encode_message(make_reply(MessageKind::registered, msg, nlohmann::json::object())));
            return;
        }
    }
    throw TransportTimeout("client '" + client_id_ + "' did not register");
}

WireMessage BrokerTransport::run_pipeline(std::vector<std::string> commands) {
    const std::string id = client_id_ + "-" + std::to_string(next_id_++);
    channel_->publish(command_topic(client_id_), encode_message(make_pipeline(client_id_, id, std::move(commands))));
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (true) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) break;
        auto d = channel_->receive(left);
        if (!d) break;
        WireMessage msg;
        try {
            msg = decode_message(d->payload);
        } catch (const ProtocolError&) {
            continue;
        }
        if (msg.correlation_id != id) continue;
        if (msg.kind == MessageKind::result || msg.kind == MessageKind::error) return msg;
    }
    throw TransportTimeout("no result for pipeline " + id + " from '" + client_id_ + "'");
}

void BrokerTransport::apply_config(core::NodeConfig config) {
    auto reply = run_pipeline({cpufreq_set_command(config.freq)});
    if (reply.kind == MessageKind::error)
        throw ConfigRejected("cpufreq-set " + std::to_string(config.freq.value) +
                             " kHz failed: " + reply.payload.value("stderr", std::string("unknown error")));
}

void BrokerTransport::wait(double seconds) {
    if (seconds > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

void BrokerTransport::invoke_stressor(int load_pct, double duration, std::uint64_t) {
    power_.reset();
    bogo_ops_.reset();
    auto reply = run_pipeline({stressor_command(load_pct, duration)});
    if (reply.kind == MessageKind::error)
        throw TransportError("stressor failed: " + reply.payload.value("stderr", std::string("unknown error")));
    const auto& outputs = reply.payload.at("outputs");
    if (!outputs.is_array() || outputs.empty()) throw TransportError("result without outputs");
    if (load_pct == 0) {
        bogo_ops_ = 0.0;
    } else {
        bogo_ops_ = parse_bogo_ops_per_sec(outputs.back().value("stdout", std::string()));
        if (!bogo_ops_) throw TransportError("no cpu metrics in stress-ng output");
    }
    if (auto it = reply.payload.find("power_w"); it != reply.payload.end() && it->is_number()) power_ = it->get<double>();
}

double BrokerTransport::read_power() {
    if (!power_) throw TransportError("no power reading for the last stressor run");
    return *power_;
}

StressorMetrics BrokerTransport::read_metrics() {
    if (!bogo_ops_) throw TransportError("no metrics for the last stressor run");
    return {*bogo_ops_};
}

// ---------------------------------------------------------------------------

SimulatedAgent::SimulatedAgent(std::unique_ptr<MessageChannel> channel, std::string client_id,
                               sim::DeviceProfile profile, std::uint64_t seed)
    : channel_(std::move(channel)), client_id_(std::move(client_id)), node_(std::move(profile)), seed_(seed) {
    channel_->subscribe(command_topic(client_id_));
}

SimulatedAgent::~SimulatedAgent() { stop(); }

void SimulatedAgent::start() {
    if (running_.exchange(true)) return;
    channel_->publish(std::string(kFeedbackTopic),
                      encode_message({MessageKind::register_client, client_id_, nlohmann::json::object(), "reg"}));
    worker_ = std::thread([this] { serve(); });
}

void SimulatedAgent::stop() {
    running_ = false;
    if (worker_.joinable()) worker_.join();
}

void SimulatedAgent::serve() {
    using namespace std::chrono_literals;
    while (running_) {
        auto d = channel_->receive(20ms);
        if (!d) continue;
        std::vector<WireMessage> replies;
        try {
            replies = handle(decode_message(d->payload));
        } catch (const ProtocolError& e) {
            replies = {WireMessage{MessageKind::error, client_id_, {{"stderr", e.what()}}, ""}};
        }
        for (const auto& r : replies) channel_->publish(std::string(kFeedbackTopic), encode_message(r));
    }
}

std::vector<WireMessage> SimulatedAgent::handle(const WireMessage& request) {
    if (request.kind != MessageKind::command && request.kind != MessageKind::pipeline) return {};
    std::vector<WireMessage> replies{make_reply(MessageKind::ack, request, nlohmann::json::object())};

    nlohmann::json outputs = nlohmann::json::array();
    std::optional<double> power;
    for (const auto& command : pipeline_commands(request)) {
        const auto cmd = parse_command(command);
        nlohmann::json out{{"command", command}, {"exit_code", 0}, {"stdout", ""}, {"stderr", ""}};
        try {
            switch (cmd.kind) {
                case ParsedCommand::Kind::cpufreq_set:
                    node_.apply(cmd.freq);
                    break;
                case ParsedCommand::Kind::stress_ng:
                case ParsedCommand::Kind::sleep: {
                    const auto report = node_.stress(cmd.load_pct, cmd.timeout > 0 ? cmd.timeout : 1.0, seed_++);
                    power = report.power;
                    if (cmd.kind == ParsedCommand::Kind::stress_ng) {
                        const double ops = report.bogo_ops_per_sec * report.duration;
                        out["stdout"] = format_metrics_brief(ops, report.duration,
                                                             report.duration * 4 * report.load_pct / 100.0, 0.0);
                    }
                    break;
                }
                case ParsedCommand::Kind::unknown:
                    throw DomainError("command", "unsupported command '" + command + "'");
            }
        } catch (const DomainError& e) {
            out["exit_code"] = 1;
            out["stderr"] = e.what();
            outputs.push_back(out);
            replies.push_back(make_reply(MessageKind::error, request,
                                         {{"command", command}, {"exit_code", 1}, {"stderr", e.what()}, {"outputs", outputs}}));
            return replies;
        }
        outputs.push_back(out);
    }
    nlohmann::json payload{{"outputs", outputs}};
    if (power) payload["power_w"] = *power;
    replies.push_back(make_reply(MessageKind::result, request, payload));
    return replies;
}

}  // namespace edgegov::orch
