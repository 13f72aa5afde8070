#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "edgegov/orch/transport.hpp"
#include "edgegov/orch/wire.hpp"

namespace edgegov::orch {

struct Delivery {
    std::string topic;
    std::string payload;
};

/// Topic-based publish/subscribe endpoint (an MQTT client, or an in-process stand-in).
class MessageChannel {
public:
    virtual ~MessageChannel() = default;
    virtual void subscribe(const std::string& topic) = 0;
    virtual void publish(const std::string& topic, const std::string& payload) = 0;
    /// Next delivery on a subscribed topic, or nullopt after `timeout`.
    virtual std::optional<Delivery> receive(std::chrono::milliseconds timeout) = 0;
};

/// In-process broker with exact-match topics. Thread-safe.
class LocalBroker : public std::enable_shared_from_this<LocalBroker> {
public:
    static std::shared_ptr<LocalBroker> create() { return std::shared_ptr<LocalBroker>(new LocalBroker); }

    std::unique_ptr<MessageChannel> connect();

private:
    LocalBroker() = default;
    class Endpoint;
    friend class Endpoint;

    void route(const std::string& topic, const std::string& payload);

    std::mutex mutex_;
    std::vector<Endpoint*> endpoints_;
};

/// Drives a SUT through pipeline messages on `sysgov/command/<client_id>`
/// and reads replies from `sysgov/feedback`.
class BrokerTransport final : public SutTransport {
public:
    BrokerTransport(std::unique_ptr<MessageChannel> channel, std::string client_id,
                    std::chrono::milliseconds timeout);

    /// Blocks until the SUT client sends `register`, then answers `registered`.
    void await_registration();

    std::string name() const override { return "broker:" + client_id_; }
    void apply_config(core::NodeConfig config) override;
    void wait(double seconds) override;
    void invoke_stressor(int load_pct, double duration, std::uint64_t seed) override;
    double read_power() override;
    StressorMetrics read_metrics() override;

private:
    WireMessage run_pipeline(std::vector<std::string> commands);

    std::unique_ptr<MessageChannel> channel_;
    std::string client_id_;
    std::chrono::milliseconds timeout_;
    std::uint64_t next_id_{1};
    std::optional<double> power_;
    std::optional<double> bogo_ops_;
};

/// SUT-side client that executes pipeline commands against a simulated node:
/// cpufreq-set applies a rung, stress-ng runs the stressor and prints
/// --metrics-brief output, sleep measures idle. Each result carries the
/// metered `power_w` of the last stressor or sleep command.
class SimulatedAgent {
public:
    SimulatedAgent(std::unique_ptr<MessageChannel> channel, std::string client_id, sim::DeviceProfile profile,
                   std::uint64_t seed = 0);
    ~SimulatedAgent();

    SimulatedAgent(const SimulatedAgent&) = delete;
    SimulatedAgent& operator=(const SimulatedAgent&) = delete;

    /// Registers with the orchestrator and serves commands on a worker thread.
    void start();
    void stop();

    /// Handles one request synchronously; returns the replies it would publish.
    std::vector<WireMessage> handle(const WireMessage& request);

private:
    void serve();

    std::unique_ptr<MessageChannel> channel_;
    std::string client_id_;
    sim::SimulatedNode node_;
    std::uint64_t seed_;
    std::atomic<bool> running_{false};
    std::thread worker_;
};

}  // namespace edgegov::orch
