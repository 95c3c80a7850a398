#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace crsim {

// Line-oriented request/response channel to a black-box agent. The engine
// sees nothing but utterance text going through one of these.
class AgentTransport {
public:
    virtual ~AgentTransport() = default;

    // Sends one line and waits for one response line. Returns nullopt on
    // timeout or closed channel.
    virtual std::optional<std::string> exchange(const std::string& line,
                                                double timeout_seconds) = 0;
};

// Child process speaking the protocol over its standard streams.
class SubprocessTransport : public AgentTransport {
public:
    explicit SubprocessTransport(std::vector<std::string> argv);
    ~SubprocessTransport() override;

    SubprocessTransport(const SubprocessTransport&) = delete;
    SubprocessTransport& operator=(const SubprocessTransport&) = delete;

    std::optional<std::string> exchange(const std::string& line,
                                        double timeout_seconds) override;

    bool running() const;

private:
    void close_pipes();

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

// TCP connection; the engine opens one per conversation.
class TcpTransport : public AgentTransport {
public:
    TcpTransport(const std::string& host, int port);
    ~TcpTransport() override;

    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    std::optional<std::string> exchange(const std::string& line,
                                        double timeout_seconds) override;

private:
    int fd_ = -1;
    std::string buffer_;
};

// In-process function transport, for tests that need an agent without a
// process or socket.
class CallbackTransport : public AgentTransport {
public:
    using Handler = std::function<std::optional<std::string>(const std::string&)>;
    explicit CallbackTransport(Handler handler) : handler_(std::move(handler)) {}

    std::optional<std::string> exchange(const std::string& line, double) override {
        return handler_(line);
    }

private:
    Handler handler_;
};

// Minimal blocking TCP listener used by the stub agent's server loop.
class TcpListener {
public:
    explicit TcpListener(int port);  // port 0 picks a free port
    ~TcpListener();

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    int port() const { return port_; }
    // Returns a connected socket fd, or -1 once closed.
    int accept_connection();
    void close_listener();

private:
    int fd_ = -1;
    int port_ = 0;
};

// Line helpers over raw fds, shared by transports and the stub server.
bool write_all(int fd, const std::string& data);
std::optional<std::string> read_line_fd(int fd, std::string& buffer, double timeout_seconds);

}  // namespace crsim
