#include "crsim/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/select.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "crsim/errors.hpp"

namespace crsim {

bool write_all(int fd, const std::string& data) {
    std::size_t written = 0;
    while (written < data.size()) {
        ssize_t n = ::write(fd, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        written += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> read_line_fd(int fd, std::string& buffer, double timeout_seconds) {
    while (true) {
        auto newline = buffer.find('\n');
        if (newline != std::string::npos) {
            std::string line = buffer.substr(0, newline);
            buffer.erase(0, newline + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }

        fd_set readfds;
        FD_ZERO(&readfds);
        FD_SET(fd, &readfds);
        struct timeval tv;
        tv.tv_sec = static_cast<time_t>(timeout_seconds);
        tv.tv_usec = static_cast<suseconds_t>((timeout_seconds - static_cast<double>(tv.tv_sec)) * 1e6);
        int ready = ::select(fd + 1, &readfds, nullptr, nullptr, &tv);
        if (ready < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        if (ready == 0) return std::nullopt;  // timeout

        char chunk[4096];
        ssize_t n = ::read(fd, chunk, sizeof(chunk));
        if (n <= 0) return std::nullopt;  // closed or error
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

SubprocessTransport::SubprocessTransport(std::vector<std::string> argv) {
    if (argv.empty()) throw TransportError("subprocess transport needs a command");
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw TransportError("pipe() failed");
    if (::pipe(from_child) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw TransportError("pipe() failed");
    }
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        ::close(from_child[0]);
        ::close(from_child[1]);
        throw TransportError("fork() failed");
    }
    if (pid == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::close(to_child[0]);
        ::close(to_child[1]);
        ::close(from_child[0]);
        ::close(from_child[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (auto& a : argv) args.push_back(a.data());
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    ::signal(SIGPIPE, SIG_IGN);
}

SubprocessTransport::~SubprocessTransport() {
    close_pipes();
    if (pid_ > 0) {
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
}

void SubprocessTransport::close_pipes() {
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
        from_child_ = -1;
    }
}

bool SubprocessTransport::running() const {
    if (pid_ <= 0) return false;
    return ::waitpid(pid_, nullptr, WNOHANG) == 0;
}

std::optional<std::string> SubprocessTransport::exchange(const std::string& line,
                                                         double timeout_seconds) {
    if (to_child_ < 0 || from_child_ < 0) return std::nullopt;
    if (!write_all(to_child_, line + "\n")) return std::nullopt;
    return read_line_fd(from_child_, buffer_, timeout_seconds);
}

TcpTransport::TcpTransport(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    std::string resolved = host == "localhost" ? "127.0.0.1" : host;
    if (::inet_pton(AF_INET, resolved.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        fd_ = -1;
        throw TransportError("cannot resolve host: " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw TransportError("cannot connect to " + host + ":" + std::to_string(port));
    }
    ::signal(SIGPIPE, SIG_IGN);
}

TcpTransport::~TcpTransport() {
    if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> TcpTransport::exchange(const std::string& line,
                                                  double timeout_seconds) {
    if (fd_ < 0) return std::nullopt;
    if (!write_all(fd_, line + "\n")) return std::nullopt;
    return read_line_fd(fd_, buffer_, timeout_seconds);
}

TcpListener::TcpListener(int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("socket() failed");
    int yes = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw TransportError("cannot bind port " + std::to_string(port));
    }
    if (::listen(fd_, 16) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw TransportError("listen() failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close_listener(); }

int TcpListener::accept_connection() {
    if (fd_ < 0) return -1;
    while (true) {
        int client = ::accept(fd_, nullptr, nullptr);
        if (client >= 0) return client;
        if (errno == EINTR) continue;
        return -1;
    }
}

void TcpListener::close_listener() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace crsim
