#include "chemscore/endpoint.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

namespace chemscore::harness {

using nlohmann::json;

class ModelEndpoint::Transport {
 public:
  virtual ~Transport() = default;
  virtual void send_line(const std::string& line) = 0;
  virtual std::string recv_line() = 0;

 protected:
  // Buffered reader over a file descriptor.
  std::string read_line_fd(int fd) {
    while (true) {
      std::size_t nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      ssize_t n = ::read(fd, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw EndpointFailure(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) {
        throw EndpointFailure("endpoint closed the connection");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void write_all_fd(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(fd, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw EndpointFailure(std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

 private:
  std::string buffer_;
};

namespace {

class PipeTransport : public ModelEndpoint::Transport {
 public:
  explicit PipeTransport(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
      throw EndpointFailure("pipe() failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw EndpointFailure("fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    signal(SIGPIPE, SIG_IGN);
  }

  ~PipeTransport() override {
    if (write_fd_ >= 0) close(write_fd_);
    if (read_fd_ >= 0) close(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  void send_line(const std::string& line) override {
    write_all_fd(write_fd_, line + "\n");
  }

  std::string recv_line() override { return read_line_fd(read_fd_); }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
};

class SocketTransport : public ModelEndpoint::Transport {
 public:
  SocketTransport(const std::string& host, const std::string& port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &result);
    if (rc != 0) {
      throw EndpointFailure(std::string("getaddrinfo: ") + gai_strerror(rc));
    }
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
      fd_ = socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd_ < 0) continue;
      if (connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
      close(fd_);
      fd_ = -1;
    }
    freeaddrinfo(result);
    if (fd_ < 0) {
      throw EndpointFailure("cannot connect to " + host + ":" + port);
    }
    signal(SIGPIPE, SIG_IGN);
  }

  ~SocketTransport() override {
    if (fd_ >= 0) close(fd_);
  }

  void send_line(const std::string& line) override {
    write_all_fd(fd_, line + "\n");
  }

  std::string recv_line() override { return read_line_fd(fd_); }

 private:
  int fd_ = -1;
};

}  // namespace

ModelEndpoint::ModelEndpoint(std::unique_ptr<Transport> transport)
    : transport_(std::move(transport)), mutex_(std::make_unique<std::mutex>()) {}

ModelEndpoint::ModelEndpoint(ModelEndpoint&&) noexcept = default;
ModelEndpoint& ModelEndpoint::operator=(ModelEndpoint&&) noexcept = default;
ModelEndpoint::~ModelEndpoint() = default;

ModelEndpoint ModelEndpoint::open(const std::string& spec) {
  if (spec.rfind("cmd:", 0) == 0) {
    return ModelEndpoint(std::make_unique<PipeTransport>(spec.substr(4)));
  }
  if (spec.rfind("tcp:", 0) == 0) {
    std::string rest = spec.substr(4);
    std::size_t colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw EndpointFailure("tcp endpoint needs host:port");
    }
    return ModelEndpoint(std::make_unique<SocketTransport>(
        rest.substr(0, colon), rest.substr(colon + 1)));
  }
  throw EndpointFailure("unknown endpoint spec (want cmd:... or tcp:...): " + spec);
}

std::string ModelEndpoint::roundtrip(const std::string& request_line) {
  std::lock_guard<std::mutex> lock(*mutex_);
  transport_->send_line(request_line);
  return transport_->recv_line();
}

GenerateResult ModelEndpoint::generate(const std::string& prompt) {
  if (!can_generate_) throw EndpointFailure("endpoint lacks generate capability");
  json request{{"op", "generate"},
               {"prompt", prompt},
               {"sampling",
                {{"max_tokens", sampling.max_tokens},
                 {"temperature", sampling.temperature},
                 {"stop", sampling.stop}}}};
  json response = json::parse(roundtrip(request.dump()));
  if (response.contains("error")) {
    throw EndpointFailure(response.at("error").get<std::string>());
  }
  return GenerateResult{response.at("text").get<std::string>()};
}

ScoreResult ModelEndpoint::score_tokens(const std::string& prompt) {
  if (!can_score_) throw EndpointFailure("endpoint lacks score capability");
  json request{{"op", "score"}, {"prompt", prompt}};
  json response = json::parse(roundtrip(request.dump()));
  if (response.contains("error")) {
    throw EndpointFailure(response.at("error").get<std::string>());
  }
  ScoreResult result;
  result.token_logprobs = response.at("token_logprobs").get<std::vector<double>>();
  result.token_texts = response.at("token_texts").get<std::vector<std::string>>();
  if (result.token_logprobs.size() != result.token_texts.size()) {
    throw EndpointFailure("token_logprobs / token_texts length mismatch");
  }
  return result;
}

}  // namespace chemscore::harness
