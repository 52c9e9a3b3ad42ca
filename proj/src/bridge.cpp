#include "crowdbench/bridge.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <thread>

#include <json.hpp>

#include "crowdbench/errors.hpp"

namespace crowdbench {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

}  // namespace

// ---------------------------------------------------------------------------
// Channels

FdChannel::FdChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {
  ignore_sigpipe();
}

FdChannel::~FdChannel() { close_fds(); }

void FdChannel::close_fds() {
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  read_fd_ = -1;
  write_fd_ = -1;
}

void FdChannel::write_line(std::string_view line) {
  if (write_fd_ < 0) throw PolicyError("channel closed");
  std::string data(line);
  data.push_back('\n');
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(write_fd_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw PolicyError(errno_text("write to policy client failed"));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdChannel::read_line(std::chrono::milliseconds timeout) {
  if (read_fd_ < 0) throw PolicyError("channel closed");
  const auto deadline = Clock::now() + timeout;
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) return std::nullopt;

    pollfd pfd{read_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw PolicyError(errno_text("poll failed"));
    }
    if (ready == 0) return std::nullopt;

    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw PolicyError(errno_text("read from policy client failed"));
    }
    if (n == 0) throw PolicyError("policy client closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ChildProcessChannel::Spawned ChildProcessChannel::spawn(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw PolicyError(errno_text("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw PolicyError(errno_text("pipe"));
  }

  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw PolicyError(errno_text("fork"));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(to_child[0]);
  ::close(from_child[1]);
  return {from_child[0], to_child[1], pid};
}

ChildProcessChannel::ChildProcessChannel(const std::string& command)
    : ChildProcessChannel(spawn(command)) {}

ChildProcessChannel::ChildProcessChannel(Spawned s)
    : FdChannel(s.read_fd, s.write_fd), pid_(s.pid) {}

ChildProcessChannel::~ChildProcessChannel() {
  close_fds();
  // Give the client a moment to exit on EOF, then kill whatever the shell left behind.
  bool reaped = false;
  const auto deadline = Clock::now() + std::chrono::seconds(2);
  while (!reaped && Clock::now() < deadline) {
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    reaped = r == pid_ || (r < 0 && errno != EINTR);
    if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ::kill(-pid_, SIGKILL);
  if (!reaped) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

TcpListener::TcpListener(std::uint16_t port) {
  ignore_sigpipe();
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw IoError(errno_text("socket"));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 16) != 0) {
    const std::string msg = errno_text("bind/listen");
    ::close(fd_);
    throw IoError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineChannel> TcpListener::accept(std::chrono::milliseconds timeout) {
  std::lock_guard lock(mutex_);
  pollfd pfd{fd_, POLLIN, 0};
  int ready;
  do {
    ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  } while (ready < 0 && errno == EINTR);
  if (ready <= 0) throw PolicyError("no policy client connected within the timeout");
  const int conn = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
  if (conn < 0) throw PolicyError(errno_text("accept"));
  const int dup_fd = ::fcntl(conn, F_DUPFD_CLOEXEC, 0);
  return std::make_unique<FdChannel>(conn, dup_fd);
}

std::unique_ptr<LineChannel> connect_tcp(std::uint16_t port) {
  ignore_sigpipe();
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw IoError(errno_text("socket"));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string msg = errno_text("connect");
    ::close(fd);
    throw IoError(msg);
  }
  return std::make_unique<FdChannel>(fd, ::fcntl(fd, F_DUPFD_CLOEXEC, 0));
}

// ---------------------------------------------------------------------------
// Messages

std::string encode_hello_reply(const BridgeSettings& s) {
  return Json{{"type", "config"},
              {"protocol", kBridgeProtocolVersion},
              {"dt", s.dt},
              {"max_speed", s.robot_max_speed},
              {"radius", s.robot_radius}}
      .dump();
}

std::string encode_episode_start(const EpisodeInfo& info) {
  return Json{{"type", "episode_start"},
              {"episode_id", info.episode_id},
              {"scenario", info.scenario_kind},
              {"seed", info.seed},
              {"dt", info.dt},
              {"max_speed", info.robot_max_speed}}
      .dump();
}

std::string encode_observation(const Observation& obs) {
  Json humans = Json::array();
  for (const AgentState& h : obs.humans) {
    humans.push_back({{"id", h.id},
                      {"px", h.position.x},
                      {"py", h.position.y},
                      {"vx", h.velocity.x},
                      {"vy", h.velocity.y},
                      {"radius", h.radius}});
  }
  const AgentState& r = obs.robot;
  return Json{{"type", "obs"},
              {"episode_id", obs.episode_id},
              {"step", obs.step},
              {"dt", obs.dt},
              {"time_remaining", obs.time_remaining},
              {"robot",
               {{"px", r.position.x},
                {"py", r.position.y},
                {"vx", r.velocity.x},
                {"vy", r.velocity.y},
                {"radius", r.radius},
                {"gx", r.goal.x},
                {"gy", r.goal.y},
                {"v_pref", r.preferred_speed}}},
              {"robot_goal", Json::array({obs.robot_goal.x, obs.robot_goal.y})},
              {"humans", std::move(humans)}}
      .dump();
}

std::string encode_episode_end(std::string_view episode_id, std::string_view outcome) {
  return Json{{"type", "episode_end"},
              {"episode_id", std::string(episode_id)},
              {"outcome", std::string(outcome)}}
      .dump();
}

std::string encode_end() { return Json{{"type", "end"}}.dump(); }

namespace {

Json parse_message(std::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("malformed message: " + std::string(line.substr(0, 200)));
  }
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("message without a type");
  return j;
}

}  // namespace

std::string decode_hello(std::string_view line) {
  const Json j = parse_message(line);
  if (j["type"] != "hello") throw ProtocolError("expected hello, got " + j["type"].get<std::string>());
  if (!j.contains("protocol") || !j["protocol"].is_number_integer()) {
    throw ProtocolError("hello without protocol version");
  }
  if (j["protocol"].get<int>() != kBridgeProtocolVersion) {
    throw ProtocolError("unsupported protocol version " + j["protocol"].dump());
  }
  return j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "external";
}

ActionMessage decode_action(std::string_view line, std::string_view expected_episode,
                            std::uint64_t expected_step) {
  const Json j = parse_message(line);
  const std::string type = j["type"].get<std::string>();
  if (type == "abort") {
    const std::string reason =
        j.contains("reason") && j["reason"].is_string() ? j["reason"].get<std::string>() : "";
    throw PolicyError("client aborted: " + reason);
  }
  if (type != "act") throw ProtocolError("expected act, got " + type);

  const auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ProtocolError(std::string("act message missing numeric ") + key);
    }
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) throw ProtocolError(std::string("non-finite ") + key);
    return v;
  };

  ActionMessage msg;
  if (!j.contains("episode_id") || !j["episode_id"].is_string()) {
    throw ProtocolError("act message missing episode_id");
  }
  if (!j.contains("step") || !j["step"].is_number_unsigned()) {
    throw ProtocolError("act message missing step");
  }
  msg.episode_id = j["episode_id"].get<std::string>();
  msg.step = j["step"].get<std::uint64_t>();
  msg.command_velocity = {number("vx"), number("vy")};
  if (msg.episode_id != expected_episode || msg.step != expected_step) {
    throw ProtocolError("action for (" + msg.episode_id + ", " + std::to_string(msg.step) +
                        ") does not answer (" + std::string(expected_episode) + ", " +
                        std::to_string(expected_step) + ")");
  }
  return msg;
}

// ---------------------------------------------------------------------------
// Session

template <class F>
auto PolicySession::guarded(F&& f) {
  if (broken_) throw PolicyError("policy session is broken");
  try {
    return f();
  } catch (const PolicyError&) {
    broken_ = true;
    throw;
  }
}

PolicySession::PolicySession(std::unique_ptr<LineChannel> channel, const BridgeSettings& settings)
    : channel_(std::move(channel)), settings_(settings) {
  guarded([&] {
    const auto hello = channel_->read_line(settings_.handshake_timeout);
    if (!hello) throw PolicyError("policy client sent no hello within the timeout");
    client_name_ = decode_hello(*hello);
    channel_->write_line(encode_hello_reply(settings_));
  });
}

PolicySession::~PolicySession() {
  try {
    close();
  } catch (...) {
  }
}

void PolicySession::begin_episode(const EpisodeInfo& info) {
  guarded([&] { channel_->write_line(encode_episode_start(info)); });
}

Vec2 PolicySession::request_action(const Observation& obs) {
  return guarded([&] {
    if (outstanding_) throw ProtocolError("observation sent while another is outstanding");
    channel_->write_line(encode_observation(obs));
    outstanding_ = true;
    const auto line = channel_->read_line(settings_.action_timeout);
    if (!line) throw PolicyError("timed out waiting for action");
    const ActionMessage action = decode_action(*line, obs.episode_id, obs.step);
    outstanding_ = false;

    const Vec2 clipped = clip_to_speed(action.command_velocity, settings_.robot_max_speed);
    if (!(clipped == action.command_velocity)) ++clipped_;
    return clipped;
  });
}

void PolicySession::end_episode(std::string_view episode_id, std::string_view outcome) {
  guarded([&] { channel_->write_line(encode_episode_end(episode_id, outcome)); });
}

void PolicySession::close() {
  if (closed_ || broken_) return;
  closed_ = true;
  channel_->write_line(encode_end());
}

std::optional<Transport> parse_transport(std::string_view spec) {
  Transport t;
  if (spec.starts_with("stdio:")) {
    t.kind = Transport::Kind::stdio;
    t.command = std::string(spec.substr(6));
    if (t.command.empty()) return std::nullopt;
    return t;
  }
  if (spec.starts_with("tcp:")) {
    const std::string_view digits = spec.substr(4);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value > 65535) {
      return std::nullopt;
    }
    t.kind = Transport::Kind::tcp;
    t.port = static_cast<std::uint16_t>(value);
    return t;
  }
  return std::nullopt;
}

std::unique_ptr<PolicySession> serve_policy_session(const Transport& transport,
                                                    const BridgeSettings& settings,
                                                    TcpListener* listener) {
  std::unique_ptr<LineChannel> channel;
  if (transport.kind == Transport::Kind::stdio) {
    channel = std::make_unique<ChildProcessChannel>(transport.command);
  } else {
    if (listener == nullptr) throw ConfigError("tcp transport needs a listener");
    channel = listener->accept(settings.handshake_timeout);
  }
  return std::make_unique<PolicySession>(std::move(channel), settings);
}

// ---------------------------------------------------------------------------
// RobotPolicy adapter

BridgePolicy::BridgePolicy(Transport transport, BridgeSettings settings, TcpListener* listener)
    : transport_(std::move(transport)), settings_(settings), listener_(listener) {}

BridgePolicy::~BridgePolicy() = default;

std::string BridgePolicy::name() const {
  if (session_) return "bridge:" + session_->client_name();
  return transport_.kind == Transport::Kind::stdio ? "bridge:stdio"
                                                   : "bridge:tcp:" + std::to_string(transport_.port);
}

void BridgePolicy::begin_episode(const EpisodeInfo& info) {
  if (!session_ || session_->broken()) {
    session_.reset();
    reported_clips_ = 0;
    session_ = serve_policy_session(transport_, settings_, listener_);
  }
  session_->begin_episode(info);
}

PolicyAction BridgePolicy::act(const Observation& obs) {
  if (!session_) throw PolicyError("no policy session");
  return {session_->request_action(obs)};
}

void BridgePolicy::end_episode(std::string_view episode_id, std::string_view outcome) {
  if (session_ && !session_->broken()) session_->end_episode(episode_id, outcome);
}

std::uint64_t BridgePolicy::take_clip_count() {
  if (!session_) return 0;
  const std::uint64_t total = session_->clipped_commands();
  const std::uint64_t fresh = total - reported_clips_;
  reported_clips_ = total;
  return fresh;
}

}  // namespace crowdbench
