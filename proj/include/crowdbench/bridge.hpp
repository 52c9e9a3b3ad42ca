#pragma once

/**
 * @file bridge.hpp
 * @brief Newline-delimited JSON protocol for external robot policies.
 *
 * Session, one JSON object per line in each direction:
 *
 *   client: {"type":"hello","protocol":1,"name":"mypolicy"}
 *   server: {"type":"config","protocol":1,"dt":..,"max_speed":..,"radius":..}
 *   server: {"type":"episode_start","episode_id":"e1","scenario":..,"seed":..}
 *   server: {"type":"obs","episode_id":"e1","step":0,...}
 *   client: {"type":"act","episode_id":"e1","step":0,"vx":0.0,"vy":1.0}
 *   ...
 *   server: {"type":"episode_end","episode_id":"e1","outcome":"success"}
 *   server: {"type":"end"}
 *
 * A client may answer an observation with {"type":"abort","reason":".."}.
 * The server holds at most one outstanding observation per session.
 */

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "crowdbench/policy.hpp"

namespace crowdbench {

inline constexpr int kBridgeProtocolVersion = 1;

/// Bidirectional line transport. Both calls throw PolicyError once the peer is gone.
class LineChannel {
public:
  virtual ~LineChannel() = default;
  virtual void write_line(std::string_view line) = 0;
  /// Empty optional on timeout.
  virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
};

/// Line channel over a pair of file descriptors; owns and closes both.
class FdChannel : public LineChannel {
public:
  FdChannel(int read_fd, int write_fd);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void write_line(std::string_view line) override;
  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override;

protected:
  void close_fds();

private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

/// Spawns `/bin/sh -c command` and talks to it over its stdin/stdout.
class ChildProcessChannel final : public FdChannel {
public:
  explicit ChildProcessChannel(const std::string& command);
  ~ChildProcessChannel() override;

  int pid() const { return pid_; }

private:
  struct Spawned {
    int read_fd;
    int write_fd;
    int pid;
  };
  static Spawned spawn(const std::string& command);
  explicit ChildProcessChannel(Spawned spawned);

  int pid_;
};

/// Listening TCP socket on 127.0.0.1; each accept yields one channel.
class TcpListener {
public:
  /// port 0 picks an ephemeral port.
  explicit TcpListener(std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Throws PolicyError if no client connects in time.
  std::unique_ptr<LineChannel> accept(std::chrono::milliseconds timeout);

private:
  int fd_;
  std::uint16_t port_;
  std::mutex mutex_;
};

/// Client side of a TCP connection, for tests and in-process clients.
std::unique_ptr<LineChannel> connect_tcp(std::uint16_t port);

struct BridgeSettings {
  double dt{0.25};
  double robot_max_speed{1.0};
  double robot_radius{0.2};
  std::chrono::milliseconds action_timeout{10000};
  std::chrono::milliseconds handshake_timeout{10000};
};

struct ActionMessage {
  std::string episode_id;
  std::uint64_t step{0};
  Vec2 command_velocity;
};

std::string encode_hello_reply(const BridgeSettings& settings);
std::string encode_episode_start(const EpisodeInfo& info);
std::string encode_observation(const Observation& obs);
std::string encode_episode_end(std::string_view episode_id, std::string_view outcome);
std::string encode_end();

/**
 * Parses a client reply to an observation. Throws ProtocolError for bad
 * JSON, wrong type, missing fields or an (episode_id, step) mismatch, and
 * PolicyError when the client sent an abort.
 */
ActionMessage decode_action(std::string_view line, std::string_view expected_episode,
                            std::uint64_t expected_step);

/// Validates a hello line and returns the client name. Throws ProtocolError.
std::string decode_hello(std::string_view line);

/// One handshaken client connection in lockstep.
class PolicySession {
public:
  PolicySession(std::unique_ptr<LineChannel> channel, const BridgeSettings& settings);
  ~PolicySession();
  PolicySession(const PolicySession&) = delete;
  PolicySession& operator=(const PolicySession&) = delete;

  const std::string& client_name() const { return client_name_; }
  bool broken() const { return broken_; }
  bool awaiting_action() const { return outstanding_; }
  std::uint64_t clipped_commands() const { return clipped_; }

  void begin_episode(const EpisodeInfo& info);
  /// Sends one observation and waits for the matching action (clipped to max speed).
  Vec2 request_action(const Observation& obs);
  void end_episode(std::string_view episode_id, std::string_view outcome);
  /// Sends the end-of-run message; idempotent.
  void close();

private:
  template <class F>
  auto guarded(F&& f);

  std::unique_ptr<LineChannel> channel_;
  BridgeSettings settings_;
  std::string client_name_;
  bool broken_{false};
  bool closed_{false};
  bool outstanding_{false};
  std::uint64_t clipped_{0};
};

/// Where an external policy lives: `stdio:<shell command>` or `tcp:<port>`.
struct Transport {
  enum class Kind { stdio, tcp };
  Kind kind{Kind::stdio};
  std::string command;
  std::uint16_t port{0};
};

/// Empty optional if `spec` names neither transport.
std::optional<Transport> parse_transport(std::string_view spec);

/**
 * Opens a session on `transport`: spawns the child for stdio, or accepts
 * one connection on `listener` for tcp. Performs the handshake.
 */
std::unique_ptr<PolicySession> serve_policy_session(const Transport& transport,
                                                    const BridgeSettings& settings,
                                                    TcpListener* listener = nullptr);

/**
 * RobotPolicy backed by an external client. A session that failed is
 * replaced by a fresh one at the next episode start.
 */
class BridgePolicy final : public RobotPolicy {
public:
  BridgePolicy(Transport transport, BridgeSettings settings, TcpListener* listener = nullptr);
  ~BridgePolicy() override;

  std::string name() const override;
  void begin_episode(const EpisodeInfo& info) override;
  PolicyAction act(const Observation& obs) override;
  void end_episode(std::string_view episode_id, std::string_view outcome) override;
  std::uint64_t take_clip_count() override;

private:
  Transport transport_;
  BridgeSettings settings_;
  TcpListener* listener_;
  std::unique_ptr<PolicySession> session_;
  std::uint64_t reported_clips_{0};
};

}  // namespace crowdbench
