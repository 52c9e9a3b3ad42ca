// Scriptable policy client for bridge tests. Speaks the NDJSON protocol on
// stdin/stdout, or over TCP with --tcp PORT.
//
//   bridge_client greedy            drive straight at the goal
//   bridge_client echo              always (0, 1)
//   bridge_client die N             exit without answering step N
//   bridge_client die_in ID N       same, only in episode ID
//   bridge_client malformed         answer with garbage
//   bridge_client wrong_step        echo the wrong step number
//   bridge_client overspeed         always (0, 3)
//   bridge_client stall             never answer
//   bridge_client abort             answer with an abort message
//   bridge_client bad_hello         announce an unknown protocol version
//   bridge_client double_reply      answer every observation twice

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

using Json = nlohmann::json;

namespace {

FILE* in_stream = stdin;
FILE* out_stream = stdout;

void send(const Json& j) {
  const std::string s = j.dump() + "\n";
  std::fwrite(s.data(), 1, s.size(), out_stream);
  std::fflush(out_stream);
}

void send_raw(const std::string& s) {
  std::fwrite(s.data(), 1, s.size(), out_stream);
  std::fflush(out_stream);
}

bool read_line(std::string& line) {
  line.clear();
  int c;
  while ((c = std::fgetc(in_stream)) != EOF) {
    if (c == '\n') return true;
    line.push_back(static_cast<char>(c));
  }
  return !line.empty();
}

Json greedy(const Json& obs) {
  const Json& r = obs["robot"];
  const double dx = r["gx"].get<double>() - r["px"].get<double>();
  const double dy = r["gy"].get<double>() - r["py"].get<double>();
  const double dist = std::sqrt(dx * dx + dy * dy);
  const double speed = r["v_pref"].get<double>();
  const double dt = obs["dt"].get<double>();
  double vx = 0.0;
  double vy = 0.0;
  if (dist > 0.0) {
    if (dist < speed * dt) {
      vx = dx / dt;
      vy = dy / dt;
    } else {
      vx = dx * (speed / dist);
      vy = dy * (speed / dist);
    }
  }
  return {{"vx", vx}, {"vy", vy}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: bridge_client MODE [N] [--tcp PORT]\n";
    return 2;
  }
  const std::string mode = argv[1];
  std::vector<std::string> args;
  int port = -1;
  for (int i = 2; i < argc; ++i) {
    if (std::strcmp(argv[i], "--tcp") == 0 && i + 1 < argc) {
      port = std::atoi(argv[++i]);
    } else {
      args.emplace_back(argv[i]);
    }
  }

  if (port >= 0) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    bool connected = false;
    for (int attempt = 0; attempt < 200 && !connected; ++attempt) {
      connected = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
      if (!connected) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!connected) return 3;
    in_stream = fdopen(fd, "r");
    out_stream = fdopen(dup(fd), "w");
  }

  send({{"type", "hello"}, {"protocol", mode == "bad_hello" ? 99 : 1}, {"name", "test-" + mode}});

  std::string line;
  while (read_line(line)) {
    const Json msg = Json::parse(line, nullptr, false);
    if (msg.is_discarded()) return 4;
    const std::string type = msg.value("type", "");
    if (type == "end") return 0;
    if (type != "obs") continue;

    const std::string episode = msg["episode_id"].get<std::string>();
    const std::uint64_t step = msg["step"].get<std::uint64_t>();
    Json act{{"type", "act"}, {"episode_id", episode}, {"step", step}, {"vx", 0.0}, {"vy", 1.0}};

    if (mode == "greedy") {
      const Json v = greedy(msg);
      act["vx"] = v["vx"];
      act["vy"] = v["vy"];
    } else if (mode == "die") {
      if (!args.empty() && step == std::stoull(args[0])) return 0;
    } else if (mode == "die_in") {
      if (args.size() == 2 && episode == args[0] && step == std::stoull(args[1])) return 0;
    } else if (mode == "malformed") {
      send_raw("this is not json\n");
      continue;
    } else if (mode == "wrong_step") {
      act["step"] = step + 1;
    } else if (mode == "overspeed") {
      act["vy"] = 3.0;
    } else if (mode == "stall") {
      std::this_thread::sleep_for(std::chrono::hours(1));
    } else if (mode == "abort") {
      send({{"type", "abort"}, {"reason", "test abort"}});
      continue;
    } else if (mode == "double_reply") {
      send(act);
    }
    send(act);
  }
  return 0;
}
