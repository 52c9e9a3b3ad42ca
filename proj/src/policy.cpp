#include "crowdbench/policy.hpp"

#include "crowdbench/errors.hpp"
#include "crowdbench/orca.hpp"

namespace crowdbench {

BuiltinPolicy parse_builtin_policy(std::string_view name) {
  if (name == "goal_greedy") return BuiltinPolicy::goal_greedy;
  if (name == "orca") return BuiltinPolicy::orca;
  if (name == "stationary") return BuiltinPolicy::stationary;
  throw ConfigError("unknown policy: " + std::string(name));
}

std::string_view to_string(BuiltinPolicy policy) {
  switch (policy) {
    case BuiltinPolicy::goal_greedy: return "goal_greedy";
    case BuiltinPolicy::orca: return "orca";
    case BuiltinPolicy::stationary: return "stationary";
  }
  return "unknown";
}

PolicyAction builtin_policy(BuiltinPolicy policy, const AgentState& state,
                            std::span<const AgentState> visible_others, const OrcaParams& params,
                            double dt) {
  switch (policy) {
    case BuiltinPolicy::goal_greedy:
      return {preferred_velocity(state, dt)};
    case BuiltinPolicy::orca:
      return {orca_velocity(state, visible_others, params, dt)};
    case BuiltinPolicy::stationary:
      return {Vec2{}};
  }
  throw ConfigError("unknown policy");
}

PolicyAction builtin_policy(std::string_view name, const AgentState& state,
                            std::span<const AgentState> visible_others, const OrcaParams& params,
                            double dt) {
  return builtin_policy(parse_builtin_policy(name), state, visible_others, params, dt);
}

namespace {

class BuiltinRobotPolicy final : public RobotPolicy {
public:
  BuiltinRobotPolicy(BuiltinPolicy policy, const OrcaParams& params)
      : policy_(policy), params_(params) {}

  std::string name() const override { return std::string(to_string(policy_)); }

  PolicyAction act(const Observation& obs) override {
    return builtin_policy(policy_, obs.robot, obs.humans, params_, obs.dt);
  }

private:
  BuiltinPolicy policy_;
  OrcaParams params_;
};

}  // namespace

std::unique_ptr<RobotPolicy> make_builtin_policy(BuiltinPolicy policy, const OrcaParams& params) {
  validate(params);
  return std::make_unique<BuiltinRobotPolicy>(policy, params);
}

}  // namespace crowdbench
