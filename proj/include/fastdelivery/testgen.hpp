#pragma once

#include <random>
#include <set>
#include <vector>

#include "fastdelivery/envelope.hpp"
#include "fastdelivery/instance.hpp"
#include "fastdelivery/profiles.hpp"

namespace fastdelivery::testgen {

inline std::int64_t rnd(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(
                  rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Small random rational in [lo, hi] with denominator up to max_den.
inline Rational rnd_rational(std::mt19937_64& rng, std::int64_t lo,
                             std::int64_t hi, std::int64_t max_den = 4) {
  std::int64_t den = rnd(rng, 1, max_den);
  return Rational(rnd(rng, lo * den, hi * den), den);
}

/// Valid arrival profile: distinct ascending velocities, strictly
/// increasing arrival times.
inline ArrivalProfile random_profile(std::mt19937_64& rng, int max_k,
                                     std::int64_t max_velocity = 100,
                                     std::int64_t max_time = 100) {
  int k = static_cast<int>(rnd(rng, 0, max_k));
  std::set<std::int64_t> vels;
  while (static_cast<int>(vels.size()) < k)
    vels.insert(rnd(rng, 1, max_velocity));
  ArrivalProfile profile;
  profile.node = 0;
  Rational t = rnd_rational(rng, 0, max_time / 4);
  AgentId id = 100;
  for (std::int64_t v : vels) {
    profile.entries.push_back({id++, t, Rational(v)});
    t += rnd_rational(rng, 1, 10);
  }
  return profile;
}

/// Random dominance-filtered sender list whose carrier departs exactly at t.
inline SenderList random_sender_list(std::mt19937_64& rng, int max_extra,
                                     const Rational& t,
                                     std::int64_t carrier_velocity_max = 40) {
  std::int64_t v0 = rnd(rng, 1, carrier_velocity_max);
  SenderList list;
  list.entries.push_back({0, t, Rational(v0)});
  int extra = static_cast<int>(rnd(rng, 0, max_extra));
  std::set<std::int64_t> vels;
  while (static_cast<int>(vels.size()) < extra)
    vels.insert(rnd(rng, v0 + 1, carrier_velocity_max + 60));
  Rational depart = t;
  AgentId id = 1;
  for (std::int64_t v : vels) {
    depart += rnd_rational(rng, 1, 10);
    list.entries.push_back({id++, depart, Rational(v)});
  }
  return list;
}

/// One random single-edge configuration for differential tests. Receiver
/// agents faster than the carrier are kept from beating the package to the
/// sender node, which is the precondition of the envelope trace.
struct EdgeConfig {
  Rational edge_length;
  Rational t;
  SenderList senders;
  ArrivalProfile receivers;
};

inline EdgeConfig random_edge_config(std::mt19937_64& rng, int max_agents,
                                     const Rational* t_floor = nullptr) {
  EdgeConfig cfg;
  cfg.edge_length = Rational(rnd(rng, 1, 100));
  cfg.t = Rational(rnd(rng, 0, 100));
  if (rnd(rng, 0, 3) == 0) cfg.t += Rational(1, rnd(rng, 2, 5));
  int sender_extra = static_cast<int>(rnd(rng, 0, (max_agents - 1) / 2));
  cfg.senders = random_sender_list(rng, sender_extra, cfg.t);

  const Rational carrier_velocity = cfg.senders.carrier().velocity;
  const Rational& bound_t = t_floor ? *t_floor : cfg.t;
  int receiver_count = static_cast<int>(
      rnd(rng, 0, max_agents - static_cast<int>(cfg.senders.entries.size())));
  std::set<std::int64_t> vels;
  while (static_cast<int>(vels.size()) < receiver_count)
    vels.insert(rnd(rng, 1, 100));
  std::vector<ProfileEntry> raw;
  AgentId id = 500;
  for (std::int64_t v : vels) {
    Rational velocity(v);
    Rational lower(0);
    if (velocity > carrier_velocity) {
      Rational min_time = bound_t - cfg.edge_length / velocity;
      if (min_time > lower) lower = min_time;
    }
    raw.push_back({id++, lower + rnd_rational(rng, 0, 30), velocity});
  }
  cfg.receivers = make_profile(0, raw);
  return cfg;
}

/// Random connected instance with frequent velocity ties, sized for the
/// exhaustive oracles.
inline Instance random_small_instance(std::mt19937_64& rng, NodeId max_n,
                                      int max_k, std::int64_t max_m = 12,
                                      int min_k = 0) {
  GenerateParams p;
  p.nodes = static_cast<NodeId>(rnd(rng, 2, max_n));
  p.edges = rnd(rng, p.nodes - 1,
                std::min<std::int64_t>(max_m, p.nodes * (p.nodes - 1) / 2));
  p.agents = static_cast<int>(
      rnd(rng, min_k, std::min<std::int64_t>(max_k, p.nodes)));
  p.seed = rng();
  p.max_velocity = 20;
  p.max_length = 30;
  return generate_instance(p);
}

}  // namespace fastdelivery::testgen
