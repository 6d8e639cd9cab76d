#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "fastdelivery/oracle.hpp"
#include "fastdelivery/solver.hpp"
#include "fastdelivery/verify.hpp"
#include "test_util.hpp"

using namespace fastdelivery;

namespace {
SenderList senders_of(std::vector<std::tuple<AgentId, Rational, Rational>> rows) {
  SenderList list;
  for (auto& [id, t, v] : rows) list.entries.push_back({id, t, v});
  return list;
}
ArrivalProfile receivers_of(
    std::vector<std::tuple<AgentId, Rational, Rational>> rows) {
  ArrivalProfile p;
  for (auto& [id, t, v] : rows) p.entries.push_back({id, t, v});
  return p;
}
}  // namespace

TEST_CASE("single fast receiver shortens the trip") {
  auto r = edge_oracle(senders_of({{0, Rational(0), Rational(1)}}),
                       receivers_of({{1, Rational(0), Rational(4)}}),
                       Rational(10), Rational(0));
  CHECK(r.arrival == Rational(4));
  CHECK(r.final_carrier == 1);
  REQUIRE(r.best.steps.size() == 2);
  CHECK(r.best.steps[1].meet_x == Rational(8));
  CHECK(r.best.steps[1].meet_time == Rational(2));
}

TEST_CASE("lone sender walks the edge") {
  auto r = edge_oracle(senders_of({{0, Rational(0), Rational(1)}}),
                       ArrivalProfile{}, Rational(10), Rational(0));
  CHECK(r.arrival == Rational(10));
  CHECK(r.best.steps.size() == 1);
}

TEST_CASE("sender-side chase hands over mid-edge") {
  auto r = edge_oracle(senders_of({{0, Rational(0), Rational(1)},
                                   {1, Rational(3), Rational(3)}}),
                       ArrivalProfile{}, Rational(12), Rational(0));
  CHECK(r.arrival == Rational(7));
  REQUIRE(r.best.steps.size() == 2);
  CHECK(r.best.steps[1].meet_x == Rational(15, 2));
}

TEST_CASE("receiver waiting at the sender node carries from there") {
  // The fast receiver reaches u long before the package exists there.
  auto r = edge_oracle(senders_of({{0, Rational(20), Rational(1)}}),
                       receivers_of({{1, Rational(0), Rational(4)}}),
                       Rational(10), Rational(20));
  CHECK(r.arrival == Rational(20) + Rational(10, 4));
  REQUIRE(r.best.steps.size() == 2);
  CHECK(r.best.steps[1].meet_x == Rational(10));
  CHECK(r.best.steps[1].meet_time == Rational(20));
}

TEST_CASE("agent cap is enforced") {
  SenderList senders;
  ArrivalProfile receivers;
  for (int i = 0; i < 7; ++i)
    senders.entries.push_back({i, Rational(i), Rational(i + 1)});
  for (int i = 0; i < 6; ++i)
    receivers.entries.push_back({100 + i, Rational(i), Rational(i + 1)});
  CHECK_THROWS_AS(edge_oracle(senders, receivers, Rational(1), Rational(0)),
                  std::invalid_argument);
}

TEST_CASE("input order does not matter") {
  std::mt19937_64 rng(51);
  for (int iter = 0; iter < 300; ++iter) {
    fdtest::EdgeConfig cfg = fdtest::random_edge_config(rng, 7);
    auto base = edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
    SenderList shuffled_senders = cfg.senders;
    ArrivalProfile shuffled_receivers = cfg.receivers;
    if (shuffled_senders.entries.size() > 1)
      std::shuffle(shuffled_senders.entries.begin() + 1,
                   shuffled_senders.entries.end(), rng);
    std::shuffle(shuffled_receivers.entries.begin(),
                 shuffled_receivers.entries.end(), rng);
    auto r = edge_oracle(shuffled_senders, shuffled_receivers, cfg.edge_length,
                         cfg.t);
    CHECK(r.arrival == base.arrival);
    CHECK(r.final_velocity == base.final_velocity);
  }
}

TEST_CASE("oracle is FIFO and 1-Lipschitz in the release time") {
  std::mt19937_64 rng(52);
  for (int iter = 0; iter < 500; ++iter) {
    fdtest::EdgeConfig cfg = fdtest::random_edge_config(rng, 6);
    Rational delta = fdtest::rnd_rational(rng, 1, 40);
    Rational t2 = cfg.t + delta;
    // Receivers must stay valid for the later release as well; shift any
    // fast receiver that would now beat the package to the sender.
    for (auto& e : cfg.receivers.entries) {
      if (e.velocity > cfg.senders.carrier().velocity &&
          e.arrival + cfg.edge_length / e.velocity < t2)
        e.arrival = t2 - cfg.edge_length / e.velocity;
    }
    cfg.receivers = make_profile(0, cfg.receivers.entries);

    // The late scenario reuses the same fleet: departures below t2 wait.
    std::vector<SenderEntry> pool = cfg.senders.entries;
    for (auto& e : pool)
      if (e.depart < t2) e.depart = t2;
    std::sort(pool.begin(), pool.end(),
              [](const SenderEntry& a, const SenderEntry& b) {
                if (a.depart != b.depart) return a.depart < b.depart;
                return a.velocity > b.velocity;
              });
    SenderList late_senders;
    const Rational* fastest = nullptr;
    for (auto& e : pool) {
      if (fastest && !(e.velocity > *fastest)) continue;
      late_senders.entries.push_back(e);
      fastest = &late_senders.entries.back().velocity;
    }

    auto early = edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
    auto late = edge_oracle(late_senders, cfg.receivers, cfg.edge_length, t2);
    CHECK(early.arrival <= late.arrival);
    CHECK(late.arrival <= early.arrival + delta);
  }
}

TEST_CASE("path oracle solves the worked instance") {
  auto r = path_oracle(fdtest::e5_instance());
  REQUIRE(r);
  CHECK(r->arrival == Rational(20, 3));
}

TEST_CASE("path oracle degenerate cases") {
  Instance same = fdtest::e5_instance();
  same.target = same.source;
  auto r = path_oracle(same);
  REQUIRE(r);
  CHECK(r->arrival == Rational(0));

  Instance cut = parse_instance(
      "nodes 3\nedge 0 1 5\nagent 1 0 1\npackage 0 2\n");
  CHECK(!path_oracle(cut));

  Instance empty = parse_instance("nodes 2\nedge 0 1 5\npackage 0 1\n");
  CHECK(!path_oracle(empty));

  Instance big = generate_instance({10, 12, 2, 7});
  CHECK_THROWS_AS(path_oracle(big), std::invalid_argument);
}

TEST_CASE("path oracle equals edge oracle on two-node instances") {
  std::mt19937_64 rng(53);
  for (int iter = 0; iter < 400; ++iter) {
    GenerateParams p;
    p.nodes = 2;
    p.edges = 1;
    p.agents = static_cast<int>(fdtest::rnd(rng, 1, 2));
    p.seed = rng();
    Instance inst = generate_instance(p);
    auto full = path_oracle(inst);
    REQUIRE(full);

    auto profiles = arrival_profiles(collapse_collocated_agents(inst));
    const auto& at_s = profiles[static_cast<std::size_t>(inst.source)];
    REQUIRE(!at_s.empty());
    SenderList senders;
    for (const auto& e : at_s.entries)
      senders.entries.push_back({e.agent, e.arrival, e.velocity});
    auto edge = edge_oracle(senders,
                            profiles[static_cast<std::size_t>(inst.target)],
                            inst.graph.edges[0].length,
                            at_s.entries.front().arrival);
    CHECK(edge.arrival == full->arrival);
  }
}

TEST_CASE("checker accepts the solved worked instance") {
  SolveResult r = solve(fdtest::e5_instance());
  REQUIRE(r.status == SolveStatus::ok);
  ViolationReport report =
      check_schedule(fdtest::e5_instance(), r.schedule, r.delivery_time);
  for (const auto& v : report.violations)
    UNSCOPED_INFO(to_string(v.kind) << ": " << v.detail);
  CHECK(report.ok());
}

TEST_CASE("fault injection trips the checker") {
  Instance inst = fdtest::e5_instance();
  SolveResult r = solve(inst);
  REQUIRE(r.status == SolveStatus::ok);
  auto has = [](const ViolationReport& rep, ViolationKind kind) {
    for (const auto& v : rep.violations)
      if (v.kind == kind) return true;
    return false;
  };

  SECTION("carrying leg above the agent's speed") {
    Schedule s = r.schedule;
    for (Leg& leg : s.legs)
      if (leg.carrying) {
        leg.arrive = leg.depart + (leg.arrive - leg.depart) / Rational(2);
        break;
      }
    CHECK(has(check_schedule(inst, s, r.delivery_time),
              ViolationKind::speed_exceeded));
  }
  SECTION("teleporting agent") {
    Schedule s = r.schedule;
    REQUIRE(s.legs.size() >= 2);
    s.legs[1].from = Location::at_node(0);
    s.legs[1].to = Location::at_node(1);
    CHECK(!check_schedule(inst, s, r.delivery_time).ok());
  }
  SECTION("handover location off by a hair") {
    Schedule s = r.schedule;
    REQUIRE(!s.handovers.empty());
    s.handovers[0].location.offset += Rational(1, 1000);
    CHECK(has(check_schedule(inst, s, r.delivery_time),
              ViolationKind::handover_mismatch));
  }
  SECTION("missing handover record") {
    Schedule s = r.schedule;
    s.handovers.clear();
    CHECK(has(check_schedule(inst, s, r.delivery_time),
              ViolationKind::handover_mismatch));
  }
  SECTION("claimed time is wrong") {
    CHECK(has(check_schedule(inst, r.schedule, r.delivery_time + Rational(1)),
              ViolationKind::wrong_final_time));
  }
  SECTION("package starting off the source") {
    Schedule s = r.schedule;
    for (Leg& leg : s.legs)
      if (leg.carrying && leg.from == Location::at_node(inst.source)) {
        leg.from = Location::at_node(1);
        leg.to = Location::at_node(0);
        break;
      }
    CHECK(!check_schedule(inst, s, r.delivery_time).ok());
  }
  SECTION("agent starting off its base") {
    Schedule s = r.schedule;
    for (Leg& leg : s.legs)
      if (leg.agent == 2 && !leg.carrying) {
        leg.from = Location::at_node(1);
        break;
      }
    CHECK(has(check_schedule(inst, s, r.delivery_time),
              ViolationKind::wrong_origin));
  }
}
