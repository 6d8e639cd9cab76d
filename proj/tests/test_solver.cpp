#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "fastdelivery/oracle.hpp"
#include "fastdelivery/solver.hpp"
#include "fastdelivery/verify.hpp"
#include "test_util.hpp"

using namespace fastdelivery;

namespace {
Instance random_small_instance(std::mt19937_64& rng, NodeId max_n, int max_k) {
  GenerateParams p;
  p.nodes = static_cast<NodeId>(fdtest::rnd(rng, 2, max_n));
  p.edges = fdtest::rnd(
      rng, p.nodes - 1,
      std::min<std::int64_t>(12, p.nodes * (p.nodes - 1) / 2));
  p.agents = static_cast<int>(
      fdtest::rnd(rng, 0, std::min<std::int64_t>(max_k, p.nodes)));
  p.seed = rng();
  p.max_velocity = 20;  // make dominance and ties frequent
  p.max_length = 30;
  return generate_instance(p);
}

void require_schedule_valid(const Instance& inst, const SolveResult& r) {
  ViolationReport report = check_schedule(inst, r.schedule, r.delivery_time);
  for (const auto& v : report.violations)
    UNSCOPED_INFO(to_string(v.kind) << ": " << v.detail);
  REQUIRE(report.ok());
  // Carrier velocities strictly increase along the package trajectory.
  std::map<AgentId, Rational> velocity;
  for (const Agent& a : inst.agents) velocity[a.id] = a.velocity;
  std::vector<const Leg*> carrying;
  for (const Leg& leg : r.schedule.legs)
    if (leg.carrying) carrying.push_back(&leg);
  std::stable_sort(carrying.begin(), carrying.end(),
                   [](const Leg* a, const Leg* b) {
                     return a->depart < b->depart;
                   });
  for (std::size_t i = 0; i + 1 < carrying.size(); ++i)
    if (carrying[i]->agent != carrying[i + 1]->agent)
      CHECK(velocity.at(carrying[i]->agent) <
            velocity.at(carrying[i + 1]->agent));
}
}  // namespace

TEST_CASE("worked instance end to end") {
  Instance inst = fdtest::e5_instance();
  SolveResult r = solve(inst);
  REQUIRE(r.status == SolveStatus::ok);
  CHECK(r.delivery_time == Rational(20, 3));

  // One handover: agent 1 passes to agent 2 at distance 20/3 from u on the
  // first edge (offset 10/3 from s, the edge's first endpoint) at 10/3.
  REQUIRE(r.schedule.handovers.size() == 1);
  const Handover& h = r.schedule.handovers[0];
  CHECK(h.time == Rational(10, 3));
  CHECK(h.location.kind == Location::Kind::edge_point);
  CHECK(h.location.edge == 0);
  CHECK(h.location.offset == Rational(10, 3));
  REQUIRE(h.giver);
  CHECK(*h.giver == 1);
  CHECK(h.taker == 2);

  // Agent 2's four legs: approach, run-in, carry back, carry home.
  std::vector<Leg> fast;
  for (const Leg& leg : r.schedule.legs)
    if (leg.agent == 2) fast.push_back(leg);
  REQUIRE(fast.size() == 4);
  CHECK(fast[0].depart == Rational(0));
  CHECK(fast[0].arrive == Rational(2));
  CHECK(!fast[0].carrying);
  CHECK(fast[1].arrive == Rational(10, 3));
  CHECK(!fast[1].carrying);
  CHECK(fast[2].depart == Rational(10, 3));
  CHECK(fast[2].arrive == Rational(14, 3));
  CHECK(fast[2].carrying);
  CHECK(fast[3].depart == Rational(14, 3));
  CHECK(fast[3].arrive == Rational(20, 3));
  CHECK(fast[3].carrying);
  CHECK(same_point(inst.graph, fast[3].to, Location::at_node(2)));

  require_schedule_valid(inst, r);
  CHECK(r.stats.pop_order_violations == 0);
  CHECK(r.stats.counter_bound_violations == 0);
}

TEST_CASE("lone carrier crosses a single edge") {
  Instance inst = parse_instance(
      "nodes 2\nedge 0 1 10\nagent 3 0 2\npackage 0 1\n");
  SolveResult r = solve(inst);
  REQUIRE(r.status == SolveStatus::ok);
  CHECK(r.delivery_time == Rational(5));
  CHECK(r.schedule.handovers.empty());
  require_schedule_valid(inst, r);
}

TEST_CASE("no agents means no delivery") {
  Instance inst = parse_instance("nodes 2\nedge 0 1 10\npackage 0 1\n");
  CHECK(solve(inst).status == SolveStatus::infeasible_no_agent_at_source);
}

TEST_CASE("agents that cannot reach the source are useless") {
  Instance inst = parse_instance(
      "nodes 3\nedge 0 1 5\nagent 1 2 4\npackage 0 1\n");
  CHECK(solve(inst).status == SolveStatus::infeasible_no_agent_at_source);
}

TEST_CASE("unreachable target is reported as such") {
  Instance inst = parse_instance(
      "nodes 3\nedge 0 1 5\nagent 1 0 1\npackage 0 2\n");
  CHECK(solve(inst).status == SolveStatus::infeasible_target_unreachable);
}

TEST_CASE("source equal to target is a zero-time delivery") {
  Instance inst = parse_instance("nodes 2\nedge 0 1 3\npackage 1 1\n");
  SolveResult r = solve(inst);
  REQUIRE(r.status == SolveStatus::ok);
  CHECK(r.delivery_time == Rational(0));
  CHECK(r.schedule.legs.empty());
  CHECK(check_schedule(inst, r.schedule, r.delivery_time).ok());
}

TEST_CASE("collocated fleets collapse to their fastest member") {
  Instance inst = parse_instance(
      "nodes 2\nedge 0 1 12\nagent 1 0 1\nagent 2 0 3\nagent 3 0 2\npackage 0 1\n");
  SolveResult r = solve(inst);
  REQUIRE(r.status == SolveStatus::ok);
  CHECK(r.delivery_time == Rational(4));
  for (const Leg& leg : r.schedule.legs) CHECK(leg.agent == 2);
}

TEST_CASE("early exit changes nothing but the work done") {
  std::mt19937_64 rng(71);
  for (int iter = 0; iter < 300; ++iter) {
    Instance inst = random_small_instance(rng, 8, 5);
    SolveOptions all;
    all.early_exit = false;
    SolveResult fast = solve(inst);
    SolveResult full = solve(inst, all);
    REQUIRE(fast.status == full.status);
    if (fast.status == SolveStatus::ok)
      CHECK(fast.delivery_time == full.delivery_time);
    CHECK(full.stats.pop_order_violations == 0);
  }
}

TEST_CASE("solver matches the path oracle on random instances") {
  std::mt19937_64 rng(72);
  int solved = 0;
  for (int iter = 0; iter < 400; ++iter) {
    Instance inst = random_small_instance(rng, 7, 5);
    SolveResult r = solve(inst);
    auto expect = path_oracle(inst);
    if (!expect) {
      CHECK(r.status != SolveStatus::ok);
      continue;
    }
    REQUIRE(r.status == SolveStatus::ok);
    CHECK(r.delivery_time == expect->arrival);
    require_schedule_valid(inst, r);
    CHECK(r.stats.pop_order_violations == 0);
    CHECK(r.stats.counter_bound_violations == 0);
    ++solved;
  }
  CHECK(solved > 300);
}

TEST_CASE("reconstruction scales past oracle territory") {
  std::mt19937_64 rng(74);
  for (int iter = 0; iter < 10; ++iter) {
    GenerateParams p;
    p.nodes = 60;
    p.edges = 150;
    p.agents = 20;
    p.seed = rng();
    Instance inst = generate_instance(p);
    SolveResult r = solve(inst);
    REQUIRE(r.status == SolveStatus::ok);
    require_schedule_valid(inst, r);
    CHECK(r.stats.counter_bound_violations == 0);
  }
}

TEST_CASE("finalized carriers reached their nodes in time") {
  std::mt19937_64 rng(73);
  for (int iter = 0; iter < 200; ++iter) {
    Instance raw = random_small_instance(rng, 8, 6);
    Instance inst = collapse_collocated_agents(raw);
    SolveOptions opts;
    opts.early_exit = false;
    opts.build_schedule = false;
    SolveResult r = solve(inst, opts);
    AgentPaths paths = compute_agent_paths(inst);
    std::map<AgentId, std::size_t> index;
    for (std::size_t i = 0; i < inst.agents.size(); ++i)
      index[inst.agents[i].id] = i;
    for (NodeId v = 0; v < inst.graph.node_count; ++v) {
      const NodeLabel& label = r.labels.empty()
                                   ? NodeLabel{}
                                   : r.labels[static_cast<std::size_t>(v)];
      if (r.labels.empty() || !label.final) continue;
      const auto& dist =
          paths.trees[index.at(label.carrier)].dist[static_cast<std::size_t>(v)];
      REQUIRE(dist.has_value());
      CHECK(*dist / inst.agents[index.at(label.carrier)].velocity <=
            *label.dist);
    }
  }
}
