#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fastdelivery/line_delivery.hpp"
#include "fastdelivery/oracle.hpp"
#include "test_util.hpp"

using namespace fastdelivery;
using fdtest::require_envelope_invariants;

namespace {

ArrivalProfile profile_of(std::vector<std::tuple<AgentId, Rational, Rational>> rows) {
  ArrivalProfile p;
  for (auto& [id, t, v] : rows) p.entries.push_back({id, t, v});
  return p;
}

EdgeDeliveryResult run_edge(const fdtest::EdgeConfig& cfg,
                            TraceLog* log = nullptr) {
  LowerEnvelope env =
      anchor_envelope(build_sender_envelope(cfg.senders), cfg.edge_length);
  RelevantArrangement psi = preprocess_receiver(cfg.receivers);
  return fast_line_delivery(cfg.edge_length, cfg.t, std::move(env), psi, log);
}

void check_result_sanity(const fdtest::EdgeConfig& cfg,
                         const EdgeDeliveryResult& res) {
  require_envelope_invariants(res.final_envelope);
  CHECK(res.arrival ==
        res.final_envelope.back().value_at(Rational(0), cfg.edge_length));
  // Pickups: strictly decreasing x, strictly increasing velocity, and each
  // point lies exactly on the picking agent's own trajectory.
  for (std::size_t i = 0; i < res.pickups.size(); ++i) {
    const Pickup& p = res.pickups[i];
    if (i > 0) {
      CHECK(p.point.x < res.pickups[i - 1].point.x);
      CHECK(p.velocity > res.pickups[i - 1].velocity);
    }
    bool matched = false;
    for (const auto& e : cfg.receivers.entries)
      if (e.agent == p.agent) {
        CHECK(p.point.y == e.arrival + p.point.x / e.velocity);
        matched = true;
      }
    CHECK(matched);
  }
  // Amortized work certificate.
  const std::int64_t budget =
      4 * (static_cast<std::int64_t>(cfg.receivers.size()) +
           res.counters.initial_pieces());
  CHECK(res.counters.trace_steps + res.counters.removals <= budget);
  CHECK(res.counters.removals <= res.counters.pieces_created);
}

}  // namespace

TEST_CASE("sender preprocessing resets the carrier time") {
  // The node already finalized at 14/3 with the fast agent carrying.
  SenderList b = preprocess_sender(profile_of({{2, Rational(2), Rational(5)}}),
                                   2, Rational(5), Rational(14, 3));
  REQUIRE(b.entries.size() == 1);
  CHECK(b.entries[0].agent == 2);
  CHECK(b.entries[0].depart == Rational(14, 3));
}

TEST_CASE("sender preprocessing keeps later faster chasers") {
  SenderList b = preprocess_sender(
      profile_of({{0, Rational(0), Rational(1)}, {1, Rational(4), Rational(5)}}),
      0, Rational(1), Rational(0));
  REQUIRE(b.entries.size() == 2);
  CHECK(b.entries[0].agent == 0);
  CHECK(b.entries[0].depart == Rational(0));
  CHECK(b.entries[1].agent == 1);
  CHECK(b.entries[1].depart == Rational(4));
}

TEST_CASE("sender preprocessing drops a carrier tied by a faster agent") {
  SenderList b = preprocess_sender(
      profile_of({{0, Rational(0), Rational(1)}, {1, Rational(4), Rational(5)}}),
      0, Rational(1), Rational(4));
  REQUIRE(b.entries.size() == 1);
  CHECK(b.entries[0].agent == 1);
  CHECK(b.entries[0].depart == Rational(4));
}

TEST_CASE("sender preprocessing clamps early faster agents to t") {
  SenderList b = preprocess_sender(
      profile_of({{0, Rational(0), Rational(1)}, {1, Rational(4), Rational(5)}}),
      0, Rational(1), Rational(6));
  REQUIRE(b.entries.size() == 1);
  CHECK(b.entries[0].agent == 1);
  CHECK(b.entries[0].depart == Rational(6));
}

TEST_CASE("carrier lookup overload rejects unknown carriers") {
  CHECK_THROWS_AS(preprocess_sender(profile_of({{2, Rational(2), Rational(5)}}),
                                    7, Rational(0)),
                  InvariantViolation);
}

TEST_CASE("receiver pickup beats the slow carrier") {
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(0);
  cfg.senders.entries.push_back({0, Rational(0), Rational(1)});
  cfg.receivers = profile_of({{1, Rational(0), Rational(4)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(4));
  CHECK(res.carrier == 1);
  REQUIRE(res.pickups.size() == 1);
  CHECK(res.pickups[0].point == Point{Rational(8), Rational(2)});
  CHECK(res.pickups[0].giver == 0);
  check_result_sanity(cfg, res);
}

TEST_CASE("slower receivers are ignored") {
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(0);
  cfg.senders.entries.push_back({0, Rational(0), Rational(1)});
  cfg.receivers = profile_of({{1, Rational(0), Rational(1, 2)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(10));
  CHECK(res.carrier == 0);
  CHECK(res.pickups.empty());
  check_result_sanity(cfg, res);
}

TEST_CASE("worked instance edge: pickup against a chasing fleet") {
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(0);
  cfg.senders.entries.push_back({1, Rational(0), Rational(1)});
  cfg.senders.entries.push_back({2, Rational(4), Rational(5)});
  cfg.receivers = profile_of({{2, Rational(2), Rational(5)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(14, 3));
  CHECK(res.carrier == 2);
  REQUIRE(res.pickups.size() == 1);
  CHECK(res.pickups[0].point == Point{Rational(20, 3), Rational(10, 3)});
  REQUIRE(res.final_envelope.size() == 2);
  CHECK(res.final_envelope.piece(0).agent == 1);
  CHECK(res.final_envelope.piece(0).x_lo == Rational(20, 3));
  CHECK(res.final_envelope.piece(1).agent == 2);
  check_result_sanity(cfg, res);
}

TEST_CASE("a faster agent past the sender before t is a hard error") {
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(10);
  cfg.senders.entries.push_back({0, Rational(10), Rational(1)});
  cfg.receivers = profile_of({{1, Rational(0), Rational(4)}});
  CHECK_THROWS_AS(run_edge(cfg), InvariantViolation);
}

TEST_CASE("pickup exactly at the sender node") {
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(10);
  cfg.senders.entries.push_back({0, Rational(10), Rational(1)});
  cfg.receivers = profile_of({{1, Rational(15, 2), Rational(4)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(25, 2));
  CHECK(res.carrier == 1);
  REQUIRE(res.pickups.size() == 1);
  CHECK(res.pickups[0].point == Point{Rational(10), Rational(10)});
  check_result_sanity(cfg, res);
}

TEST_CASE("pickup exactly at the receiver node changes only the carrier") {
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(0);
  cfg.senders.entries.push_back({0, Rational(0), Rational(1)});
  cfg.receivers = profile_of({{1, Rational(10), Rational(4)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(10));
  CHECK(res.carrier == 1);
  REQUIRE(res.pickups.size() == 1);
  CHECK(res.pickups[0].point == Point{Rational(0), Rational(10)});
  REQUIRE(res.final_envelope.size() == 1);
  CHECK(res.final_envelope.back().agent == 0);
  check_result_sanity(cfg, res);
}

TEST_CASE("concurrent crossings: only the fastest pickup survives") {
  // Both receiver lines pass through (5, 5), where they also meet the
  // carrier; the slower one ends there in the arrangement.
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(0);
  cfg.senders.entries.push_back({0, Rational(0), Rational(1)});
  cfg.receivers =
      profile_of({{1, Rational(5, 2), Rational(2)}, {2, Rational(4), Rational(5)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(6));
  CHECK(res.carrier == 2);
  REQUIRE(res.pickups.size() == 1);
  CHECK(res.pickups[0].agent == 2);
  CHECK(res.pickups[0].point == Point{Rational(5), Rational(5)});
  check_result_sanity(cfg, res);
}

TEST_CASE("chaser catching the package exactly at the receiver node") {
  // Departing 97 at speed 16 vs departing 98 at speed 32 over length 32:
  // the catch point is d = 32, the far node itself, both arriving at 99.
  // The arrival ties but the faster agent is the better onward carrier.
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(32);
  cfg.t = Rational(97);
  cfg.senders.entries.push_back({0, Rational(97), Rational(16)});
  cfg.senders.entries.push_back({1, Rational(98), Rational(32)});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(99));
  CHECK(res.carrier == 1);
  CHECK(res.carrier_velocity == Rational(32));
  REQUIRE(res.final_envelope.size() == 1);  // the catcher owns no piece
  CHECK(res.final_envelope.back().agent == 0);
  auto oracle = edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
  CHECK(oracle.arrival == res.arrival);
  CHECK(oracle.final_velocity == res.carrier_velocity);
  check_result_sanity(cfg, res);
}

TEST_CASE("crossing exactly at an envelope breakpoint") {
  // L has pieces of velocity 1 and 5 meeting at (5, 5); the receiver line
  // passes through that very point. The carrier at the breakpoint is the
  // faster, onward piece, so acceptance compares against velocity 5.
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(10);
  cfg.t = Rational(0);
  cfg.senders.entries.push_back({0, Rational(0), Rational(1)});
  cfg.senders.entries.push_back({1, Rational(4), Rational(5)});

  SECTION("slower than the onward piece: ignored") {
    cfg.receivers = profile_of({{7, Rational(10, 3), Rational(3)}});
    auto res = run_edge(cfg);
    CHECK(res.arrival == Rational(6));
    CHECK(res.pickups.empty());
    check_result_sanity(cfg, res);
  }
  SECTION("faster than the onward piece: accepted") {
    cfg.receivers = profile_of({{7, Rational(30, 7), Rational(7)}});
    auto res = run_edge(cfg);
    CHECK(res.arrival == Rational(40, 7));
    REQUIRE(res.pickups.size() == 1);
    CHECK(res.pickups[0].point == Point{Rational(5), Rational(5)});
    auto oracle =
        edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
    CHECK(oracle.arrival == Rational(40, 7));
    check_result_sanity(cfg, res);
  }
}

TEST_CASE("crossing exactly at an arrangement vertex takes the terminator") {
  // The slow receiver's segment ends at (6, 3) on the faster one, and the
  // carrier line passes through that same point: the pickup belongs to
  // the fastest line through it.
  fdtest::EdgeConfig cfg;
  cfg.edge_length = Rational(8);
  cfg.t = Rational(1);
  cfg.senders.entries.push_back({0, Rational(1), Rational(1)});
  cfg.receivers =
      profile_of({{1, Rational(0), Rational(2)}, {2, Rational(1), Rational(3)}});
  auto res = run_edge(cfg);
  CHECK(res.arrival == Rational(5));
  CHECK(res.carrier == 2);
  REQUIRE(res.pickups.size() == 1);
  CHECK(res.pickups[0].agent == 2);
  CHECK(res.pickups[0].point == Point{Rational(6), Rational(3)});
  auto oracle = edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
  CHECK(oracle.arrival == Rational(5));
  check_result_sanity(cfg, res);
}

TEST_CASE("trace agrees with the oracle on random edges") {
  std::mt19937_64 rng(61);
  int pickups_seen = 0;
  for (int iter = 0; iter < 1500; ++iter) {
    fdtest::EdgeConfig cfg = fdtest::random_edge_config(rng, 8);
    auto res = run_edge(cfg);
    auto oracle = edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
    CHECK(res.arrival == oracle.arrival);
    CHECK(res.carrier_velocity == oracle.final_velocity);
    check_result_sanity(cfg, res);
    pickups_seen += static_cast<int>(res.pickups.size());
  }
  CHECK(pickups_seen > 200);  // the generator must exercise real pickups
}

TEST_CASE("trace is FIFO and 1-Lipschitz in the release time") {
  std::mt19937_64 rng(62);
  for (int iter = 0; iter < 800; ++iter) {
    Rational t1(fdtest::rnd(rng, 0, 60));
    Rational delta = fdtest::rnd_rational(rng, 1, 30);
    Rational t2 = t1 + delta;

    ArrivalProfile at_u = fdtest::random_profile(rng, 4);
    SenderEntry carrier{999, Rational(0), Rational(fdtest::rnd(rng, 1, 30))};
    Rational edge_length(fdtest::rnd(rng, 1, 80));

    // Receivers must stay valid even for the later release time.
    fdtest::EdgeConfig shape = fdtest::random_edge_config(rng, 5, &t2);
    ArrivalProfile receivers = shape.receivers;
    for (auto& e : receivers.entries)
      if (e.velocity > carrier.velocity &&
          e.arrival + edge_length / e.velocity < t2)
        e.arrival = t2 - edge_length / e.velocity;
    receivers = make_profile(0, receivers.entries);
    RelevantArrangement psi = preprocess_receiver(receivers);

    auto run_at = [&](const Rational& t) {
      SenderList b = preprocess_sender(at_u, carrier.agent, carrier.velocity, t);
      LowerEnvelope env = anchor_envelope(build_sender_envelope(b), edge_length);
      return fast_line_delivery(edge_length, t, std::move(env), psi);
    };
    Rational a1 = run_at(t1).arrival;
    Rational a2 = run_at(t2).arrival;
    CHECK(a1 <= a2);
    CHECK(a2 <= a1 + delta);
  }
}

TEST_CASE("the running envelope stays fastest and foremost") {
  std::mt19937_64 rng(63);
  for (int iter = 0; iter < 250; ++iter) {
    fdtest::EdgeConfig cfg = fdtest::random_edge_config(rng, 8);
    TraceLog log;
    auto res = run_edge(cfg, &log);
    (void)res;
    REQUIRE(log.visits.size() == log.snapshots.size());
    std::vector<Pickup> accepted;
    for (std::size_t i = 0; i < log.visits.size(); ++i) {
      const auto& visit = log.visits[i];
      const auto& env = log.snapshots[i];
      // Everything right of the visited point is already decided: it must
      // equal the pointwise minimum of the sender lines and the half-lines
      // of pickups accepted so far.
      for (int s = 0; s < 12; ++s) {
        Rational x = visit.q.x + (cfg.edge_length - visit.q.x) *
                                     Rational(fdtest::rnd(rng, 0, 100)) /
                                     Rational(100);
        Rational expect = cfg.senders.entries.front().depart +
                          (cfg.edge_length - x) /
                              cfg.senders.entries.front().velocity;
        for (const auto& e : cfg.senders.entries) {
          Rational y = e.depart + (cfg.edge_length - x) / e.velocity;
          if (y < expect) expect = y;
        }
        for (std::size_t a = 0; a <= i; ++a) {
          if (!log.visits[a].accepted) continue;
          const Point& q = log.visits[a].q;
          if (x > q.x) continue;
          Rational vel;
          for (const auto& e : cfg.receivers.entries)
            if (e.agent == log.visits[a].psi_agent) vel = e.velocity;
          Rational y = q.y + (q.x - x) / vel;
          if (y < expect) expect = y;
        }
        CHECK(env.value_at(x) == expect);
      }
    }
  }
}

TEST_CASE("adversarial chain of accepted pickups stays within budget") {
  // One slow sender; receiver j+1 is timed to sit just above the envelope
  // that receiver j's pickup produces, so every receiver picks up in turn.
  for (int k = 2; k <= 24; ++k) {
    fdtest::EdgeConfig cfg;
    cfg.edge_length = Rational(100000);
    cfg.t = Rational(0);
    cfg.senders.entries.push_back({0, Rational(0), Rational(1)});

    Rational prev_x = cfg.edge_length, prev_y(0), prev_v(1);
    Rational at_zero = cfg.edge_length;  // current envelope value at x = 0
    Rational last_t(-1);
    std::vector<ProfileEntry> rows;
    for (int j = 0; j < k; ++j) {
      Rational v = prev_v * Rational(2);
      Rational t = prev_y - prev_x / v + Rational(5);
      if (!(t > last_t)) t = last_t + Rational(1);
      Rational x = (at_zero - t) / (Rational(1) / prev_v + Rational(1) / v);
      if (!(x > Rational(0) && x < prev_x)) break;
      Rational y = t + x / v;
      rows.push_back({100 + j, t, v});
      last_t = t;
      prev_x = x;
      prev_y = y;
      prev_v = v;
      at_zero = y + x / v;
    }
    cfg.receivers = make_profile(0, rows);
    REQUIRE(cfg.receivers.size() == rows.size());

    auto res = run_edge(cfg);
    CHECK(res.arrival == at_zero);
    CHECK(res.pickups.size() == rows.size());
    check_result_sanity(cfg, res);
    if (rows.size() <= 7) {
      auto oracle =
          edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
      CHECK(res.arrival == oracle.arrival);
    }
  }
}
