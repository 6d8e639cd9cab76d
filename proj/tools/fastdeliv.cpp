// Command-line front end: solve instances, verify schedules, run the
// differential oracle checks, generate instances, benchmark scaling and
// emit plot-ready trajectory data.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "fastdelivery/instance.hpp"
#include "fastdelivery/line_delivery.hpp"
#include "fastdelivery/oracle.hpp"
#include "fastdelivery/schedule_json.hpp"
#include "fastdelivery/shortest_paths.hpp"
#include "fastdelivery/solver.hpp"
#include "fastdelivery/testgen.hpp"
#include "fastdelivery/verify.hpp"

namespace fd = fastdelivery;
using fd::Json;
using fd::Rational;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitViolations = 3;
constexpr int kExitCounterexample = 4;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string approx(const Rational& r) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.4f", r.to_double());
  return buffer;
}

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%FT%TZ", std::gmtime(&now));
  return buffer;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

struct SolveArgs {
  std::string instance_path;
  std::string json_path;
  std::string schedule_path;
  bool deterministic = false;
};

int run_solve(const SolveArgs& args) {
  fd::Instance inst = fd::parse_instance(read_file(args.instance_path));
  auto start = std::chrono::steady_clock::now();
  fd::SolveResult result = fd::solve(inst);
  double wall_ms = elapsed_ms(start);

  Json report;
  report["instance"] = {{"n", inst.graph.node_count},
                        {"m", inst.graph.edges.size()},
                        {"k", inst.agents.size()}};
  report["status"] = fd::to_string(result.status);
  if (!args.deterministic) report["generated_at"] = iso_timestamp();

  if (result.status != fd::SolveStatus::ok) {
    std::cerr << fd::to_string(result.status) << "\n";
    if (!args.json_path.empty())
      write_file(args.json_path, report.dump(2) + "\n");
    return kExitInfeasible;
  }

  Json stats;
  stats["queue_ops"] = result.stats.queue_ops();
  stats["trace_steps"] = result.stats.trace_totals.trace_steps;
  stats["envelope_removals"] = result.stats.trace_totals.removals;
  stats["pickups"] = result.stats.trace_totals.pickups;
  if (!args.deterministic) stats["wall_ms"] = wall_ms;
  report["stats"] = std::move(stats);
  report["delivery_time"] = {{"exact", result.delivery_time.to_string()},
                             {"approx", result.delivery_time.to_double()}};
  Json schedule = fd::schedule_to_json(inst, result.schedule);
  report["schedule"] = schedule;

  std::cout << result.delivery_time.to_string() << " (≈"
            << approx(result.delivery_time) << ")\n";
  if (!args.json_path.empty()) write_file(args.json_path, report.dump(2) + "\n");
  if (!args.schedule_path.empty())
    write_file(args.schedule_path, schedule.dump(2) + "\n");
  return kExitOk;
}

int run_verify(const std::string& instance_path,
               const std::string& schedule_path) {
  fd::Instance inst = fd::parse_instance(read_file(instance_path));
  Json j = Json::parse(read_file(schedule_path));
  fd::Schedule schedule = fd::schedule_from_json(inst, j);
  fd::ViolationReport report =
      fd::check_schedule(inst, schedule, schedule.delivery_time);
  if (report.ok()) {
    std::cout << "schedule verified: delivery time "
              << schedule.delivery_time.to_string() << "\n";
    return kExitOk;
  }
  for (const auto& v : report.violations)
    std::cout << fd::to_string(v.kind) << " at t=" << v.time.to_string()
              << ": " << v.detail << "\n";
  std::cerr << report.violations.size() << " violation(s)\n";
  return kExitViolations;
}

Json edge_config_to_json(const fd::testgen::EdgeConfig& cfg) {
  Json j;
  j["edge_length"] = cfg.edge_length.to_string();
  j["t"] = cfg.t.to_string();
  j["senders"] = Json::array();
  for (const auto& e : cfg.senders.entries)
    j["senders"].push_back({{"agent", e.agent},
                            {"depart", e.depart.to_string()},
                            {"velocity", e.velocity.to_string()}});
  j["receivers"] = Json::array();
  for (const auto& e : cfg.receivers.entries)
    j["receivers"].push_back({{"agent", e.agent},
                              {"arrival", e.arrival.to_string()},
                              {"velocity", e.velocity.to_string()}});
  return j;
}

fd::testgen::EdgeConfig edge_config_from_json(const Json& j) {
  fd::testgen::EdgeConfig cfg;
  cfg.edge_length = fd::rational_from_json(j.at("edge_length"));
  cfg.t = fd::rational_from_json(j.at("t"));
  for (const Json& e : j.at("senders"))
    cfg.senders.entries.push_back({e.at("agent").get<fd::AgentId>(),
                                   fd::rational_from_json(e.at("depart")),
                                   fd::rational_from_json(e.at("velocity"))});
  for (const Json& e : j.at("receivers"))
    cfg.receivers.entries.push_back({e.at("agent").get<fd::AgentId>(),
                                     fd::rational_from_json(e.at("arrival")),
                                     fd::rational_from_json(e.at("velocity"))});
  return cfg;
}

/// Engine vs. oracle on one edge configuration. True on exact agreement.
bool edge_case_agrees(const fd::testgen::EdgeConfig& cfg, std::ostream& log) {
  fd::LowerEnvelope env = fd::anchor_envelope(
      fd::build_sender_envelope(cfg.senders), cfg.edge_length);
  fd::RelevantArrangement psi = fd::preprocess_receiver(cfg.receivers);
  fd::EdgeDeliveryResult res =
      fd::fast_line_delivery(cfg.edge_length, cfg.t, std::move(env), psi);
  fd::EdgeOracleResult oracle =
      fd::edge_oracle(cfg.senders, cfg.receivers, cfg.edge_length, cfg.t);
  if (res.arrival == oracle.arrival &&
      res.carrier_velocity == oracle.final_velocity)
    return true;
  log << "engine arrival " << res.arrival.to_string() << " (carrier velocity "
      << res.carrier_velocity.to_string() << "), oracle arrival "
      << oracle.arrival.to_string() << " (velocity "
      << oracle.final_velocity.to_string() << ")\n";
  return false;
}

/// Solver vs. path oracle plus the schedule certificate.
bool full_case_agrees(const fd::Instance& inst, std::ostream& log) {
  fd::SolveResult res = fd::solve(inst);
  auto oracle = fd::path_oracle(inst);
  if (!oracle) {
    if (res.status == fd::SolveStatus::ok) {
      log << "solver found " << res.delivery_time.to_string()
          << " on an instance the oracle deems infeasible\n";
      return false;
    }
    return true;
  }
  if (res.status != fd::SolveStatus::ok) {
    log << "solver infeasible, oracle found " << oracle->arrival.to_string()
        << "\n";
    return false;
  }
  if (res.delivery_time != oracle->arrival) {
    log << "solver " << res.delivery_time.to_string() << ", oracle "
        << oracle->arrival.to_string() << "\n";
    return false;
  }
  fd::ViolationReport report =
      fd::check_schedule(inst, res.schedule, res.delivery_time);
  if (!report.ok()) {
    for (const auto& v : report.violations)
      log << fd::to_string(v.kind) << ": " << v.detail << "\n";
    return false;
  }
  return true;
}

struct OracleCheckArgs {
  bool edge_mode = false;
  bool full_mode = false;
  int cases = 200;
  std::uint64_t seed = 1;
  int max_k = 6;
  int max_n = 6;
  std::string dump_path;
  std::string replay_path;
};

int run_oracle_check(const OracleCheckArgs& args) {
  if (!args.replay_path.empty()) {
    std::string text = read_file(args.replay_path);
    std::size_t first = text.find_first_not_of(" \t\r\n");
    bool ok;
    if (first != std::string::npos && text[first] == '{')
      ok = edge_case_agrees(edge_config_from_json(Json::parse(text)), std::cerr);
    else
      ok = full_case_agrees(fd::parse_instance(text), std::cerr);
    std::cout << (ok ? "replay: agreement\n" : "replay: MISMATCH\n");
    return ok ? kExitOk : kExitCounterexample;
  }

  std::mt19937_64 rng(args.seed);
  for (int i = 0; i < args.cases; ++i) {
    std::ostringstream log;
    if (args.edge_mode) {
      fd::testgen::EdgeConfig cfg =
          fd::testgen::random_edge_config(rng, std::min(args.max_k, 12));
      if (!edge_case_agrees(cfg, log)) {
        std::string path =
            args.dump_path.empty() ? "counterexample.json" : args.dump_path;
        write_file(path, edge_config_to_json(cfg).dump(2) + "\n");
        std::cerr << "case " << i << " disagrees:\n"
                  << log.str() << "replayable config written to " << path
                  << "\n";
        return kExitCounterexample;
      }
    } else {
      fd::Instance inst = fd::testgen::random_small_instance(
          rng, static_cast<fd::NodeId>(std::min(args.max_n, 8)), args.max_k);
      if (!full_case_agrees(inst, log)) {
        std::string path =
            args.dump_path.empty() ? "counterexample.fd" : args.dump_path;
        write_file(path, fd::serialize_instance(inst));
        std::cerr << "case " << i << " disagrees:\n"
                  << log.str() << "replayable instance written to " << path
                  << "\n";
        return kExitCounterexample;
      }
    }
  }
  std::cout << args.cases << " cases checked: all agree\n";
  return kExitOk;
}

struct BenchRow {
  std::int64_t size;
  fd::NodeId n;
  std::int64_t m;
  int k;
};

int run_bench(const std::string& series, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  if (series == "edges") {
    rows = {{10000, 2000, 10000, 64},
            {20000, 4000, 20000, 64},
            {40000, 8000, 40000, 64}};
  } else if (series == "agents") {
    rows = {{16, 3000, 12000, 16},
            {32, 3000, 12000, 32},
            {64, 3000, 12000, 64}};
  } else {
    std::cerr << "unknown series '" << series << "'\n";
    return kExitUsage;
  }
  std::cout << "size\tn\tm\tk\twall_ms\ttrace_steps\tqueue_ops\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BenchRow& row = rows[i];
    fd::GenerateParams p;
    p.nodes = row.n;
    p.edges = row.m;
    p.agents = row.k;
    p.seed = seed + i;
    fd::Instance inst = fd::generate_instance(p);
    fd::SolveOptions opts;
    opts.build_schedule = false;
    auto start = std::chrono::steady_clock::now();
    fd::SolveResult result = fd::solve(inst, opts);
    double wall_ms = elapsed_ms(start);
    if (result.status != fd::SolveStatus::ok) {
      std::cerr << "generated instance unexpectedly infeasible\n";
      return kExitInfeasible;
    }
    std::printf("%lld\t%d\t%lld\t%d\t%.1f\t%lld\t%lld\n",
                static_cast<long long>(row.size), row.n,
                static_cast<long long>(row.m), row.k, wall_ms,
                static_cast<long long>(result.stats.trace_totals.trace_steps),
                static_cast<long long>(result.stats.queue_ops()));
    std::fflush(stdout);
  }
  return kExitOk;
}

int run_plot_data(const std::string& instance_path) {
  fd::Instance inst = fd::parse_instance(read_file(instance_path));
  fd::SolveResult result = fd::solve(inst);
  if (result.status != fd::SolveStatus::ok) {
    std::cerr << fd::to_string(result.status) << "\n";
    return kExitInfeasible;
  }
  // 1-D plotting coordinate: graph distance to the target node.
  fd::ShortestPathTree to_target =
      fd::shortest_path_tree(inst.graph, inst.target);
  auto position = [&](const fd::Location& loc) {
    if (loc.kind == fd::Location::Kind::node)
      return to_target.dist[static_cast<std::size_t>(loc.node)]->to_double();
    const fd::Edge& e = inst.graph.edges[static_cast<std::size_t>(loc.edge)];
    double through_a =
        to_target.dist[static_cast<std::size_t>(e.a)]->to_double() +
        loc.offset.to_double();
    double through_b =
        to_target.dist[static_cast<std::size_t>(e.b)]->to_double() +
        (e.length - loc.offset).to_double();
    return std::min(through_a, through_b);
  };
  std::cout << "agent\ttime\tposition\n";
  for (const fd::Leg& leg : result.schedule.legs) {
    std::printf("%lld\t%.6f\t%.6f\n", static_cast<long long>(leg.agent),
                leg.depart.to_double(), position(leg.from));
    std::printf("%lld\t%.6f\t%.6f\n", static_cast<long long>(leg.agent),
                leg.arrive.to_double(), position(leg.to));
  }
  for (const fd::Leg& leg : result.schedule.legs) {
    if (!leg.carrying) continue;
    std::printf("package\t%.6f\t%.6f\n", leg.depart.to_double(),
                position(leg.from));
    std::printf("package\t%.6f\t%.6f\n", leg.arrive.to_double(),
                position(leg.to));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact minimum-time package delivery with cooperating mobile agents"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  solve_cmd
      ->add_option("instance", solve_args.instance_path,
                   "instance file ('-' for stdin)")
      ->required();
  solve_cmd->add_option("--json", solve_args.json_path,
                        "write a JSON run report");
  solve_cmd->add_option("--schedule", solve_args.schedule_path,
                        "write the schedule as JSON");
  solve_cmd->add_flag("--deterministic", solve_args.deterministic,
                      "omit timestamps and timings from JSON output");

  std::string verify_instance, verify_schedule;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check a schedule against an instance");
  verify_cmd->add_option("instance", verify_instance, "instance file")
      ->required();
  verify_cmd->add_option("schedule", verify_schedule, "schedule JSON file")
      ->required();

  OracleCheckArgs oc;
  CLI::App* oc_cmd = app.add_subcommand(
      "oracle-check",
      "random differential tests against the brute-force oracles");
  oc_cmd->add_flag("--edge", oc.edge_mode, "single-edge cases (default)");
  oc_cmd->add_flag("--full", oc.full_mode, "whole-instance cases");
  oc_cmd->add_option("--cases", oc.cases, "number of random cases");
  oc_cmd->add_option("--seed", oc.seed, "random seed");
  oc_cmd->add_option("--max-k", oc.max_k, "maximum number of agents");
  oc_cmd->add_option("--max-n", oc.max_n, "maximum number of nodes (full mode)");
  oc_cmd->add_option("--dump", oc.dump_path, "counterexample output path");
  oc_cmd->add_option("--replay", oc.replay_path,
                     "re-run a dumped counterexample file");

  fd::GenerateParams gen;
  std::int64_t gen_nodes = 10, gen_edges = 15, gen_agents = 3;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random instance");
  gen_cmd->add_option("--nodes", gen_nodes, "node count")->required();
  gen_cmd->add_option("--edges", gen_edges, "edge count")->required();
  gen_cmd->add_option("--agents", gen_agents, "agent count")->required();
  gen_cmd->add_option("--seed", gen.seed, "random seed");

  std::string bench_series;
  std::uint64_t bench_seed = 1;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "scaling series for the complexity checks");
  bench_cmd->add_option("--series", bench_series, "edges | agents")->required();
  bench_cmd->add_option("--seed", bench_seed, "random seed");

  std::string plot_instance;
  CLI::App* plot_cmd = app.add_subcommand(
      "plot-data", "solve and emit tab-separated trajectory polylines");
  plot_cmd->add_option("instance", plot_instance, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (verify_cmd->parsed())
      return run_verify(verify_instance, verify_schedule);
    if (oc_cmd->parsed()) {
      if (oc.edge_mode && oc.full_mode) {
        std::cerr << "choose one of --edge / --full\n";
        return kExitUsage;
      }
      if (!oc.full_mode) oc.edge_mode = true;
      return run_oracle_check(oc);
    }
    if (gen_cmd->parsed()) {
      gen.nodes = static_cast<fd::NodeId>(gen_nodes);
      gen.edges = gen_edges;
      gen.agents = static_cast<int>(gen_agents);
      std::cout << fd::serialize_instance(fd::generate_instance(gen));
      return kExitOk;
    }
    if (bench_cmd->parsed()) return run_bench(bench_series, bench_seed);
    if (plot_cmd->parsed()) return run_plot_data(plot_instance);
  } catch (const fd::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
