// zkmcp command line: ASP service, agent, setup, benchmarks, fixtures.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "zkmcp/bench.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/transport.hpp"

namespace {

using namespace zkmcp;

std::filesystem::path data_root() {
  const char* env = std::getenv("ZKMCP_DATA_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("zkmcp-data");
}

Backend backend_arg(const std::string& s) {
  if (s == "real") return Backend::kGroth16;
  if (s == "oracle") return Backend::kInsecureOracle;
  return parse_backend(s);
}

void log_line(const std::string& msg) { std::cerr << "zkmcp: " << msg << std::endl; }

// Blocks until SIGINT or SIGTERM.
void wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
}

std::vector<size_t> default_sweep(size_t max_n) {
  std::vector<size_t> out;
  for (size_t n = 1; n <= max_n; n *= 2) out.push_back(n);
  return out;
}

std::filesystem::path sibling(const std::filesystem::path& p, ReportFormat f) {
  auto q = p;
  q.replace_extension(f == ReportFormat::kCsv ? ".json" : ".csv");
  return q;
}

int asp_serve(const std::string& listen, const std::filesystem::path& crs_dir,
              const std::filesystem::path& data, bool insecure, size_t workers) {
  auto crs = std::make_shared<const CrsBundle>(load_crs(crs_dir, false));
  AspOptions ao;
  ao.data_dir = data;
  ao.allow_insecure = insecure;
  Asp asp(crs, ao);
  ServerOptions so;
  so.listen = Endpoint::parse(listen);
  so.max_workers = workers;
  so.log = log_line;
  AspServer server(asp, so);
  server.start();
  std::cout << "listening on " << so.listen.host << ":" << server.port() << " circuit "
            << crs->circuit_id() << " data " << data.string() << std::endl;
  wait_for_signal();
  server.stop();
  return 0;
}

// Replays a message file as one session: one raw envelope per line, an
// optional "< " prefix marks a received message.
int agent_run(const std::string& id, const std::string& peer, const std::string& asp,
              const std::filesystem::path& crs_dir, const std::filesystem::path& messages,
              bool pad) {
  auto crs = std::make_shared<const CrsBundle>(load_crs(crs_dir, true));
  std::ifstream in(messages);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + messages.string());
  AgentOptions ao;
  ao.agent_id = id;
  ao.pad_with_filler = pad;
  Agent agent(crs, std::make_shared<TcpAspLink>(Endpoint::parse(asp)), ao);
  const std::string s_id = agent.start_session(peer);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    Direction dir = Direction::kSent;
    if (line.starts_with("< ")) {
      dir = Direction::kReceived;
      line.erase(0, 2);
    } else if (line.starts_with("> ")) {
      line.erase(0, 2);
    }
    agent.record_message(s_id, line, dir);
  }
  agent.finish_session(s_id).get();
  if (!agent.wait_idle(std::chrono::minutes(5))) {
    throw Error(ErrorCode::kAspUnreachable, "audit not delivered to " + asp);
  }
  const AgentSession s = agent.session(s_id);
  nlohmann::json out = {{"s_id", s.s_id},
                        {"msg_count", s.msg_count},
                        {"filler_count", s.filler_count},
                        {"audit_status", s.audit_status},
                        {"prove_ms", s.prove_finished_at - s.prove_started_at}};
  if (!s.delivery_error.empty()) out["delivery_error"] = s.delivery_error;
  std::cout << out.dump() << std::endl;
  return s.audit_status == "verified" ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  // Signals are taken synchronously by wait_for_signal; block them in every thread.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  CLI::App app{"zkmcp: private audits of agent sessions"};
  app.require_subcommand(1);

  auto* asp_cmd = app.add_subcommand("asp", "audit service provider");
  asp_cmd->require_subcommand(1);
  auto* serve = asp_cmd->add_subcommand("serve", "run the ASP service");
  std::string listen = "127.0.0.1:7400";
  std::string crs_dir;
  std::string data_dir;
  bool insecure = false;
  size_t workers = 32;
  serve->add_option("--listen", listen, "HOST:PORT")->capture_default_str();
  serve->add_option("--crs", crs_dir, "crs directory (holds meta.json)")->required();
  serve->add_option("--data", data_dir, "storage directory, default $ZKMCP_DATA_DIR/asp");
  serve->add_flag("--insecure", insecure, "accept the insecure oracle backend");
  serve->add_option("--workers", workers, "concurrent connections")->capture_default_str();

  auto* agent_cmd = app.add_subcommand("agent", "auditing agent");
  agent_cmd->require_subcommand(1);
  auto* run = agent_cmd->add_subcommand("run", "record a message file as one session and audit it");
  std::string agent_id = "agent";
  std::string peer;
  std::string asp_addr;
  std::string messages;
  bool no_pad = false;
  run->add_option("--id", agent_id, "agent identifier")->capture_default_str();
  run->add_option("--peer", peer, "peer HOST:PORT")->required();
  run->add_option("--asp", asp_addr, "ASP HOST:PORT")->required();
  run->add_option("--crs", crs_dir, "crs directory")->required();
  run->add_option("--messages", messages, "one raw message per line")->required();
  run->add_flag("--no-pad", no_pad, "fail instead of padding short sessions");

  auto* setup_cmd = app.add_subcommand("setup", "generate a crs");
  size_t n = 8;
  std::string backend = "real";
  std::string out_dir;
  std::string table_path;
  setup_cmd->add_option("--n", n, "messages per session")->capture_default_str();
  setup_cmd->add_option("--backend", backend, "real|oracle")->capture_default_str();
  setup_cmd->add_option("--out", out_dir, "crs root, default $ZKMCP_DATA_DIR/crs");
  setup_cmd->add_option("--table", table_path, "type table JSON");

  auto* bench_cmd = app.add_subcommand("bench", "circuit scalability sweep");
  std::vector<size_t> n_list;
  bool full = false;
  size_t budget_mb = 0;
  std::string out = "bench.csv";
  bench_cmd->add_option("--n", n_list, "message counts, e.g. 1,2,4")->delimiter(',');
  bench_cmd->add_flag("--full", full, "sweep to n=512 instead of 128");
  bench_cmd->add_option("--backend", backend, "real|oracle")->capture_default_str();
  bench_cmd->add_option("--budget-mb", budget_mb, "memory budget, default 80% of available");
  bench_cmd->add_option("--out", out, "report.csv or report.json; the other format is written alongside")
      ->capture_default_str();

  auto* sim_cmd = app.add_subcommand("simulate", "communication overhead of auditing");
  size_t sessions = 1;
  size_t sim_messages = 8;
  double latency_ms = 200;
  std::string profile;
  std::string audit = "on";
  std::string sim_asp;
  uint64_t seed = 1;
  std::string sim_out = "overhead.json";
  sim_cmd->add_option("--sessions", sessions, "concurrent sessions")->capture_default_str();
  sim_cmd->add_option("--messages", sim_messages, "messages per session")->capture_default_str();
  sim_cmd->add_option("--latency-ms", latency_ms, "fixed per-message latency")->capture_default_str();
  sim_cmd->add_option("--profile", profile, "named latency profile, overrides --latency-ms");
  sim_cmd->add_option("--audit", audit, "on: paired runs with and without audit; off: baseline only")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sim_cmd->add_option("--backend", backend, "real|oracle")->capture_default_str();
  sim_cmd->add_option("--crs", crs_dir, "crs directory; generated when absent");
  sim_cmd->add_option("--asp", sim_asp, "external ASP HOST:PORT; in-process when absent");
  sim_cmd->add_option("--seed", seed, "script and latency seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "overhead.json or overhead.csv")->capture_default_str();

  auto* fixtures_cmd = app.add_subcommand("fixtures", "test fixtures");
  fixtures_cmd->require_subcommand(1);
  auto* regen = fixtures_cmd->add_subcommand("regen", "rewrite the wire trace fixture");
  std::string fixture_dir = ZKMCP_FIXTURE_DIR;
  regen->add_option("--dir", fixture_dir, "fixture directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      const auto data = data_dir.empty() ? data_root() / "asp" : std::filesystem::path(data_dir);
      return asp_serve(listen, crs_dir, data, insecure, workers);
    }
    if (run->parsed()) return agent_run(agent_id, peer, asp_addr, crs_dir, messages, !no_pad);
    if (setup_cmd->parsed()) {
      CircuitParams params;
      params.n = n;
      const TypeTable table = table_path.empty() ? TypeTable::defaults() : TypeTable::load(table_path);
      const CrsBundle crs = setup(params, table, backend_arg(backend));
      const auto root = out_dir.empty() ? data_root() / "crs" : std::filesystem::path(out_dir);
      std::cout << save_crs(crs, root).string() << std::endl;
      return 0;
    }
    if (bench_cmd->parsed()) {
      if (n_list.empty()) n_list = default_sweep(full ? 512 : 128);
      const ReportFormat fmt = format_for(out);
      BenchOptions bo;
      bo.memory_budget_bytes = uint64_t{budget_mb} << 20;
      bo.on_row = [](const BenchRow& r) {
        std::cerr << "n=" << r.n << " constraints=" << r.constraints << " setup=" << r.setup_ms
                  << "ms prove=" << r.prove_ms << "ms verify=" << r.verify_ms << "ms" << std::endl;
      };
      bo.on_skip = [](const SkippedRow& s) {
        std::cerr << "n=" << s.n << " skipped: " << s.reason << std::endl;
      };
      const BenchReport report = bench_circuit(n_list, backend_arg(backend), bo);
      emit_report(report, fmt, out);
      const ReportFormat other = fmt == ReportFormat::kCsv ? ReportFormat::kJson : ReportFormat::kCsv;
      emit_report(report, other, sibling(out, fmt));
      return 0;
    }
    if (sim_cmd->parsed()) {
      SimOptions so;
      so.sessions = sessions;
      so.n = sim_messages;
      so.latency = profile.empty() ? LatencyProfile::fixed(latency_ms) : LatencyProfile::named(profile);
      so.seed = seed;
      if (!sim_asp.empty()) so.asp = Endpoint::parse(sim_asp);
      if (audit == "on") {
        if (crs_dir.empty()) {
          CircuitParams params;
          params.n = sim_messages;
          so.crs = std::make_shared<const CrsBundle>(
              setup(params, TypeTable::defaults(), backend_arg(backend)));
        } else {
          so.crs = std::make_shared<const CrsBundle>(load_crs(crs_dir, true));
        }
      }
      so.audit = false;
      const SimRun base = simulate_sessions(so);
      OverheadReport report;
      if (audit == "on") {
        so.audit = true;
        report.rows.push_back(compare_runs(base, simulate_sessions(so)));
      } else {
        report.rows.push_back(compare_runs(base, base));
      }
      emit_report(report, format_for(sim_out), sim_out);
      std::cout << report.to_json().dump(2) << std::endl;
      return 0;
    }
    if (regen->parsed()) {
      std::cout << write_fixtures(fixture_dir).string() << std::endl;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "zkmcp: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "zkmcp: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
