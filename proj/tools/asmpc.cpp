// Copyright 2026 The asmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asmpc/asmpc.hpp"

namespace {

using namespace asmpc;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string transport = "tcp";
  std::string optimize = "rounds";
  std::optional<double> additive_bound, mult_bound, mult_floor, delta, zero_guard;
  std::string profile;
};

Settings load_settings(const Globals& g) {
  Settings s;
  if (!g.config.empty()) load_config_file(s, g.config);
  if (!g.profile.empty()) apply_setting(s, "mask.profile", g.profile);
  if (g.additive_bound) s.masks.additive_bound = *g.additive_bound;
  if (g.mult_bound) s.masks.mult_bound = *g.mult_bound;
  if (g.mult_floor) s.masks.mult_floor = *g.mult_floor;
  if (g.delta) s.tol.delta = *g.delta;
  if (g.zero_guard) s.tol.zero_guard = *g.zero_guard;
  if (g.seed) s.masks.seed = *g.seed;
  s.validate();
  return s;
}

ProductStrategy optimize_goal(const Globals& g) {
  if (g.optimize == "comm") return ProductStrategy::kComm;
  return ProductStrategy::kRounds;
}

TransportMode transport_mode(const Globals& g) {
  return g.transport == "inproc" ? TransportMode::kInProc : TransportMode::kTcp;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kUsage, "cannot write " + path);
  os << text;
}

std::string read_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kUsage, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

PlainEnvironment to_env(const PlainValues& v) {
  PlainEnvironment env;
  for (const auto& [k, x] : v) env[k] = x;
  return env;
}

// ---- dealer ----------------------------------------------------------------

struct DealerArgs {
  std::size_t standard = 0, resharing = 0;
  std::uint64_t session = 1;
  std::string out_p1, out_p2, program;
};

int cmd_dealer(const Globals& g, const DealerArgs& a) {
  const Settings s = load_settings(g);
  std::size_t ns = a.standard, nr = a.resharing;
  if (!a.program.empty()) {
    const Plan p = plan(read_program_file(a.program), optimize_goal(g));
    ns += p.standard;
    nr += p.resharing;
  }
  const auto dealt = generate_triples(ns, nr, s.masks, a.session);
  write_triple_file(dealt.p1, a.out_p1);
  write_triple_file(dealt.p2, a.out_p2);
  std::cout << "wrote " << ns << " standard and " << nr << " resharing triples for session " << a.session << '\n';
  return 0;
}

// ---- share -----------------------------------------------------------------

struct ShareArgs {
  std::string program, inputs, out_p1, out_p2;
};

int cmd_share(const Globals& g, const ShareArgs& a) {
  const Settings s = load_settings(g);
  const auto prog = read_program_file(a.program);
  MaskSampler rng(s.masks, /*stream=*/2);
  auto [v1, v2] = share_inputs(prog, to_env(read_plain_file(a.inputs)), rng);
  auto records = [](const LocalValues& v, PartyId p) {
    std::vector<ShareRecord> out;
    for (const auto& [k, x] : v) {
      out.push_back({k, x.kind == ValueKind::kMultiplicative ? ShareKind::kMultiplicative : ShareKind::kAdditive, p,
                     x.value});
    }
    return out;
  };
  write_share_file(a.out_p1, records(v1, PartyId::kP1));
  write_share_file(a.out_p2, records(v2, PartyId::kP2));
  return 0;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  int party = 0;
  bool both = false;
  std::string program, inputs, triples, bind, peer, out, transcript, report_csv;
  std::vector<std::string> reveal;
  double timeout = 30.0;
  std::uint64_t session = 1;
};

int run_both(const Globals& g, const RunArgs& a) {
  const Settings s = load_settings(g);
  auto prog = read_program_file(a.program);
  if (!a.reveal.empty()) prog.outputs = a.reveal;
  LocalRunOptions opt;
  opt.transport = transport_mode(g);
  opt.masks = s.masks;
  opt.tol = s.tol;
  opt.strategy = optimize_goal(g);
  opt.session = a.session;
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = run_local(prog, to_env(read_plain_file(a.inputs)), opt);
  auto rep = make_report(run.plan, run.p1.transcript);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!a.reveal.empty()) rep.revealed = run.revealed;
  std::cout << rep.text();
  if (!a.transcript.empty()) write_text(a.transcript, run.p1.transcript.serialize());
  if (!a.report_csv.empty()) write_text(a.report_csv, rep.csv());
  return rep.all_match() ? 0 : 1;
}

int run_party(const Globals& g, const RunArgs& a) {
  if (transport_mode(g) != TransportMode::kTcp) {
    fail(ErrorCode::kUsage, "--transport inproc needs both parties in one process; use --both");
  }
  if (a.triples.empty() || a.inputs.empty()) fail(ErrorCode::kUsage, "--triples and --inputs are required");
  const Settings s = load_settings(g);
  const PartyId me = party_from_int(a.party);
  const Plan p = plan(read_program_file(a.program), optimize_goal(g));
  TripleSlice slice = read_triple_file(a.triples);
  if (slice.party != me) fail(ErrorCode::kUsage, "triple file belongs to party " + std::to_string(party_number(slice.party)));
  const std::uint64_t session = slice.session;
  TripleStore store(std::move(slice));
  LocalValues inputs;
  for (const auto& r : read_share_file(a.inputs)) {
    if (r.party != me) continue;
    inputs[r.id] = {r.kind == ShareKind::kMultiplicative ? ValueKind::kMultiplicative : ValueKind::kAdditive, r.value};
  }
  const auto timeout = std::chrono::milliseconds(static_cast<long>(a.timeout * 1000));
  std::unique_ptr<Link> link;
  if (me == PartyId::kP1) {
    const Endpoint ep = a.bind.empty() ? endpoint_from_env("ASMPC_BIND", "0.0.0.0") : parse_endpoint(a.bind, "0.0.0.0");
    TcpListener listener(ep);
    link = listener.accept(timeout);
  } else {
    const Endpoint ep = a.peer.empty() ? endpoint_from_env("ASMPC_PEER", "127.0.0.1") : parse_endpoint(a.peer, "127.0.0.1");
    link = tcp_connect(ep, timeout);
  }
  handshake(*link, session);
  Connection conn(std::move(link));
  Session sess(conn, session, me);
  PartyContext ctx{me, &store, &sess, inputs, s.tol};
  const auto t0 = std::chrono::steady_clock::now();
  const PartyResult res = execute(p, ctx);
  const auto revealed = reveal_outputs(sess, p.steps, res.outputs, a.reveal);
  auto rep = make_report(p, res.transcript);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.revealed = revealed;
  if (!a.out.empty()) {
    std::vector<ShareRecord> recs;
    for (const auto& [k, v] : res.outputs) {
      if (v.kind == ValueKind::kPublic) continue;
      recs.push_back({k, v.kind == ValueKind::kMultiplicative ? ShareKind::kMultiplicative : ShareKind::kAdditive, me,
                      v.value});
    }
    write_share_file(a.out, recs);
  }
  for (const auto& [k, v] : res.outputs) {
    if (v.kind == ValueKind::kPublic) std::cout << k << " = " << format_real(v.value) << " (public)\n";
  }
  for (const auto& r : a.reveal) {
    if (!revealed.count(r)) std::cerr << "warning: '" << r << "' not revealed; the peer did not consent\n";
  }
  std::cout << rep.text();
  if (!a.transcript.empty()) write_text(a.transcript, res.transcript.serialize());
  if (!a.report_csv.empty()) write_text(a.report_csv, rep.csv());
  return 0;
}

// ---- oracle / plan / report ------------------------------------------------

int cmd_oracle(const Globals& g, const std::string& program, const std::string& inputs) {
  const Settings s = load_settings(g);
  const auto prog = read_program_file(program);
  const auto env = eval_plain(prog, to_env(read_plain_file(inputs)), s.tol);
  for (const auto& o : prog.outputs) std::cout << o << " = " << format_real(env.at(o)) << '\n';
  return 0;
}

int cmd_plan(const Globals& g, const std::string& program) {
  const Plan p = plan(read_program_file(program), optimize_goal(g));
  std::cout << p.summary() << '\n';
  for (const auto& o : p.ops) {
    std::cout << o.out << " = " << op_name(o.op) << " steps " << o.first_step << ".." << o.last_step << " standard "
              << o.standard << " resharing " << o.resharing;
    if (o.op == OpKind::kProd) std::cout << (o.tree ? " (pairwise)" : " (power)");
    std::cout << '\n';
  }
  return 0;
}

int cmd_report(const Globals& g, const std::string& program, const std::string& transcript, bool csv) {
  const Plan p = plan(read_program_file(program), optimize_goal(g));
  std::istringstream is(read_text(transcript));
  const auto rep = make_report(p, parse_transcript(is));
  std::cout << (csv ? rep.csv() : rep.text());
  return rep.all_match() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asmpc: two-party computation over additive and multiplicative shares"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "key = value settings file");
  app.add_option("--seed", g.seed, "seed for masks and triples (reproducible runs)");
  app.add_option("--transport", g.transport, "inproc or tcp")->check(CLI::IsMember({"inproc", "tcp"}));
  app.add_option("--optimize", g.optimize, "product strategy goal: rounds or comm")->check(CLI::IsMember({"rounds", "comm"}));
  app.add_option("--mask.profile", g.profile, "precision or wide")->check(CLI::IsMember({"precision", "wide"}));
  app.add_option("--mask.additive_bound", g.additive_bound, "additive mask bound");
  app.add_option("--mask.mult_bound", g.mult_bound, "multiplicative mask upper bound");
  app.add_option("--mask.mult_floor", g.mult_floor, "multiplicative mask lower bound");
  app.add_option("--tol.delta", g.delta, "zero test threshold");
  app.add_option("--tol.zero_guard", g.zero_guard, "smallest admissible divisor");

  DealerArgs da;
  auto* dealer = app.add_subcommand("dealer", "generate triple files for both parties");
  dealer->add_option("--standard", da.standard, "standard triples");
  dealer->add_option("--resharing", da.resharing, "resharing triples");
  dealer->add_option("--session", da.session, "session id");
  dealer->add_option("--out-p1", da.out_p1, "party 1 triple file")->required();
  dealer->add_option("--out-p2", da.out_p2, "party 2 triple file")->required();
  dealer->add_option("--program", da.program, "add the demand of this program");

  ShareArgs sa;
  auto* share = app.add_subcommand("share", "split plaintext inputs into per-party share files");
  share->add_option("--program", sa.program)->required();
  share->add_option("--inputs", sa.inputs, "name = value file")->required();
  share->add_option("--out-p1", sa.out_p1)->required();
  share->add_option("--out-p2", sa.out_p2)->required();

  RunArgs ra;
  auto* run = app.add_subcommand("run", "execute one party (or both with --both)");
  auto* party_opt = run->add_option("--party", ra.party, "1 or 2")->check(CLI::IsMember({1, 2}));
  auto* both_opt = run->add_flag("--both", ra.both, "run both parties in this process; --inputs holds plaintext");
  party_opt->excludes(both_opt);
  run->add_option("--program", ra.program)->required();
  run->add_option("--inputs", ra.inputs, "share file (party mode) or name = value file (--both)")->required();
  run->add_option("--triples", ra.triples, "triple file for this party");
  run->add_option("--reveal", ra.reveal, "open this output if the peer agrees");
  run->add_option("--bind", ra.bind, "listen address for party 1 (default $ASMPC_BIND or 0.0.0.0:7420)");
  run->add_option("--peer", ra.peer, "address of party 1 for party 2 (default $ASMPC_PEER or 127.0.0.1:7420)");
  run->add_option("--timeout", ra.timeout, "connection timeout in seconds");
  run->add_option("--session", ra.session, "session id for --both");
  run->add_option("--out", ra.out, "write output shares here");
  run->add_option("--transcript", ra.transcript, "write the session transcript here");
  run->add_option("--report-csv", ra.report_csv, "write the cost report as CSV");

  std::string o_program, o_inputs;
  auto* oracle = app.add_subcommand("oracle", "evaluate a program on plaintext inputs");
  oracle->add_option("--program", o_program)->required();
  oracle->add_option("--inputs", o_inputs)->required();

  std::string p_program;
  auto* planc = app.add_subcommand("plan", "print the step schedule and triple demand");
  planc->add_option("--program", p_program)->required();

  std::string r_program, r_transcript;
  bool r_csv = false;
  auto* report = app.add_subcommand("report", "compare a transcript with the published costs");
  report->add_option("--program", r_program)->required();
  report->add_option("--transcript", r_transcript)->required();
  report->add_flag("--csv", r_csv, "machine-readable rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*dealer) return cmd_dealer(g, da);
    if (*share) return cmd_share(g, sa);
    if (*run) {
      if (!ra.both && ra.party == 0) fail(ErrorCode::kUsage, "run needs --party 1|2 or --both");
      return ra.both ? run_both(g, ra) : run_party(g, ra);
    }
    if (*oracle) return cmd_oracle(g, o_program, o_inputs);
    if (*planc) return cmd_plan(g, p_program);
    if (*report) return cmd_report(g, r_program, r_transcript, r_csv);
  } catch (const Error& e) {
    std::cerr << "asmpc: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "asmpc: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
