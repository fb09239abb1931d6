// nfkit: normal forms and convergence conditions from the command line.
//
//   nfkit normalize <problem> [--order N] [--mode termwise|blockwise|distinguished]
//   nfkit check <problem> [--as] [--al] [--hull c] [--omega k] [--siegel] [--estimate rho]
//   nfkit integrals <problem> [--order N]
//   nfkit commuting <problem> [--order N]
//
// Exit status: 0 success, 1 engine error, 2 bad arguments or problem file.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nfkit/io.hpp"

using namespace nfkit;
using io::json;

namespace {

#ifndef NFKIT_VERSION
#define NFKIT_VERSION "dev"
#endif

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  auto ms() const -> double {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

struct Ctx {
  io::Problem p;
  json result = json::object();
  json timings = json::object();
};

auto need_field(const Ctx &c) -> const BrunoField & {
  if (!c.p.F) throw io::SpecError("/lambda", "this command needs a single field, not only a family");
  return *c.p.F;
}

auto option_int(const io::Problem &p, const char *key, int def) -> int {
  if (!p.options.contains(key)) return def;
  const json &v = p.options.at(key);
  if (!v.is_number_integer()) throw io::SpecError(std::string("/options/") + key, "expected an integer");
  return v.get<int>();
}

auto option_rational(const io::Problem &p, const char *key, const std::string &def) -> Rational {
  if (!p.options.contains(key)) return parse_rational(def);
  return io::detail::rational_of(p.options.at(key), std::string("/options/") + key);
}

auto log_json(const std::vector<StepRecord> &log) -> json {
  json a = json::array();
  for (auto &r : log) {
    json e;
    if (r.block) e["block"] = r.block;
    e["S"] = io::to_json(r.S);
    e["delta"] = io::to_json(r.delta);
    e["action"] = r.h.empty() ? "kept" : "removed";
    if (!r.h.empty()) e["h"] = io::to_json(r.h);
    a.push_back(e);
  }
  return a;
}

auto normal_form_of(const BrunoField &F, int N, json &note) -> BrunoField {
  if (!is_normal_up_to(F, N)) return project(F, N);
  note["normalized_first"] = "blockwise";
  return normalize(F, N, Mode::blockwise).G;
}

// ---------------------------------------------------------------- commands

void cmd_normalize(Ctx &c, int N, const std::string &mode_s) {
  const BrunoField &F = need_field(c);
  Mode mode = parse_mode(mode_s);
  Timer t;
  auto r = normalize(F, N, mode);
  c.timings["normalize_ms"] = t.ms();
  json &o = c.result;
  o["mode"] = mode_name(mode);
  o["order"] = N;
  o["verified"] = r.verified;
  o["G"] = io::field_document(r.G);
  o["G_bruno"] = io::bruno_json(r.G.terms());
  o["H"] = io::terms_json(r.H.terms());
  bool disjoint = true;
  for (auto &[q, x] : r.H.terms())
    if (weight(q, F.lambda()).is_zero()) disjoint = false;
  o["H_avoids_resonances"] = disjoint;
  o["steps"] = r.log.size();
  o["log"] = log_json(r.log);
}

json as_json(const ASReport &as) {
  json o;
  o["span_holds"] = as.span_holds;
  if (as.offending) o["offending"] = io::to_json(*as.offending);
  o["isoresonance"] = verdict_name(as.iso.verdict);
  if (as.iso.witness) o["isoresonance_witness"] = io::to_json(*as.iso.witness);
  if (as.iso.lattice_witness) o["lattice_witness"] = *as.iso.lattice_witness;
  o["holds"] = as.holds();
  json s = json::array();
  for (auto &sj : as.s) {
    json t = json::array();
    for (auto &[q, v] : sj) t.push_back({{"P", io::to_json(q)}, {"c", io::to_json(v)}});
    s.push_back(t);
  }
  o["s"] = s;
  return o;
}

json hull_json(const HullReport &h) {
  json o;
  o["status"] = hull_status_name(h.status);
  o["certified"] = h.certified();
  o["c"] = io::to_json(h.c);
  o["bound"] = h.B;
  o["checked"] = h.checked;
  if (h.witness) {
    o["witness"] = io::to_json(*h.witness);
    o["part"] = h.part + 1;
    o["ratio"] = io::interval_json(h.ratio);
  }
  return o;
}

json omega_json(const OmegaSequence &om) {
  json a = json::array();
  for (auto &e : om.entries)
    a.push_back({{"k", e.k},
                 {"omega", io::interval_json(e.value)},
                 {"argmin", io::to_json(e.argmin)},
                 {"divisor", io::to_json(e.divisor)},
                 {"resolved", e.resolved}});
  return {{"entries", a}, {"partial_sum", io::upper(om.partial_sum_upper)}};
}

void cmd_check(Ctx &c, bool as, bool al, std::optional<std::string> hull, std::optional<int> omega, bool siegel,
               std::optional<std::string> estimate, int bound) {
  json &o = c.result;
  const io::Problem &p = c.p;
  auto decomposition = [&](const BrunoField &F) { return p.D ? *p.D : single_decomposition(F.lambda()); };
  if (as) {
    const BrunoField &F = need_field(c);
    Timer t;
    json sec;
    BrunoField G = normal_form_of(F, p.N, sec);
    auto D = decomposition(F);
    auto rep = check_AS(G, D);
    sec.update(as_json(rep));
    auto nil = nilpotency_check(G.terms(), p.N);
    sec["delta_nilpotent"] = nil.nilpotent;
    if (nil.witness) sec["nilpotency_witness"] = {{"Q", io::to_json(*nil.witness)}, {"component", nil.component + 1}};
    o["AS"] = sec;
    c.timings["as_ms"] = t.ms();
  }
  if (al) {
    if (p.family.empty()) throw io::SpecError("/family", "--al needs a family");
    Timer t;
    json sec;
    CommutingFamily fam(p.family);
    if (joint_normal_up_to(fam, p.N)) {
      fam = simultaneous_normalize(fam, p.N).family;
      sec["normalized_first"] = "simultaneous";
    }
    auto rep = check_AL(fam, p.N);
    sec["holds"] = rep.holds;
    if (rep.witness) sec["witness"] = {{"P", io::to_json(*rep.witness)}, {"member", rep.member + 1}};
    json v = json::array();
    for (std::size_t i = 0; i < rep.v.size(); ++i)
      for (std::size_t k = 0; k < rep.v[i].size(); ++k)
        for (auto &[q, x] : rep.v[i][k])
          v.push_back({{"i", i + 1}, {"k", k + 1}, {"P", io::to_json(q)}, {"c", io::to_json(x)}});
    sec["v"] = v;
    o["AL"] = sec;
    c.timings["al_ms"] = t.ms();
  }
  if (hull) {
    const BrunoField &F = need_field(c);
    Timer t;
    Rational cc = parse_rational(*hull);
    o["hull"] = hull_json(check_hull(F.lambda(), decomposition(F), cc, bound));
    c.timings["hull_ms"] = t.ms();
  }
  if (omega) {
    Timer t;
    if (p.F) o["omega"] = omega_json(omega_sequence(p.F->lambda(), *omega));
    if (!p.family.empty()) {
      CommutingFamily fam(p.family);
      auto os = omega_sharp(fam.lambdas(), *omega);
      json a = json::array();
      for (auto &e : os.entries)
        a.push_back({{"p", e.p}, {"omega_sharp", io::interval_json(e.value)}, {"member", e.index + 1}});
      o["omega_sharp"] = {{"entries", a}, {"partial_sum", io::upper(os.partial_sum_upper)}};
    }
    c.timings["omega_ms"] = t.ms();
  }
  if (siegel) {
    const BrunoField &F = need_field(c);
    Timer t;
    auto cert = siegel_pliss_certificate(F.lambda());
    auto scan = siegel_pliss_scan(F.lambda(), cert, bound);
    json sec;
    sec["nu"] = cert.nu;
    sec["C"] = io::lower(cert.C);
    sec["C_exact"] = io::to_json(cert.C);
    sec["scan_bound"] = bound;
    sec["checked"] = scan.checked;
    sec["pass"] = scan.pass;
    if (scan.witness) sec["witness"] = io::to_json(*scan.witness);
    o["siegel_pliss"] = sec;
    c.timings["siegel_ms"] = t.ms();
  }
  if (estimate) {
    const BrunoField &F = need_field(c);
    Timer t;
    Rational rho = parse_rational(*estimate);
    Rational cc = hull ? parse_rational(*hull) : option_rational(p, "c", "1");
    int k = option_int(p, "k", 1);
    auto r = step_estimate_check(F, decomposition(F), cc, rho, k);
    json sec;
    sec["rho"] = io::to_json(r.rho);
    sec["k"] = r.k;
    sec["m"] = r.m;
    sec["hypothesis_met"] = r.hypothesis_met;
    if (!r.hypothesis_met) sec["hypothesis_note"] = r.hypothesis_note;
    sec["F_norm"] = io::interval_json(r.F_norm);
    sec["G_norm"] = io::interval_json(r.G_norm);
    sec["Delta_norm"] = io::interval_json(r.Delta_norm);
    sec["DG_norm"] = io::interval_json(r.DG_norm);
    sec["beta"] = io::lower(r.beta);
    sec["c1"] = io::lower(r.c1);
    sec["c2"] = io::upper(r.c2);
    sec["omega_k1"] = io::interval_json(r.omega_k1);
    if (r.hypothesis_met) {
      sec["h_norm"] = io::interval_json(r.h_norm);
      json pd = json::array();
      for (auto &d : r.per_delta)
        pd.push_back({{"delta", io::to_json(d.delta)}, {"lhs", io::upper(d.lhs_hi)}, {"rhs", io::lower(d.rhs_lo)}, {"ok", d.ok}});
      sec["per_delta"] = pd;
      sec["per_delta_ok"] = r.per_delta_ok;
      sec["aggregate_rhs"] = io::lower(r.aggregate_rhs_lo);
      sec["aggregate_ok"] = r.aggregate_ok;
    }
    o["estimate"] = sec;
    c.timings["estimate_ms"] = t.ms();
  }
  if (o.empty()) throw io::SpecError("check", "give at least one of --as --al --hull --omega --siegel --estimate");
}

void cmd_integrals(Ctx &c, int N) {
  const BrunoField &F = need_field(c);
  Timer t;
  json &o = c.result;
  BrunoField G = normal_form_of(F, N, o);
  auto r = integrability_report(G, N);
  o["order"] = r.N;
  o["rank"] = r.d;
  json basis = json::array();
  for (std::size_t i = 0; i < r.basis.size(); ++i) {
    json e{{"Q", r.lattice.basis[i]}, {"integral", r.basis[i].holds}};
    if (r.basis[i].witness) e["witness"] = io::to_json(*r.basis[i].witness);
    basis.push_back(e);
  }
  o["lattice_basis"] = basis;
  json small = json::array();
  for (std::size_t i = 0; i < r.small_monomials.size(); ++i) {
    json e{{"Q", io::to_json(r.small_monomials[i])}, {"integral", r.small_checks[i].holds}};
    if (r.small_checks[i].witness) e["witness"] = io::to_json(*r.small_checks[i].witness);
    small.push_back(e);
  }
  o["monomial_integrals"] = small;
  o["simplified_A_case"] = r.simplified_A_case;
  if (r.simplified_A_witness) o["simplified_A_witness"] = io::to_json(*r.simplified_A_witness);
  o["A2_case"] = r.A2_case;
  if (r.A2_witness) o["A2_witness"] = io::to_json(*r.A2_witness);
  o["cyclotomic_AS_case"] = r.cyclotomic_AS_case;
  if (r.cyclotomic_AS_case) {
    o["cyclic_span"] = r.cyclotomic_AS;
    o["psi_integral"] = r.psi_integral;
    o["equivalence"] = r.cyclotomic_equivalence;
  }
  o["claims"] = r.claims;
  c.timings["integrals_ms"] = t.ms();
}

void cmd_commuting(Ctx &c, int N) {
  if (c.p.family.empty()) throw io::SpecError("/family", "commuting needs a family");
  Timer t;
  CommutingFamily fam(c.p.family);
  json &o = c.result;
  auto cr = check_commute(fam, N);
  o["commute"] = cr.pass;
  if (!cr.pass) {
    o["witness"] = {{"members", {cr.k + 1, cr.l + 1}}, {"Q", io::to_json(*cr.witness)}};
    c.timings["commuting_ms"] = t.ms();
    return;
  }
  auto r = simultaneous_normalize(fam, N);
  o["verified"] = r.verified;
  json members = json::array();
  for (auto &F : r.family.members()) members.push_back(io::field_document(F));
  o["normal_forms"] = members;
  o["H"] = io::terms_json(r.H.terms());
  o["commute_after"] = check_commute(r.family, N).pass;
  json log = json::array();
  for (auto &s : r.log)
    log.push_back({{"block", s.block}, {"S", io::to_json(s.S)}, {"member", s.index + 1}, {"delta", io::to_json(s.delta)}});
  o["log"] = log;
  auto al = check_AL(r.family, N);
  o["AL"] = al.holds;
  if (al.witness) o["AL_witness"] = {{"P", io::to_json(*al.witness)}, {"member", al.member + 1}};
  c.timings["commuting_ms"] = t.ms();
}

auto read_file(const std::string &path) -> std::string {
  std::ifstream in(path);
  if (!in) throw io::SpecError(path, "cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Poincare-Dulac normal forms and convergence conditions"};
  app.set_version_flag("--version", NFKIT_VERSION);
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable JSON output");

  std::string path;
  int order = 0;
  std::string mode = "blockwise";
  auto *norm = app.add_subcommand("normalize", "compute a normal form and the normalizing transformation");
  norm->add_option("problem", path, "problem file")->required();
  norm->add_option("--order", order, "truncation order (default: the file's order)");
  norm->add_option("--mode", mode, "termwise | blockwise | distinguished");
  norm->add_flag("--json", as_json);

  bool f_as = false, f_al = false, f_siegel = false;
  std::optional<std::string> f_hull, f_estimate;
  std::optional<int> f_omega;
  int bound = 0;
  auto *check = app.add_subcommand("check", "resonance and convergence conditions");
  check->add_option("problem", path, "problem file")->required();
  check->add_flag("--as", f_as, "Condition AS and nilpotency of Delta");
  check->add_flag("--al", f_al, "Condition AL for a family");
  check->add_option("--hull", f_hull, "diophantine hull with constant c");
  check->add_option("--omega", f_omega, "omega sequence up to k");
  check->add_flag("--siegel", f_siegel, "Siegel-Pliss certificate and scan");
  check->add_option("--estimate", f_estimate, "block step estimate at radius rho");
  check->add_option("--bound", bound, "scan bound on ||Q||");
  check->add_flag("--json", as_json);

  auto *integ = app.add_subcommand("integrals", "Laurent monomial first integrals");
  integ->add_option("problem", path, "problem file")->required();
  integ->add_option("--order", order, "truncation order");
  integ->add_flag("--json", as_json);

  auto *comm = app.add_subcommand("commuting", "simultaneous normal form of a commuting family");
  comm->add_option("problem", path, "problem file")->required();
  comm->add_option("--order", order, "truncation order");
  comm->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  Timer total;
  Ctx c;
  std::string command = app.get_subcommands().front()->get_name();
  try {
    c.p = io::parse_problem(read_file(path));
    if (order == 0) order = c.p.N;
    if (order < 1 || order > c.p.N) throw io::SpecError("--order", "must be in 1.." + std::to_string(c.p.N));
    if (mode != "termwise" && mode != "blockwise" && mode != "distinguished")
      throw io::SpecError("--mode", "unknown mode '" + mode + "'");
  } catch (const Error &e) {
    std::cerr << "nfkit: " << e.what() << "\n";
    return 2;
  }

  json report;
  report["tool"] = {{"name", "nfkit"}, {"version", NFKIT_VERSION}};
  report["command"] = command;
  json input;
  input["field"] = io::field_json(c.p.field);
  input["order"] = c.p.N;
  if (c.p.F) {
    input["n"] = c.p.F->dim();
    input["lambda"] = io::to_json(c.p.F->lambda());
    input["terms"] = c.p.F->terms().size();
  }
  if (!c.p.family.empty()) input["family_size"] = c.p.family.size();
  report["input"] = input;
  try {
    if (command == "normalize") {
      cmd_normalize(c, order, mode);
    } else if (command == "check") {
      if (bound == 0) bound = f_siegel && !f_hull ? 32 : 30;
      cmd_check(c, f_as, f_al, f_hull, f_omega, f_siegel, f_estimate, bound);
    } else if (command == "integrals") {
      cmd_integrals(c, order);
    } else {
      cmd_commuting(c, order);
    }
  } catch (const io::SpecError &e) {
    std::cerr << "nfkit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "nfkit: " << e.what() << "\n";
    return 1;
  }
  report["result"] = c.result;
  c.timings["total_ms"] = total.ms();
  report["timings"] = c.timings;

  if (as_json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::string out;
    io::render_text(report, out);
    std::cout << out;
  }
  return 0;
}
