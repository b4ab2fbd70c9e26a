// ecdlp_forge command-line front end.
//
// Exit codes: 0 ok, 1 verification failed, 2 bad usage or bad input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ecdlp_forge/circuit.hpp"
#include "ecdlp_forge/ecadd_circuit.hpp"
#include "ecdlp_forge/ecc.hpp"
#include "ecdlp_forge/mastrovito.hpp"
#include "ecdlp_forge/shor.hpp"

namespace ef = ecdlp_forge;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VerifyFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// flat sorted key/value block; json nests on '.'
class Report {
 public:
  template <typename T>
  void set(const std::string& key, const T& v) {
    std::ostringstream os;
    os << v;
    kv_[key] = os.str();
  }
  void set(const std::string& key, bool v) { kv_[key] = v ? "true" : "false"; }
  void set(const std::string& key, double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    kv_[key] = os.str();
  }

  std::string text(const std::string& prefix = "") const {
    std::string out;
    for (const auto& [k, v] : kv_) out += prefix + k + "=" + v + "\n";
    return out;
  }

  std::string to_json() const {
    json j = json::object();
    for (const auto& [k, v] : kv_) {
      json* node = &j;
      std::size_t start = 0;
      for (std::size_t dot; (dot = k.find('.', start)) != std::string::npos; start = dot + 1)
        node = &(*node)[k.substr(start, dot - start)];
      (*node)[k.substr(start)] = v;
    }
    return j.dump(2) + "\n";
  }

  std::string render(const std::string& format) const { return format == "json" ? to_json() : text(); }

 private:
  std::map<std::string, std::string> kv_;
};

std::uint64_t parse_hex(const std::string& s, const char* what) {
  std::string t = s;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) t = t.substr(2);
  if (t.empty() || t.size() > 16 || t.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
    throw UsageError(std::string("bad hex value for ") + what + ": '" + s + "'");
  return std::stoull(t, nullptr, 16);
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

ef::FieldSpec field_from(unsigned m, const std::string& poly) {
  try {
    if (poly.empty()) return ef::default_field(m);
    return ef::FieldSpec(m, poly);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

ef::FieldElement element(const ef::FieldSpec& f, const std::string& s, const char* what) {
  const std::uint64_t v = parse_hex(s, what);
  if ((v & ~f.mask()) != 0) throw UsageError(std::string(what) + " does not fit in " + std::to_string(f.m()) + " bits");
  return ef::FieldElement(f, v);
}

ef::CurveParams curve_from(const ef::FieldSpec& f, const std::string& a, const std::string& b) {
  const auto ea = element(f, a, "--a");
  const auto eb = element(f, b, "--b");
  if (eb.is_zero()) throw UsageError("curve coefficient b must be nonzero");
  return ef::CurveParams(ea, eb);
}

void require_enumerable(unsigned m) {
  if (m > ef::kMaxEnumerableDegree)
    throw UsageError("curve enumeration supports m <= " + std::to_string(ef::kMaxEnumerableDegree));
}

// temp file in the same directory, renamed into place
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string join_labels(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

void circuit_stats(Report& r, const ef::Circuit& c, const std::string& prefix = "") {
  const auto counts = ef::gate_counts(c);
  r.set(prefix + "gates", c.size());
  r.set(prefix + "toffoli", counts.at("TOF"));
  r.set(prefix + "cnot", counts.at("CNOT"));
  r.set(prefix + "swap", counts.at("SWAP"));
  r.set(prefix + "wires", c.n_wires());
  r.set(prefix + "depth", ef::depth(c));
  r.set(prefix + "is_lnn", ef::is_lnn(c));
}

struct MultResult {
  ef::Circuit circuit;
  Report stats;
};

MultResult build_multiplier(const ef::FieldSpec& f, bool route, bool decompose) {
  MultResult out;
  Report& r = out.stats;
  const unsigned m = f.m();
  r.set("m", m);
  r.set("poly", f.poly().to_hex());
  r.set("e_stage_depth", ef::depth(ef::synth_e_stage(f)));
  r.set("d_stage_depth", ef::depth(ef::synth_d_stage(f)));
  r.set("m_stage_cnots", ef::synth_reduction_stage(f).size());
  if (route) {
    auto routed = ef::route_lnn(f);
    r.set("routed", true);
    r.set("computational_stages", routed.stats.computational_stages);
    r.set("swap_stages", routed.stats.swap_stages);
    r.set("initial_layout", join_labels(routed.initial.labels()));
    r.set("final_layout", join_labels(routed.final_layout.labels()));
    out.circuit = std::move(routed.circuit);
  } else {
    r.set("routed", false);
    out.circuit = ef::synth_multiplier(f);
  }
  if (decompose) {
    if (!route) throw UsageError("--decompose needs an LNN-routed circuit (add --route-lnn)");
    out.circuit = ef::decompose_toffoli(out.circuit);
    r.set("decomposed", true);
    r.set("g2", out.circuit.count(ef::GateKind::Opaque2q));
  }
  circuit_stats(r, out.circuit);
  return out;
}

std::string with_header(const Report& stats, const ef::Circuit& c) { return stats.text("# ") + ef::emit_text(c); }

struct FieldOpts {
  unsigned m = 0;
  std::string poly;
  void add(CLI::App* sub) {
    sub->add_option("--m", m, "field degree")->required()->check(CLI::Range(2U, 64U));
    sub->add_option("--poly", poly, "modulus in hex, bit i = x^i (default: lowest-weight irreducible)");
  }
  ef::FieldSpec field() const { return field_from(m, poly); }
};

int run_synth_mult(const FieldOpts& fo, bool route, bool decompose, const std::string& format, const std::string& out) {
  const auto f = fo.field();
  const auto res = build_multiplier(f, route, decompose);
  const std::string text = with_header(res.stats, res.circuit);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_atomic(out, text);
    std::cout << res.stats.render(format);
  }
  return 0;
}

int run_verify_mult(const FieldOpts& fo, bool exhaustive, std::uint64_t random, std::uint64_t seed, bool route) {
  const auto f = fo.field();
  const unsigned m = f.m();
  if (exhaustive && m > 12) throw UsageError("--exhaustive supports m <= 12");
  if (!exhaustive && random == 0) throw UsageError("--random must be positive");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  if (exhaustive) {
    for (std::uint64_t a = 0; a < f.order(); ++a)
      for (std::uint64_t b = 0; b < f.order(); ++b) pairs.emplace_back(a, b);
  } else {
    std::mt19937_64 rng(seed);
    for (std::uint64_t k = 0; k < random; ++k) pairs.emplace_back(rng() & f.mask(), rng() & f.mask());
  }
  std::vector<std::uint64_t> got;
  try {
    if (route) {
      const auto r = ef::route_lnn(f);
      got = ef::simulate_products(r.circuit, ef::MultiplierIo::routed(r, m), pairs);
    } else {
      got = ef::simulate_products(ef::synth_multiplier(f), ef::MultiplierIo::unrouted(m), pairs);
    }
  } catch (const std::logic_error& e) {
    std::cout << "0/" << pairs.size() << " pass (" << e.what() << ")\n";
    return 1;
  }
  std::size_t pass = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    pass += got[k] == ef::field_mul(ef::FieldElement(f, pairs[k].first), ef::FieldElement(f, pairs[k].second)).bits();
  std::cout << pass << "/" << pairs.size() << " pass\n";
  return pass == pairs.size() ? 0 : 1;
}

int run_synth_ecadd(const FieldOpts& fo, const std::string& a, const std::string& b, const std::string& rx,
                    const std::string& ry, bool uncompute, const std::string& out, const std::string& format) {
  const auto f = fo.field();
  const auto c = curve_from(f, a, b);
  const auto x = element(f, rx, "--rx");
  const auto y = element(f, ry, "--ry");
  const auto pt = ef::AffinePoint::unchecked(x, y);
  if (!ef::on_curve(c, pt)) throw UsageError("(rx, ry) is not on the curve");
  auto pac = ef::synth_point_add_known(c, pt);
  if (uncompute) pac = ef::with_uncompute(pac);
  Report r;
  r.set("m", f.m());
  r.set("poly", f.poly().to_hex());
  r.set("a", hex(c.a().bits()));
  r.set("b", hex(c.b().bits()));
  r.set("rx", hex(x.bits()));
  r.set("ry", hex(y.bits()));
  r.set("uncompute", uncompute);
  circuit_stats(r, pac.circuit);
  write_atomic(out + ".map", pac.map.to_text());
  write_atomic(out, with_header(r, pac.circuit));
  std::cout << r.render(format);
  return 0;
}

int run_simulate(const std::string& path, const std::string& input) {
  ef::Circuit c;
  try {
    c = ef::parse_text(read_file(path));
  } catch (const ef::ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
  ef::BitState s;
  try {
    s = ef::BitState::from_string(input);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (s.size() != c.n_wires())
    throw UsageError("input has " + std::to_string(s.size()) + " bits, circuit has " + std::to_string(c.n_wires()) +
                     " wires");
  try {
    std::cout << ef::run(c, s).to_string() << "\n";
  } catch (const ef::NotSimulatable& e) {
    throw UsageError(e.what());
  }
  return 0;
}

ef::DeskCurve pick_curve(const ef::FieldSpec& f, const std::string& a, const std::string& b) {
  require_enumerable(f.m());
  if (a.empty() != b.empty()) throw UsageError("give both --a and --b, or neither");
  if (a.empty()) return ef::find_desk_curve(f);
  return ef::subgroup_generator(curve_from(f, a, b));
}

std::string point_text(const ef::AffinePoint& p) {
  if (p.is_infinity()) return "O";
  return "(" + hex(p.x().bits()) + "," + hex(p.y().bits()) + ")";
}

int run_curve_info(const FieldOpts& fo, const std::string& a, const std::string& b, const std::string& format) {
  const auto f = fo.field();
  const auto desk = pick_curve(f, a, b);
  Report r;
  r.set("m", f.m());
  r.set("poly", f.poly().to_hex());
  r.set("a", hex(desk.curve.a().bits()));
  r.set("b", hex(desk.curve.b().bits()));
  r.set("group_order", desk.group_order);
  std::string fac;
  for (auto p : ef::prime_factors(desk.group_order)) fac += (fac.empty() ? "" : ",") + std::to_string(p);
  r.set("prime_factors", fac);
  r.set("hasse_ok", ef::hasse_bound_holds(desk.curve, desk.group_order));
  r.set("subgroup_order", desk.subgroup_order);
  r.set("generator", point_text(desk.generator));
  std::cout << r.render(format);
  return 0;
}

int run_ecdlp_demo(const FieldOpts& fo, const std::string& a, const std::string& b, std::uint64_t seed,
                   const std::string& mode, std::optional<std::uint64_t> d_flag) {
  const auto f = fo.field();
  const auto desk = pick_curve(f, a, b);
  const std::uint64_t r = desk.subgroup_order;
  if (r > ef::kMaxDeskOrder) throw UsageError("subgroup order " + std::to_string(r) + " exceeds the desk limit");
  std::uint64_t d = 0;
  if (d_flag) {
    if (*d_flag >= r) throw UsageError("--d must be below the subgroup order " + std::to_string(r));
    d = *d_flag;
  } else {
    d = std::mt19937_64(seed)() % r;
  }
  const auto q = ef::scalar_mul(desk.curve, d, desk.generator);
  const auto backend = mode == "circuit" ? ef::Backend::Circuit : ef::Backend::Oracle;
  const auto rep = ef::ecdlp_solve(desk.curve, desk.generator, q, seed, backend);

  const auto support = rep.distribution.support();
  std::size_t on_line = 0;
  for (const auto& [k1, k2] : support) on_line += (d * k1) % r == k2;

  std::cout << "field: m=" << f.m() << " poly=" << f.poly().to_hex() << "\n";
  std::cout << "curve: y^2 + xy = x^3 + " << hex(desk.curve.a().bits()) << " x^2 + " << hex(desk.curve.b().bits())
            << "  #E=" << desk.group_order << "\n";
  std::cout << "P=" << point_text(desk.generator) << " r=" << r << " Q=" << point_text(q) << "\n";
  std::cout << "mode: " << ef::to_string(backend) << "  point adds=" << rep.table.point_adds
            << " datapath adds=" << rep.table.datapath_adds << " inversions in adds="
            << rep.table.inversions.in_point_adds << "\n";
  std::cout << "support line: k2 = d*k1 mod " << r << "  (" << support.size() << " outcomes, " << on_line
            << " on the line, probability " << std::setprecision(6) << 1.0 / static_cast<double>(r) << " each)\n";
  std::cout << "samples:";
  for (const auto& [k1, k2] : rep.samples) std::cout << " (" << k1 << "," << k2 << ")";
  std::cout << "\n";
  std::cout << "recovered d=" << rep.d << "\n";
  const bool ok = rep.verified && rep.d == d && on_line == support.size() && support.size() == r;
  std::cout << "verification: " << (ok ? "pass" : "FAIL") << " (d*P " << (rep.verified ? "==" : "!=") << " Q)\n";
  return ok ? 0 : 1;
}

std::vector<unsigned> parse_m_list(const std::string& s) {
  std::vector<unsigned> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      std::size_t pos = 0;
      const unsigned long v = std::stoul(tok, &pos);
      if (pos != tok.size() || v < 2 || v > 64) throw std::invalid_argument("");
      out.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw UsageError("bad --m list entry '" + tok + "'");
    }
  }
  if (out.empty()) throw UsageError("empty --m list");
  return out;
}

int run_report(const std::string& ms, const std::string& format) {
  Report r;
  for (unsigned m : parse_m_list(ms)) {
    std::ostringstream k;
    k << "m" << std::setw(2) << std::setfill('0') << m << ".";
    const std::string p = k.str();
    const auto f = ef::default_field(m);
    const auto mult = ef::synth_multiplier(f);
    r.set(p + "poly", f.poly().to_hex());
    r.set(p + "gates", mult.size());
    r.set(p + "toffoli", mult.count(ef::GateKind::Toffoli));
    r.set(p + "cnot", mult.count(ef::GateKind::Cnot));
    r.set(p + "gate_bound", f.is_trinomial() ? m * m + m - 1 : 2 * m * m - 1);
    r.set(p + "e_stage_depth", ef::depth(ef::synth_e_stage(f)));
    r.set(p + "d_stage_depth", ef::depth(ef::synth_d_stage(f)));
    r.set(p + "m_stage_cnots", ef::synth_reduction_stage(f).size());
    r.set(p + "depth", ef::depth(mult));
    const auto routed = ef::route_lnn(f);
    const auto dec = ef::decompose_toffoli(routed.circuit);
    r.set(p + "lnn.is_lnn", ef::is_lnn(routed.circuit));
    r.set(p + "lnn.computational_stages", routed.stats.computational_stages);
    r.set(p + "lnn.swap_stages", routed.stats.swap_stages);
    r.set(p + "lnn.gates", routed.circuit.size());
    r.set(p + "lnn.decomposed_depth", ef::depth(dec));
    r.set(p + "lnn.decomposed_depth_per_m", static_cast<double>(ef::depth(dec)) / m);
  }
  std::cout << r.render(format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible GF(2^m) multiplier and elliptic-curve discrete-log toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  const auto format_check = CLI::IsMember({"text", "json"});

  // synth-mult / route-lnn
  FieldOpts sm_f;
  bool sm_route = false, sm_dec = false;
  std::string sm_format = "text", sm_out;
  auto* sm = app.add_subcommand("synth-mult", "Mastrovito multiplier as .rqc");
  sm_f.add(sm);
  sm->add_flag("--route-lnn", sm_route, "route to nearest-neighbour form");
  sm->add_flag("--decompose", sm_dec, "replace Toffolis by 2-qubit gates (routed only)");
  sm->add_option("--format", sm_format, "stat block format when -o is given")->check(format_check);
  sm->add_option("-o,--output", sm_out, "circuit path (stdout when absent)");

  FieldOpts rl_f;
  bool rl_dec = false;
  std::string rl_format = "text", rl_out;
  auto* rl = app.add_subcommand("route-lnn", "LNN-routed multiplier as .rqc");
  rl_f.add(rl);
  rl->add_flag("--decompose", rl_dec, "replace Toffolis by 2-qubit gates");
  rl->add_option("--format", rl_format)->check(format_check);
  rl->add_option("-o,--output", rl_out, "circuit path (stdout when absent)");

  FieldOpts ea_f;
  std::string ea_a, ea_b, ea_rx, ea_ry, ea_out, ea_format = "text";
  bool ea_unc = false;
  auto* ea = app.add_subcommand("synth-ecadd", "point-add circuit for a known point; writes PATH and PATH.map");
  ea_f.add(ea);
  ea->add_option("--a", ea_a, "curve a (hex)")->required();
  ea->add_option("--b", ea_b, "curve b (hex)")->required();
  ea->add_option("--rx", ea_rx, "known point x (hex)")->required();
  ea->add_option("--ry", ea_ry, "known point y (hex)")->required();
  ea->add_flag("--uncompute", ea_unc, "append copy-out and inverse pass");
  ea->add_option("-o,--output", ea_out, "circuit path")->required();
  ea->add_option("--format", ea_format)->check(format_check);

  std::string si_path, si_in;
  auto* si = app.add_subcommand("simulate", "run a .rqc on a bit string (wire 0 first)");
  si->add_option("--circuit", si_path, ".rqc file")->required();
  si->add_option("--input", si_in, "one 0/1 per wire")->required();

  FieldOpts vm_f;
  bool vm_ex = false, vm_route = false;
  std::uint64_t vm_random = 10000, vm_seed = 1;
  auto* vm = app.add_subcommand("verify-mult", "compare the multiplier circuit with field multiplication");
  vm_f.add(vm);
  auto* ex_opt = vm->add_flag("--exhaustive", vm_ex, "all 2^(2m) pairs");
  vm->add_option("--random", vm_random, "random pairs (default 10000)")->excludes(ex_opt);
  vm->add_option("--seed", vm_seed, "seed for random pairs");
  vm->add_flag("--route-lnn", vm_route, "check the routed circuit with layout tracking");

  FieldOpts ci_f;
  std::string ci_a, ci_b, ci_format = "text";
  auto* ci = app.add_subcommand("curve-info", "group order and subgroup of y^2+xy=x^3+ax^2+b");
  ci_f.add(ci);
  ci->add_option("--a", ci_a, "curve a (hex); omit a and b to search for a desk curve");
  ci->add_option("--b", ci_b, "curve b (hex)");
  ci->add_option("--format", ci_format)->check(format_check);

  FieldOpts ed_f;
  std::string ed_a, ed_b, ed_mode = "oracle";
  std::uint64_t ed_seed = 1;
  std::optional<std::uint64_t> ed_d;
  auto* ed = app.add_subcommand("ecdlp-demo", "exact emulation of discrete-log recovery on a small curve");
  ed_f.add(ed);
  ed->add_option("--a", ed_a, "curve a (hex); omit a and b to search for a desk curve");
  ed->add_option("--b", ed_b, "curve b (hex)");
  ed->add_option("--seed", ed_seed, "sampling seed (also picks d unless --d)");
  ed->add_option("--mode", ed_mode, "point-add backend")->check(CLI::IsMember({"circuit", "oracle"}));
  ed->add_option("--d", ed_d, "secret exponent");

  std::string rp_m = "4,5,7,8,15,16,32", rp_format = "text";
  auto* rp = app.add_subcommand("report", "gate-count and depth table over a list of m");
  rp->add_option("--m", rp_m, "comma-separated degrees");
  rp->add_option("--format", rp_format)->check(format_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*sm) return run_synth_mult(sm_f, sm_route, sm_dec, sm_format, sm_out);
    if (*rl) return run_synth_mult(rl_f, true, rl_dec, rl_format, rl_out);
    if (*ea) return run_synth_ecadd(ea_f, ea_a, ea_b, ea_rx, ea_ry, ea_unc, ea_out, ea_format);
    if (*si) return run_simulate(si_path, si_in);
    if (*vm) return run_verify_mult(vm_f, vm_ex, vm_random, vm_seed, vm_route);
    if (*ci) return run_curve_info(ci_f, ci_a, ci_b, ci_format);
    if (*ed) return run_ecdlp_demo(ed_f, ed_a, ed_b, ed_seed, ed_mode, ed_d);
    if (*rp) return run_report(rp_m, rp_format);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
