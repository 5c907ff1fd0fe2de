#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ssqt/battery.hpp"
#include "ssqt/cli.hpp"
#include "ssqt/coherent.hpp"
#include "ssqt/entropy.hpp"
#include "ssqt/gamma.hpp"
#include "ssqt/thermo.hpp"
#include "ssqt/workcost.hpp"

namespace ssqt::cli {

namespace {

RVec to_vec(const std::vector<double>& v) { return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::optional<double> eps_of(double e) { return e > 0.0 ? std::optional<double>(e) : std::nullopt; }

std::optional<double> gap_of(const EntropyResult& r) {
  return r.certificate ? std::optional<double>(r.certificate->gap) : std::nullopt;
}

void entropy_flags(const EntropyResult& r, Report& rep) {
  if (r.proxy) rep.warnings.push_back("smoothing proxy: the reported value bounds the smooth quantity");
  if (r.lower_bound) rep.warnings.push_back("value is a lower bound");
  if (!r.note.empty()) rep.warnings.push_back(r.note);
}

RMat parse_table(const std::string& s) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(s);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<double> vals;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("--table: '" + cell + "' is not a number");
      }
    }
    rows.push_back(vals);
  }
  if (rows.empty() || rows[0].empty()) throw InputError("--table: empty table");
  RMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw InputError("--table: rows have different lengths");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

struct Options {
  // shared
  std::string format = "text", units = "bits";
  std::uint64_t seed = kBatterySeed;
  double eps = 0.0;
  // files
  std::string state, gamma, proc, gamma_r, gamma_x, gamma_xp, channel, input, rho, sigma, covariant, out_path,
      gamma_k, gamma_l, projector;
  std::vector<std::string> projectors;
  // entropy / relent
  std::string kind = "vn";
  std::vector<int> cond;
  double eta = 0.0;
  // coherent / workcost
  bool with_bounds = false, coherent_route = false;
  // classical-workcost
  std::string gate, table;
  std::vector<int> support;
  // thermo-major
  std::vector<double> p, q, gibbs;
  double slack = 1e-3;
  // reverse / dilate
  double yield = 0.0;
  int k_index = 0, l_index = 0;
  // potential
  int toy_gas = 0, energy = -1;
  std::vector<int> repetition, bits;
  // demo
  std::string demo_name;
  int spins = 64;
};

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermodynamic resource theory toolkit: entropies, coherent relative entropy, work costs", "ssqt-cli"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "text, csv or json")->capture_default_str();
  app.add_option("--units", o.units, "bits, nats or kTln2")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for randomized demos")->capture_default_str();

  std::vector<std::string> files;
  std::map<CLI::App*, std::function<Report()>> actions;
  const Tolerances tol = Tolerances::defaults();
  auto file = [&files](const std::string& p) -> const std::string& {
    files.push_back(p);
    return p;
  };

  auto* entropy = app.add_subcommand("entropy", "von Neumann, min, max and max,0 (conditional) entropies");
  entropy->add_option("--state", o.state, "state file")->required();
  entropy->add_option("--kind", o.kind, "vn, min, max0 or max")->capture_default_str();
  entropy->add_option("--cond", o.cond, "conditioning factor indices")->delimiter(',');
  entropy->add_option("--eps", o.eps, "smoothing parameter (min and max only)");
  actions[entropy] = [&] {
    SubnormalizedState st = load_state(file(o.state), tol);
    Report rep;
    const std::string name = "H_" + o.kind + (o.cond.empty() ? "" : "(A|" + join(o.cond) + ")");
    EntropyResult r;
    if (o.eps > 0.0) {
      if (o.kind == "min") r = smooth_h_min(st, o.cond, o.eps, tol);
      else if (o.kind == "max") r = smooth_h_max(st, o.cond, o.eps, tol);
      else throw InputError("entropy: smoothing needs --kind min or max");
    } else if (o.kind == "vn" && o.cond.empty()) {
      r.value = von_neumann(st);
    } else {
      static const std::map<std::string, CondKind> kinds{
          {"vn", CondKind::vn}, {"min", CondKind::min}, {"max0", CondKind::max0}, {"max", CondKind::max}};
      auto it = kinds.find(o.kind);
      if (it == kinds.end()) throw InputError("entropy: unknown --kind '" + o.kind + "'");
      r = conditional_entropy(st, o.cond, it->second, tol);
    }
    rep.results.push_back({name, r.value, "bits", r.certificate ? "SDP" : "spectral", gap_of(r), eps_of(o.eps)});
    entropy_flags(r, rep);
    return rep;
  };

  auto* relent = app.add_subcommand("relent", "relative entropies of a state to a Gamma operator");
  relent->add_option("--state", o.state, "state file")->required();
  relent->add_option("--gamma", o.gamma, "Gamma operator file")->required();
  relent->add_option("--kind", o.kind, "vn, min0, min, max, rob or hypothesis")->capture_default_str();
  relent->add_option("--eps", o.eps, "smoothing parameter (max, min0, rob)");
  relent->add_option("--eta", o.eta, "hypothesis testing level");
  actions[relent] = [&] {
    SubnormalizedState st = load_state(file(o.state), tol);
    GammaOperator g = load_gamma(file(o.gamma), tol);
    Report rep;
    EntropyResult r;
    if (o.kind == "hypothesis") {
      r = hypothesis_testing(st, g.op(), o.eta, tol);
    } else if (o.eps > 0.0) {
      if (o.kind == "max") r = smooth_d_max(st, g.op(), o.eps, tol);
      else if (o.kind == "min0") r = smooth_d_min0_proxy(st, g.op(), o.eps, tol);
      else if (o.kind == "rob") r = smooth_d_rob(st, g.op(), o.eps, tol);
      else throw InputError("relent: smoothing needs --kind max, min0 or rob");
    } else {
      static const std::map<std::string, RelKind> kinds{{"vn", RelKind::vn},
                                                        {"min0", RelKind::min0},
                                                        {"min", RelKind::min},
                                                        {"max", RelKind::max},
                                                        {"rob", RelKind::rob}};
      auto it = kinds.find(o.kind);
      if (it == kinds.end()) throw InputError("relent: unknown --kind '" + o.kind + "'");
      r = relative_entropy(st, g.op(), it->second, tol);
    }
    rep.results.push_back({"D_" + o.kind, r.value, "bits", r.certificate ? "SDP" : "spectral", gap_of(r),
                           eps_of(o.eps)});
    entropy_flags(r, rep);
    return rep;
  };

  auto* coherent = app.add_subcommand("coherent", "coherent relative entropy of a process matrix");
  coherent->add_option("--proc", o.proc, "process matrix on X' (x) R")->required();
  coherent->add_option("--gamma-r", o.gamma_r, "Gamma operator on R")->required();
  coherent->add_option("--gamma-x,--gamma-xp", o.gamma_xp, "Gamma operator on the output X'")->required();
  coherent->add_option("--eps", o.eps, "smoothing parameter");
  coherent->add_flag("--bounds", o.with_bounds, "also report the bounds from the marginals");
  actions[coherent] = [&] {
    CoherentInstance inst(load_state(file(o.proc), tol), load_gamma(file(o.gamma_r), tol),
                          load_gamma(file(o.gamma_xp), tol), tol);
    Report rep;
    CoherentResult r = o.eps > 0.0 ? smooth_coherent(inst, o.eps, tol) : coherent_rel_entropy(inst, tol);
    rep.results.push_back({"coherent relative entropy", r.value, "bits", o.eps > 0.0 ? "smooth SDP" : "SDP", r.gap,
                           eps_of(o.eps)});
    rep.results.push_back({"alpha", r.alpha, "", "", std::nullopt, std::nullopt});
    if (o.eps > 0.0) {
      rep.results.push_back({"unsmoothed", r.unsmoothed, "bits", "SDP", std::nullopt, std::nullopt});
      rep.warnings.push_back("smoothing restricted to process matrices with the same input marginal");
    }
    if (o.with_bounds)
      for (const BoundEntry& b : bounds(inst, eps_of(o.eps), tol))
        rep.results.push_back({"bound " + b.name, b.value, "bits", b.side == BoundSide::lower ? "lower" : "upper",
                               std::nullopt, b.smooth ? eps_of(o.eps) : std::nullopt});
    if (!r.note.empty()) rep.warnings.push_back(r.note);
    return rep;
  };

  auto* workcost = app.add_subcommand("workcost", "work cost of a channel on a given input");
  workcost->add_option("--channel", o.channel, "Choi matrix file")->required();
  workcost->add_option("--input", o.input, "input state file")->required();
  workcost->add_option("--eps", o.eps, "failure probability");
  workcost->add_flag("--coherent", o.coherent_route, "evaluate through the coherent relative entropy SDP");
  actions[workcost] = [&] {
    ChoiChannel e = load_channel(file(o.channel), tol);
    SubnormalizedState s = load_state(file(o.input), tol);
    if (o.coherent_route && o.eps > 0.0) throw InputError("workcost: --coherent takes no --eps");
    WorkReport w = o.coherent_route ? work_cost_coherent(e, s, tol) : work_cost(e, s, o.eps, tol);
    Report rep;
    rep.results.push_back({"work cost", w.bits, "bits", to_string(w.method), std::nullopt, eps_of(w.epsilon)});
    rep.results.push_back({"cross check", w.cross_check, "bits", "independent formula", std::nullopt, std::nullopt});
    if (w.epsilon > 0.0)
      rep.results.push_back({"smoothing applied", w.epsilon_tilde, "", "sqrt(2 eps)", std::nullopt, std::nullopt});
    if (!w.note.empty()) rep.warnings.push_back(w.note);
    return rep;
  };

  auto* classical = app.add_subcommand("classical-workcost", "work cost of a classical gate or stochastic table");
  classical->add_option("--gate", o.gate, "and, or, xor, nand or nor");
  classical->add_option("--table", o.table, "p(x'|x) rows separated by ';', columns x");
  classical->add_option("--support", o.support, "input support mask (default: all)")->delimiter(',');
  actions[classical] = [&] {
    if (o.gate.empty() == o.table.empty()) throw InputError("classical-workcost: give exactly one of --gate, --table");
    RMat pc = o.gate.empty() ? parse_table(o.table) : gate_table(o.gate);
    std::vector<bool> supp(pc.cols(), true);
    if (!o.support.empty()) {
      if (static_cast<Eigen::Index>(o.support.size()) != pc.cols())
        throw InputError("classical-workcost: --support needs one entry per input");
      for (std::size_t i = 0; i < o.support.size(); ++i) supp[i] = o.support[i] != 0;
    }
    WorkReport w = work_cost_classical(pc, supp);
    Report rep;
    rep.results.push_back({"work cost", w.bits, "bits", to_string(w.method), std::nullopt, std::nullopt});
    return rep;
  };

  auto* measure = app.add_subcommand("measure", "work of a projective measurement and of resetting its register");
  measure->add_option("--projectors", o.projectors, "projector files, one per outcome")->delimiter(',')->required();
  measure->add_option("--state", o.state, "input state file")->required();
  measure->add_option("--eps", o.eps, "smoothing parameter");
  actions[measure] = [&] {
    std::vector<CMat> proj;
    for (const auto& p : o.projectors) proj.push_back(load_operator(file(p), tol).mat());
    SubnormalizedState s = load_state(file(o.state), tol);
    MeasurementReport m = measurement_analysis(MeasurementInstrument::projective(proj), s, o.eps, tol);
    Report rep;
    auto row = [&](const char* name, const WorkReport& w) {
      rep.results.push_back({name, w.bits, "bits", to_string(w.method), std::nullopt, eps_of(o.eps)});
    };
    row("measurement", m.measurement);
    row("reset given S'", m.reset_given_sout);
    row("reset given R", m.reset_given_ref);
    rep.results.push_back({"subunital", m.subunital ? 1.0 : 0.0, "bool", "", std::nullopt, std::nullopt});
    if (m.single_kraus)
      rep.results.push_back({"identity defect", m.identity_defect, "bits", "", std::nullopt, std::nullopt});
    return rep;
  };

  auto* feasible = app.add_subcommand("feasible", "Gibbs-preserving (optionally covariant) state transition");
  feasible->add_option("--rho", o.rho, "initial state")->required();
  feasible->add_option("--sigma", o.sigma, "target state")->required();
  feasible->add_option("--gamma", o.gamma, "Gamma operator")->required();
  feasible->add_option("--covariant", o.covariant, "Hamiltonian the channel must commute with");
  actions[feasible] = [&] {
    SubnormalizedState a = load_state(file(o.rho), tol), b = load_state(file(o.sigma), tol);
    GammaOperator g = load_gamma(file(o.gamma), tol);
    std::optional<HermitianOperator> h;
    if (!o.covariant.empty()) h = load_operator(file(o.covariant), tol);
    TransitionResult t = transition_feasible(a, b, g, h, tol);
    Report rep;
    rep.results.push_back({"feasible", t.feasible ? 1.0 : 0.0, "bool", h ? "covariant SDP" : "SDP", std::nullopt,
                           std::nullopt});
    rep.results.push_back({"slack", t.slack, "", "", std::nullopt, std::nullopt});
    rep.results.push_back({"certificate", t.certificate, "", "dual bound", std::nullopt, std::nullopt});
    if (!t.note.empty()) rep.warnings.push_back(t.note);
    return rep;
  };

  auto* major = app.add_subcommand("thermo-major", "thermo-majorization of p over q relative to Gibbs weights");
  major->add_option("--p", o.p, "initial distribution")->delimiter(',')->required();
  major->add_option("--q", o.q, "target distribution")->delimiter(',')->required();
  major->add_option("--gibbs", o.gibbs, "Gibbs weights")->delimiter(',')->required();
  major->add_option("--slack", o.slack, "accepted deviation, absorbs rounding of decimal inputs")->capture_default_str();
  actions[major] = [&] {
    ThermoMajorization t = thermo_majorization(to_vec(o.p), to_vec(o.q), to_vec(o.gibbs), tol, o.slack);
    Report rep;
    rep.results.push_back({"thermo_majorizes", t.lp ? 1.0 : 0.0, "bool", "LP", std::nullopt, std::nullopt});
    rep.results.push_back({"lorentz", t.lorentz ? 1.0 : 0.0, "bool", "Lorentz curve", std::nullopt, std::nullopt});
    rep.results.push_back({"lp slack", t.lp_slack, "", "", std::nullopt, std::nullopt});
    return rep;
  };

  auto* reverse = app.add_subcommand("reverse", "reverse process of a channel");
  reverse->add_option("--channel", o.channel, "Choi matrix file")->required();
  reverse->add_option("--gamma-x", o.gamma_x, "Gamma operator on the input")->required();
  reverse->add_option("--gamma-xp", o.gamma_xp, "Gamma operator on the output")->required();
  reverse->add_option("--yield", o.yield, "yield y with E(Gamma_X) <= 2^-y Gamma_X'");
  reverse->add_option("--out", o.out_path, "write the reverse Choi matrix here");
  actions[reverse] = [&] {
    ChoiChannel e = load_channel(file(o.channel), tol);
    GammaOperator gx = load_gamma(file(o.gamma_x), tol), gxp = load_gamma(file(o.gamma_xp), tol);
    ChoiChannel r = reverse_process(e, gx, gxp, o.yield, tol);
    if (!o.out_path.empty()) write_matrix_file(o.out_path, to_file(r));
    Report rep;
    rep.results.push_back({"yield margin", yield_margin(e, gx, gxp, o.yield), "", "", std::nullopt, std::nullopt});
    rep.results.push_back({"tp defect", r.tp_defect(), "", "", std::nullopt, std::nullopt});
    rep.results.push_back({"tni excess", r.tni_excess(), "", "", std::nullopt, std::nullopt});
    rep.results.push_back({"cp defect", r.cp_defect(), "", "", std::nullopt, std::nullopt});
    return rep;
  };

  auto* dilate = app.add_subcommand("dilate", "Gamma-preserving dilation of a Gamma-sub-preserving map");
  dilate->add_option("--channel", o.channel, "Choi matrix of the sub-preserving map K -> L")->required();
  dilate->add_option("--gamma-k", o.gamma_k, "Gamma operator on K")->required();
  dilate->add_option("--gamma-l", o.gamma_l, "Gamma operator on L")->required();
  dilate->add_option("--k", o.k_index, "post-selected basis index on K");
  dilate->add_option("--l", o.l_index, "prepared basis index on L");
  dilate->add_option("--out", o.out_path, "write the dilation's Choi matrix here");
  actions[dilate] = [&] {
    Dilation d = dilate_subpreserving(load_channel(file(o.channel), tol), load_gamma(file(o.gamma_k), tol),
                                      load_gamma(file(o.gamma_l), tol), o.k_index, o.l_index, tol);
    if (!o.out_path.empty()) write_matrix_file(o.out_path, to_file(d.phi));
    Report rep;
    rep.results.push_back({"gamma preserving", d.report.verdict ? 1.0 : 0.0, "bool", "", std::nullopt, std::nullopt});
    rep.results.push_back({"post-selection error", d.post_selection_error, "", "", std::nullopt, std::nullopt});
    rep.results.push_back({"tp defect", d.report.tp_defect, "", "", std::nullopt, std::nullopt});
    rep.results.push_back({"gamma error", d.report.gamma_error, "", "", std::nullopt, std::nullopt});
    return rep;
  };

  auto* potential = app.add_subcommand("potential", "natural thermodynamic potential -log2 tr(P Gamma)");
  potential->add_option("--gamma", o.gamma, "Gamma operator");
  potential->add_option("--projector", o.projector, "projector commuting with Gamma");
  potential->add_option("--toy-gas", o.toy_gas, "number of two-level systems");
  potential->add_option("--energy", o.energy, "number of excitations (with --toy-gas)");
  potential->add_option("--repetition", o.repetition, "n,m for n logical bits in m-bit blocks")->delimiter(',');
  potential->add_option("--x", o.bits, "logical bit string (with --repetition)")->delimiter(',');
  actions[potential] = [&] {
    Report rep;
    const int modes = !o.projector.empty() + (o.toy_gas > 0) + !o.repetition.empty();
    if (modes != 1) throw InputError("potential: give exactly one of --projector, --toy-gas, --repetition");
    if (!o.projector.empty()) {
      if (o.gamma.empty()) throw InputError("potential: --projector needs --gamma");
      ThermoState ts(load_operator(file(o.projector), tol).mat(), load_gamma(file(o.gamma), tol));
      rep.results.push_back({"Lambda", natural_potential(ts), "bits", "trace", std::nullopt, std::nullopt});
      rep.results.push_back({"Omega", ts.omega(), "", "", std::nullopt, std::nullopt});
    } else if (o.toy_gas > 0) {
      MicrocanonicalToy t = microcanonical_toy(o.toy_gas, o.energy);
      rep.results.push_back({"Lambda", t.lambda, "bits", "binomial count", std::nullopt, std::nullopt});
      rep.results.push_back({"Omega", static_cast<double>(t.omega), "", "", std::nullopt, std::nullopt});
    } else {
      if (o.repetition.size() != 2) throw InputError("potential: --repetition takes n,m");
      std::vector<int> x = o.bits.empty() ? std::vector<int>(o.repetition[0], 0) : o.bits;
      RepetitionCode rc = repetition_code(o.repetition[0], o.repetition[1], x);
      rep.results.push_back({"Lambda", rc.lambda, "bits", "majority preimages", std::nullopt, std::nullopt});
      rep.results.push_back({"Omega", static_cast<double>(rc.z), "", "", std::nullopt, std::nullopt});
    }
    return rep;
  };

  auto* demo = app.add_subcommand("demo", "paper-numbers (acceptance battery) or toy-gas");
  demo->add_option("name", o.demo_name, "paper-numbers or toy-gas")->required();
  demo->add_option("--n", o.spins, "number of spins for toy-gas")->capture_default_str();
  actions[demo] = [&] {
    if (o.demo_name == "paper-numbers") return demo_paper_numbers(o.seed);
    if (o.demo_name == "toy-gas") return demo_toy_gas(o.spins);
    throw InputError("demo: unknown demo '" + o.demo_name + "'");
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    const Format fmt = parse_format(o.format);
    const Units units = parse_units(o.units);
    for (auto& [sub, action] : actions) {
      if (!sub->parsed()) continue;
      Report rep = action();
      std::vector<std::string> args(argv + 1, argv + argc);
      rep.command = "ssqt-cli";
      for (const auto& a : args) rep.command += " " + a;
      rep.inputs_digest = digest(args, files);
      out << render(rep, fmt, units);
      return 0;
    }
    err << "error: no subcommand\n";
    return 1;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    err << "internal consistency check failed: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ssqt::cli
