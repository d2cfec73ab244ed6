// Copyright 2026 The cpseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cpseq/cpseq.hpp"

namespace cpseq::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kInfeasible = 2, kIoError = 3 };

/// Radians from "1.25", "pi", "-pi", "2pi", "pi/2", "3pi/4", "0.5pi", "3*pi/2".
inline double parse_angle(std::string text) {
  std::erase_if(text, [](unsigned char c) { return std::isspace(c); });
  const std::string original = text;
  auto bad = [&]() { return DomainError("cannot parse angle '" + original + "'"); };
  if (text.empty()) throw bad();

  auto parse_number = [&](const std::string& s) {
    if (s.empty() || s[0] == '-' || s[0] == '+') throw bad();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) throw bad();
    return v;
  };

  double denom = 1.0;
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    denom = parse_number(text.substr(slash + 1));
    if (denom == 0.0) throw bad();
    text.erase(slash);
  }
  double sign = 1.0;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    if (text[0] == '-') sign = -1.0;
    text.erase(0, 1);
  }
  double value = 0.0;
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    text.erase(text.size() - 2);
    if (!text.empty() && text.back() == '*') text.pop_back();
    value = (text.empty() ? 1.0 : parse_number(text)) * kPi;
  } else {
    value = parse_number(text);
  }
  return sign * value / denom;
}

struct RunConfig {
  std::string command;
  std::string family = "wn";
  int n = 1;
  int m = 1;
  int p = 1;
  int q = 2;
  int r = 1;
  std::string theta = "pi";
  std::string alpha = "0";
  double eps = 0.1;
  double eps_min = 0.0;
  double eps_max = 0.3;
  int count = 60;
  std::string sequence_path;
  std::string out_path;
  std::string baseline_path;
  std::string format = "text";
  bool plain = false;

  FamilySpec family_spec() const {
    FamilySpec f;
    if (family == "wn") f = FamilySpec::wn(n);
    else if (family == "wm") f = FamilySpec::wm(m);
    else if (family == "fivepulse") f = FamilySpec::five_pulse(p, q, r);
    else throw DomainError("unknown family '" + family + "'");
    f.validate();
    return f;
  }
  TargetRotation target() const { return TargetRotation(parse_angle(theta), parse_angle(alpha)); }
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string num(double v) { return fmt::format("{:.17g}", v); }

inline PulseSequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sequence file '" + path + "'");
  return read_pulses(in);
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline nlohmann::json pulses_json(const PulseSequence& seq) {
  auto arr = nlohmann::json::array();
  for (const Pulse& p : seq) arr.push_back({{"angle", p.angle()}, {"phase", p.phase()}});
  return arr;
}

inline nlohmann::json target_json(const TargetRotation& t) { return {{"theta", t.theta}, {"alpha", t.alpha}}; }

/// A labelled corrector, from a file or from the design of the configured family.
struct Subject {
  std::string label;
  PulseSequence sequence;
  std::optional<DesignResult> design;
};

inline std::vector<Subject> subjects(const RunConfig& cfg, const TargetRotation& target, bool all_solutions) {
  if (!cfg.sequence_path.empty()) return {{"sequence", load_sequence(cfg.sequence_path), std::nullopt}};
  const FamilySpec fam = cfg.family_spec();
  std::vector<Subject> out;
  if (!all_solutions) {
    DesignResult d = design_family(fam, target);
    out.push_back({fam.label(), d.sequence, d});
    return out;
  }
  const auto all = design_all(fam, target);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string label = all.size() == 1 ? fam.label() : fmt::format("{}#{}", fam.label(), i);
    out.push_back({label, all[i].sequence, all[i]});
  }
  return out;
}

inline std::string sweep_csv(const SweepTable& t) {
  std::string s = "epsilon,fidelity,infidelity\n";
  for (const auto& row : t.rows) s += fmt::format("{:.17g},{:.17g},{:.17g}\n", row.epsilon, row.fidelity, row.infidelity);
  return s;
}

inline nlohmann::json sweep_json(const SweepTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& row : t.rows)
    rows.push_back({{"epsilon", row.epsilon}, {"fidelity", row.fidelity}, {"infidelity", row.infidelity}});
  return {{"label", t.label}, {"rows", rows}};
}

inline std::string sweep_text(const SweepTable& t) {
  std::string s = fmt::format("# {}\n{:>12} {:>22} {:>22}\n", t.label, "epsilon", "fidelity", "infidelity");
  for (const auto& row : t.rows) s += fmt::format("{:>12.6g} {:>22.17g} {:>22.17g}\n", row.epsilon, row.fidelity, row.infidelity);
  return s;
}

}  // namespace detail

inline int cmd_design(const RunConfig& cfg, std::ostream& out) {
  const TargetRotation target = cfg.target();
  const FamilySpec fam = cfg.family_spec();
  const auto designs = design_all(fam, target);
  std::string text;
  if (cfg.format == "json") {
    auto arr = nlohmann::json::array();
    for (const auto& d : designs)
      arr.push_back({{"label", fam.label()},
                     {"phases", d.phases},
                     {"mirror_phases", d.mirror_phases},
                     {"closed_form", d.closed_form},
                     {"branch", d.branch},
                     {"derivative_residual", d.derivative_residual},
                     {"identity_residual", d.identity_residual},
                     {"pulses", detail::pulses_json(d.sequence)}});
    text = nlohmann::json{{"target", detail::target_json(target)}, {"designs", arr}}.dump(2) + "\n";
  } else if (cfg.format == "csv") {
    text = "label,index,phi1,phi2,phi3,derivative_residual,identity_residual,closed_form\n";
    for (std::size_t i = 0; i < designs.size(); ++i) {
      const auto& d = designs[i];
      text += fmt::format("{},{},{},{},{},{:.3e},{:.3e},{}\n", fam.label(), i, detail::num(d.phases[0]),
                          detail::num(d.phases[1]), d.phases.size() > 2 ? detail::num(d.phases[2]) : "",
                          d.derivative_residual, d.identity_residual, d.closed_form ? 1 : 0);
    }
  } else {
    text = fmt::format("# family {} target theta={} alpha={}\n", fam.label(), detail::num(target.theta),
                       detail::num(target.alpha));
    for (std::size_t i = 0; i < designs.size(); ++i) {
      const auto& d = designs[i];
      text += fmt::format("# solution {}{}\n", i,
                          d.closed_form ? fmt::format(" (closed form, branch {:+d})", d.branch) : "");
      for (std::size_t k = 0; k < d.phases.size(); ++k)
        text += fmt::format("# phi{} = {} rad ({:.6f} deg)\n", k + 1, detail::num(d.phases[k]),
                            d.phases[k] * 180.0 / kPi);
      if (!d.mirror_phases.empty()) {
        text += "# mirror:";
        for (double ph : d.mirror_phases) text += " " + detail::num(ph);
        text += "\n";
      }
      text += fmt::format("# derivative_residual = {:.3e}\n# identity_residual = {:.3e}\n",
                          d.derivative_residual, d.identity_residual);
      text += format_pulses(d.sequence);
    }
  }
  detail::write_output(cfg.out_path, text, out);
  return kOk;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const TargetRotation target = cfg.target();
  const auto subj = detail::subjects(cfg, target, false).front();
  const PulseSequence full = embed_target(subj.sequence, target, 1.0);
  const Unitary2 u = compile(full, ErrorModel(cfg.eps));
  const Unitary2 bare = compile(PulseSequence{target.pulse()}, ErrorModel(cfg.eps));
  const double f = fidelity(u, target.ideal());
  const double inf = infidelity(u, target.ideal());
  std::string text;
  if (cfg.format == "json") {
    auto entries = nlohmann::json::array();
    for (const cplx& e : u.matrix().entries()) entries.push_back({e.real(), e.imag()});
    text = nlohmann::json{{"label", subj.label},
                          {"target", detail::target_json(target)},
                          {"epsilon", cfg.eps},
                          {"unitary", entries},
                          {"fidelity", f},
                          {"infidelity", inf},
                          {"plain_fidelity", fidelity(bare, target.ideal())},
                          {"pulses", detail::pulses_json(full)}}
               .dump(2) +
           "\n";
  } else {
    text = fmt::format("label {}\nepsilon {}\n", subj.label, detail::num(cfg.eps));
    for (int row = 0; row < 2; ++row)
      text += fmt::format("[{:+.12f}{:+.12f}i  {:+.12f}{:+.12f}i]\n", u(row, 0).real(), u(row, 0).imag(),
                          u(row, 1).real(), u(row, 1).imag());
    text += fmt::format("fidelity {}\ninfidelity {}\nplain_fidelity {}\n", detail::num(f), detail::num(inf),
                        detail::num(fidelity(bare, target.ideal())));
  }
  detail::write_output(cfg.out_path, text, out);
  return kOk;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const TargetRotation target = cfg.target();
  if (!(cfg.eps_max > cfg.eps_min) || cfg.count < 2) throw DomainError("sweep: need eps-min < eps-max and count >= 2");
  const auto grid = linear_grid(cfg.eps_min, cfg.eps_max, cfg.count);
  const SweepTable plain = sweep_plain(target, grid);
  SweepTable table = plain;
  if (!cfg.plain) {
    const auto subj = detail::subjects(cfg, target, false).front();
    table = sweep(subj.sequence, target, grid, subj.label);
  }
  auto render = [&](const SweepTable& t) {
    if (cfg.format == "json") return detail::sweep_json(t).dump(2) + "\n";
    if (cfg.format == "text") return detail::sweep_text(t);
    return detail::sweep_csv(t);
  };
  detail::write_output(cfg.out_path, render(table), out);
  if (!cfg.baseline_path.empty()) detail::write_output(cfg.baseline_path, render(plain), out);
  return kOk;
}

inline int cmd_coeff(const RunConfig& cfg, std::ostream& out) {
  const TargetRotation target = cfg.target();
  std::vector<std::pair<std::string, FitReport>> fits;
  if (cfg.plain) {
    fits.emplace_back("plain", fit_plain(target));
  } else {
    for (const auto& s : detail::subjects(cfg, target, true)) fits.emplace_back(s.label, fit_sequence(s.sequence, target));
  }
  std::string text;
  if (cfg.format == "json") {
    auto arr = nlohmann::json::array();
    for (const auto& [label, f] : fits)
      arr.push_back({{"label", label},
                     {"fitted_C", f.coefficient},
                     {"fitted_order", f.order},
                     {"r_squared", f.r_squared},
                     {"eps_min", f.eps_min},
                     {"eps_max", f.eps_max}});
    text = arr.dump(2) + "\n";
  } else {
    text = "label,fitted_C,fitted_order,r_squared\n";
    for (const auto& [label, f] : fits)
      text += fmt::format("{},{},{},{}\n", label, detail::num(f.coefficient), detail::num(f.order), detail::num(f.r_squared));
  }
  detail::write_output(cfg.out_path, text, out);
  return kOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const TargetRotation target = cfg.target();
  std::string text;
  int failures = 0;
  auto check = [&](const std::string& label, const std::string& name, bool ok, const std::string& detail) {
    text += fmt::format("{} {} {}: {}\n", ok ? "PASS" : "FAIL", label, name, detail);
    if (!ok) ++failures;
  };
  for (const auto& s : detail::subjects(cfg, target, true)) {
    const double idr = identity_residual(s.sequence);
    check(s.label, "identity", idr < kIdentityTolerance, fmt::format("{:.3e} < {:.0e}", idr, kIdentityTolerance));
    const PulseSequence full = embed_target(s.sequence, target, 1.0);
    const Su2Vector dv = derivative_vector(full);
    check(s.label, "derivative", dv.norm() < kDerivativeTolerance,
          fmt::format("{:.3e} < {:.0e}", dv.norm(), kDerivativeTolerance));
    const Su2Vector fd = derivative_vector_central_difference(full, 1e-5);
    const double scale = std::max(dv.norm(), 1.0);
    check(s.label, "finite-difference", (fd - dv).norm() <= 1e-6 * scale,
          fmt::format("|fd - analytic| = {:.3e}", (fd - dv).norm()));
    try {
      const FitReport f = fit_sequence(s.sequence, target);
      check(s.label, "order", std::abs(f.order - 6.0) <= 0.05 && f.r_squared > 0.9999,
            fmt::format("order {:.4f}, r^2 {:.8f}", f.order, f.r_squared));
      const bool single_block = s.sequence.size() == 3 && std::abs(s.sequence[0].angle() - kPi) < 1e-12 &&
                                std::abs(s.sequence[1].angle() - kTwoPi) < 1e-12;
      if (single_block) {
        const double c = analytic_c(s.sequence[1].phase() - s.sequence[0].phase());
        check(s.label, "analytic-C", std::abs(f.coefficient - c) <= 0.01 * c,
              fmt::format("fitted {:.6f} vs analytic {:.6f}", f.coefficient, c));
      }
    } catch (const FitWindowError& e) {
      check(s.label, "order", false, e.what());
    }
  }
  text += failures == 0 ? "all checks passed\n" : fmt::format("{} check(s) failed\n", failures);
  detail::write_output(cfg.out_path, text, out);
  return failures == 0 ? kOk : kVerifyFailed;
}

inline int cmd_table1(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto rows = reproduce_table1();
  std::string text = "label,fitted_C,fitted_order,paper_C,rel_err\n";
  bool ok = true;
  for (const auto& row : rows) {
    text += fmt::format("{},{:.6f},{:.6f},{:.1f},{:.6f}\n", row.label, row.fit.coefficient, row.fit.order,
                        row.reference_c, row.rel_err);
    if (!row.within_tolerance) {
      ok = false;
      err << fmt::format("{}: fitted C {:.4f} differs from {:.1f} by {:.3f}% (tolerance {:.1f}%)\n", row.label,
                         row.fit.coefficient, row.reference_c, 100.0 * row.rel_err, 100.0 * kTable1Tolerance);
    }
  }
  detail::write_output(cfg.out_path, text, out);
  return ok ? kOk : kVerifyFailed;
}

/// Runs one command line; never throws.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite pulse design and pulse-length error analysis", "cpseq"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool family = true) {
    if (family) {
      sub->add_option("--family", cfg.family, "Sequence family")->check(CLI::IsMember({"wn", "wm", "fivepulse"}));
      sub->add_option("--n", cfg.n, "Copies for the Wn family");
      sub->add_option("--m", cfg.m, "Index for the Wm family");
      sub->add_option("--p", cfg.p, "Five-pulse p");
      sub->add_option("--q", cfg.q, "Five-pulse q");
      sub->add_option("--r", cfg.r, "Five-pulse r");
      sub->add_option("--theta", cfg.theta, "Target rotation angle (radians, or e.g. pi, pi/2, 3pi/4)");
      sub->add_option("--alpha", cfg.alpha, "Target axis phase");
    }
    sub->add_option("--out", cfg.out_path, "Output path (default stdout)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
  };

  auto* design = app.add_subcommand("design", "Compute corrector phases");
  add_common(design);
  auto* simulate = app.add_subcommand("simulate", "Compile a corrected gate at one error value");
  add_common(simulate);
  simulate->add_option("--sequence", cfg.sequence_path, "Corrector in pulse text form");
  simulate->add_option("--eps", cfg.eps, "Fractional pulse-length error");
  auto* sweep_cmd = app.add_subcommand("sweep", "Fidelity against error");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--sequence", cfg.sequence_path, "Corrector in pulse text form");
  sweep_cmd->add_option("--eps-min", cfg.eps_min, "Grid start");
  sweep_cmd->add_option("--eps-max", cfg.eps_max, "Grid end");
  sweep_cmd->add_option("--count", cfg.count, "Grid points");
  sweep_cmd->add_option("--baseline", cfg.baseline_path, "Also write the bare-pulse table here");
  sweep_cmd->add_flag("--plain", cfg.plain, "Sweep the bare pulse instead");
  auto* coeff = app.add_subcommand("coeff", "Fit error order and leading coefficient");
  add_common(coeff);
  coeff->add_option("--sequence", cfg.sequence_path, "Corrector in pulse text form");
  coeff->add_flag("--plain", cfg.plain, "Fit the bare pulse instead");
  auto* verify = app.add_subcommand("verify", "Check design invariants");
  add_common(verify);
  verify->add_option("--sequence", cfg.sequence_path, "Corrector in pulse text form");
  auto* table1 = app.add_subcommand("table1", "Reproduce the published coefficient table");
  add_common(table1, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    if (cfg.command == "design") return cmd_design(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    if (cfg.command == "sweep") return cmd_sweep(cfg, out);
    if (cfg.command == "coeff") return cmd_coeff(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "table1") return cmd_table1(cfg, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  return kInfeasible;
}

}  // namespace cpseq::cli
