#include "qdc/cli.hpp"

#include "qdc/construct.hpp"
#include "qdc/grid.hpp"
#include "qdc/interp.hpp"
#include "qdc/io.hpp"
#include "qdc/rectcalc.hpp"
#include "qdc/sklar.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <stdexcept>

namespace qdc::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kUsage =
    "usage: qdc <command> [files...] [options]\n"
    "  check dist <F>\n"
    "  check imprecise <P> <Q>\n"
    "  check coherence <A> <B> [--max-rects K] [--exact]\n"
    "  construct sandwich <A> <B> [--method lp|patch]\n"
    "  sklar decompose <F> [--out FILE]\n"
    "  sklar compose <C> <FX> <FY> [--out FILE]\n"
    "  pbox build <P> <Q> <FX> <FY> [--max-rects K] [--exact]\n"
    "      [--out-lower FILE] [--out-upper FILE]\n"
    "  pbox member <A> <B> <F>\n"
    "  family analyze <F1> [F2 ...] [--max-rects K] [--exact]\n"
    "  reflect <F> --axis x|y [--out FILE]\n"
    "  envelope <F1> [F2 ...] [--out-lower FILE] [--out-upper FILE]\n"
    "options: --verify re-checks every reported witness through the library\n";

struct Options {
  std::vector<std::string> files;
  std::size_t max_rects = 3;
  bool exact = false;
  bool verify = false;
  std::string method = "lp";
  std::string axis;
  std::string out, out_lower, out_upper;
};

Options parse_options(const std::vector<std::string>& args, std::size_t from) {
  Options opt;
  for (std::size_t k = from; k < args.size(); ++k) {
    const std::string& a = args[k];
    auto take_value = [&](const char* flag) -> std::string {
      if (k + 1 >= args.size())
        throw std::invalid_argument(std::string("missing value for ") + flag);
      return args[++k];
    };
    if (a == "--max-rects") {
      const std::string v = take_value("--max-rects");
      std::size_t pos = 0;
      unsigned long parsed = 0;
      try {
        parsed = std::stoul(v, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("--max-rects: not a number: " + v);
      }
      if (pos != v.size() || parsed == 0)
        throw std::invalid_argument("--max-rects: need a positive integer, got " + v);
      opt.max_rects = parsed;
    } else if (a == "--exact") {
      opt.exact = true;
    } else if (a == "--verify") {
      opt.verify = true;
    } else if (a == "--method") {
      opt.method = take_value("--method");
      if (opt.method != "lp" && opt.method != "patch")
        throw std::invalid_argument("--method: expected lp or patch, got " + opt.method);
    } else if (a == "--axis") {
      opt.axis = take_value("--axis");
      if (opt.axis != "x" && opt.axis != "y")
        throw std::invalid_argument("--axis: expected x or y, got " + opt.axis);
    } else if (a == "--out") {
      opt.out = take_value("--out");
    } else if (a == "--out-lower") {
      opt.out_lower = take_value("--out-lower");
    } else if (a == "--out-upper") {
      opt.out_upper = take_value("--out-upper");
    } else if (!a.empty() && a[0] == '-') {
      throw std::invalid_argument("unknown option: " + a);
    } else {
      opt.files.push_back(a);
    }
  }
  return opt;
}

std::size_t effective_max_rects(const Options& opt, const Mesh& mesh) {
  return opt.exact ? std::max(opt.max_rects, cell_count(mesh)) : opt.max_rects;
}

Json point_json(const GridFunction& f, GridPoint p) {
  return Json::array({f.mesh().x().at(p.i).str(), f.mesh().y().at(p.j).str()});
}

Json rect_json(const GridFunction& f, const IndexRect& r) {
  return Json::array({f.mesh().x().at(r.i1()).str(), f.mesh().y().at(r.j1()).str(),
                      f.mesh().x().at(r.i2()).str(), f.mesh().y().at(r.j2()).str()});
}

Json gaggle_json(const GridFunction& f, const RectGaggle& g) {
  Json out = Json::array();
  for (const IndexRect& r : g.members()) out.push_back(rect_json(f, r));
  return out;
}

Json embed(const std::string& canonical_json) { return Json::parse(canonical_json); }

Json classification_json(const GridFunction& f, const Classification& cls) {
  Json out;
  out["A"] = cls.holds_a;
  out["B"] = cls.holds_b;
  out["C"] = cls.holds_c;
  if (cls.a_witness) {
    out["a_witness"] = {{"point", point_json(f, cls.a_witness->point)},
                        {"value", format_rational(cls.a_witness->value)},
                        {"what", cls.a_witness->what}};
  }
  if (cls.b_witness) {
    out["b_witness"] = {{"rect", rect_json(f, cls.b_witness->rect)},
                        {"volume", format_rational(cls.b_witness->volume)}};
  }
  if (cls.c_witness) {
    out["c_witness"] = {{"rect", rect_json(f, cls.c_witness->rect)},
                        {"volume", format_rational(cls.c_witness->volume)}};
  }
  return out;
}

Json bound_json(const GridFunction& f, const BoundValue& bv) {
  Json out;
  out["value"] = bv.infinite ? "inf" : format_rational(bv.value);
  out["exact"] = bv.exact;
  if (bv.witness) out["witness"] = gaggle_json(f, *bv.witness);
  return out;
}

Json coherence_json(const GridFunction& f, const CoherenceReport& rep) {
  Json out;
  out["feasible"] = rep.feasible;
  if (rep.infeasibility) {
    out["certificate"] = {{"gaggle", gaggle_json(f, rep.infeasibility->first)},
                          {"l_value", format_rational(rep.infeasibility->second)}};
  }
  if (rep.feasible) {
    out["sup_attained"] = rep.sup_attained;
    out["inf_attained"] = rep.inf_attained;
    Json failures = Json::array();
    for (const BoundFailure& bf : rep.failures) {
      failures.push_back({{"point", point_json(f, bf.point)},
                          {"side", bf.side == CornerSide::opposite ? "opposite" : "main"},
                          {"difference", format_rational(bf.difference)},
                          {"bound", bound_json(f, bf.bound)}});
    }
    out["failures"] = std::move(failures);
  }
  out["exact"] = rep.exact;
  out["coherent"] = rep.coherent;
  return out;
}

void verify_or_fail(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("--verify failed: " + what);
}

void verify_coherence(const GridFunction& a, const GridFunction& b, const CoherenceReport& rep) {
  if (rep.infeasibility)
    verify_or_fail(l_value(a, b, rep.infeasibility->first) == rep.infeasibility->second &&
                       rep.infeasibility->second < 0,
                   "infeasibility certificate");
  if (rep.witness) {
    verify_or_fail(classify(*rep.witness).holds_c, "sandwich witness condition (C)");
  }
  for (const BoundFailure& bf : rep.failures) {
    if (!bf.bound.witness) continue;
    MultiplicityMap m = multiplicity(*bf.bound.witness);
    const int mm = m.at(bf.point);
    verify_or_fail(mm != 0, "bound witness multiplicity");
    const int d = mm < 0 ? -mm : mm;
    verify_or_fail(l_value(a, b, *bf.bound.witness) == bf.bound.value * d,
                   "bound witness value");
  }
}

struct Command {
  Json report;
  int exit_code = 0;
};

Command cmd_check_dist(const Options& opt) {
  if (opt.files.size() != 1) throw std::invalid_argument("check dist: need exactly one grid file");
  GridFunction f = load_grid(opt.files[0]);
  Classification cls = classify(f);
  Command cmd;
  cmd.report["classification"] = classification_json(f, cls);
  std::string verdict = !cls.holds_a  ? "not grounded"
                        : !cls.holds_b ? "grounded, not a quasi-distribution"
                        : !cls.holds_c ? "quasi-distribution, not a distribution"
                                       : "distribution";
  cmd.report["verdict"] = verdict;
  cmd.exit_code = cls.holds_c ? 0 : 1;
  if (opt.verify) {
    if (cls.b_witness)
      verify_or_fail(volume(f, cls.b_witness->rect) == cls.b_witness->volume &&
                         cls.b_witness->volume < 0,
                     "condition (B) witness");
    if (cls.c_witness)
      verify_or_fail(volume(f, cls.c_witness->rect) == cls.c_witness->volume &&
                         cls.c_witness->volume < 0,
                     "condition (C) witness");
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_check_imprecise(const Options& opt) {
  if (opt.files.size() != 2)
    throw std::invalid_argument("check imprecise: need exactly two grid files");
  GridFunction p = load_grid(opt.files[0]);
  GridFunction q = load_grid(opt.files[1]);
  ICReport rep = check_imprecise(p, q);
  Command cmd;
  Json axioms;
  auto emit = [&](const char* name, bool ok, const std::optional<ICWitness>& w) {
    axioms[name] = ok;
    if (w) {
      axioms[std::string(name) + "_witness"] = {{"rect", rect_json(p, w->rect)},
                                                {"value", format_rational(w->value)}};
    }
  };
  emit("IC1", rep.ic1, rep.ic1_witness);
  emit("IC2", rep.ic2, rep.ic2_witness);
  emit("IC3", rep.ic3, rep.ic3_witness);
  emit("IC4", rep.ic4, rep.ic4_witness);
  cmd.report["axioms"] = std::move(axioms);
  cmd.report["verdict"] = rep.all() ? "imprecise copula" : "not an imprecise copula";
  cmd.exit_code = rep.all() ? 0 : 1;
  if (opt.verify) {
    auto recheck = [&](const std::optional<ICWitness>& w, int which) {
      if (!w) return;
      const IndexRect& r = w->rect;
      Rational v;
      switch (which) {
        case 1: v = p.at(r.sw()) + q.at(r.ne()) - p.at(r.se()) - p.at(r.nw()); break;
        case 2: v = q.at(r.sw()) + p.at(r.ne()) - p.at(r.se()) - p.at(r.nw()); break;
        case 3: v = q.at(r.sw()) + q.at(r.ne()) - q.at(r.se()) - p.at(r.nw()); break;
        default: v = q.at(r.sw()) + q.at(r.ne()) - p.at(r.se()) - q.at(r.nw()); break;
      }
      verify_or_fail(v == w->value && v < 0, "IC witness");
    };
    recheck(rep.ic1_witness, 1);
    recheck(rep.ic2_witness, 2);
    recheck(rep.ic3_witness, 3);
    recheck(rep.ic4_witness, 4);
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_check_coherence(const Options& opt) {
  if (opt.files.size() != 2)
    throw std::invalid_argument("check coherence: need exactly two grid files");
  GridFunction a = load_grid(opt.files[0]);
  GridFunction b = load_grid(opt.files[1]);
  CoherenceReport rep = check_coherence(a, b, effective_max_rects(opt, a.mesh()));
  Command cmd;
  cmd.report["coherence"] = coherence_json(a, rep);
  cmd.report["verdict"] = rep.coherent ? "coherent" : "not coherent";
  cmd.exit_code = rep.coherent ? 0 : 1;
  if (opt.verify) {
    verify_coherence(a, b, rep);
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_construct_sandwich(const Options& opt) {
  if (opt.files.size() != 2)
    throw std::invalid_argument("construct sandwich: need exactly two grid files");
  GridFunction a = load_grid(opt.files[0]);
  GridFunction b = load_grid(opt.files[1]);
  Command cmd;
  cmd.report["method"] = opt.method;

  std::optional<GridFunction> witness;
  std::optional<std::pair<RectGaggle, Rational>> certificate;
  if (opt.method == "patch") {
    validate_sandwich_inputs(a, b);
    QReport qr = check_q(a, b, cell_count(a.mesh()));
    if (!qr.q2) {
      certificate = qr.q2_witness;
    } else {
      PatchTrace trace = patch_sweep(a, b, opt.max_rects);
      Json steps = Json::array();
      for (const PatchStep& s : trace.steps) {
        steps.push_back({{"point", point_json(a, s.point)},
                         {"t", format_rational(s.amount)}});
      }
      cmd.report["trace"] = std::move(steps);
      witness = trace.final;
    }
  } else {
    FeasibilityCertificate cert = sandwich_decide(a, b);
    if (cert.verdict == Feasibility::feasible) {
      witness = cert.witness;
    } else {
      certificate = cert.certificate;
    }
  }

  if (witness) {
    cmd.report["verdict"] = "feasible";
    cmd.report["witness"] = embed(grid_to_json(*witness));
    cmd.exit_code = 0;
    if (opt.verify) {
      verify_or_fail(classify(*witness).holds_c, "witness condition (C)");
      auto mw = margins(*witness);
      auto ml = margins(a);
      verify_or_fail(mw.first == ml.first && mw.second == ml.second, "witness margins");
      bool inside = true;
      for (std::size_t i = 0; i < a.nx(); ++i)
        for (std::size_t j = 0; j < a.ny(); ++j)
          inside = inside && a.at(i, j) <= witness->at(i, j) && witness->at(i, j) <= b.at(i, j);
      verify_or_fail(inside, "witness bounds");
      cmd.report["verified"] = true;
    }
  } else {
    cmd.report["verdict"] = "infeasible";
    cmd.report["certificate"] = {{"gaggle", gaggle_json(a, certificate->first)},
                                 {"l_value", format_rational(certificate->second)}};
    cmd.exit_code = 1;
    if (opt.verify) {
      verify_or_fail(l_value(a, b, certificate->first) == certificate->second &&
                         certificate->second < 0,
                     "infeasibility certificate");
      cmd.report["verified"] = true;
    }
  }
  return cmd;
}

Command cmd_sklar_decompose(const Options& opt) {
  if (opt.files.size() != 1)
    throw std::invalid_argument("sklar decompose: need exactly one grid file");
  GridFunction f = load_grid(opt.files[0]);
  SklarDecomposition dec = sklar_decompose(f);
  Command cmd;
  cmd.report["copula"] = embed(grid_to_json(dec.copula));
  cmd.report["margin_x"] = embed(univariate_to_json(dec.margin_x));
  cmd.report["margin_y"] = embed(univariate_to_json(dec.margin_y));
  if (!opt.out.empty()) save_grid(dec.copula, opt.out);
  if (opt.verify) {
    GridFunction back = sklar_compose(dec.copula, dec.margin_x, dec.margin_y);
    verify_or_fail(back == f, "decompose/compose round trip");
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_sklar_compose(const Options& opt) {
  if (opt.files.size() != 3)
    throw std::invalid_argument("sklar compose: need a copula file and two margin files");
  GridFunction c = load_grid(opt.files[0]);
  UnivariateGrid fx = load_univariate(opt.files[1]);
  UnivariateGrid fy = load_univariate(opt.files[2]);
  GridFunction f = sklar_compose(c, fx, fy);
  Command cmd;
  cmd.report["grid"] = embed(grid_to_json(f));
  if (!opt.out.empty()) save_grid(f, opt.out);
  if (opt.verify) {
    auto [mx, my] = margins(f);
    verify_or_fail(mx == fx && my == fy, "composed margins");
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_pbox_build(const Options& opt) {
  if (opt.files.size() != 4)
    throw std::invalid_argument("pbox build: need two copula files and two margin files");
  GridFunction p = load_grid(opt.files[0]);
  GridFunction q = load_grid(opt.files[1]);
  UnivariateGrid fx = load_univariate(opt.files[2]);
  UnivariateGrid fy = load_univariate(opt.files[3]);
  Command cmd;
  try {
    PBoxBuild built = build_pbox(p, q, fx, fy, effective_max_rects(opt, p.mesh()));
    cmd.report["lower"] = embed(grid_to_json(built.box.lower()));
    cmd.report["upper"] = embed(grid_to_json(built.box.upper()));
    cmd.report["coherence"] = coherence_json(built.box.lower(), built.composed_check);
    cmd.report["verdict"] = "coherent restricted p-box";
    if (!opt.out_lower.empty()) save_grid(built.box.lower(), opt.out_lower);
    if (!opt.out_upper.empty()) save_grid(built.box.upper(), opt.out_upper);
    if (opt.verify) {
      verify_or_fail(classify(built.box.lower()).holds_b && classify(built.box.upper()).holds_b,
                     "box bounds condition (B)");
      cmd.report["verified"] = true;
    }
  } catch (const IncoherentInputError& e) {
    cmd.report["verdict"] = "not coherent";
    cmd.report["error"] = e.what();
    cmd.report["coherence"] = coherence_json(p, e.report);
    cmd.exit_code = 1;
  }
  return cmd;
}

Command cmd_pbox_member(const Options& opt) {
  if (opt.files.size() != 3)
    throw std::invalid_argument("pbox member: need bound files A, B and a grid file F");
  GridFunction a = load_grid(opt.files[0]);
  GridFunction b = load_grid(opt.files[1]);
  GridFunction f = load_grid(opt.files[2]);
  RestrictedPBox box(std::move(a), std::move(b));
  MemberVerdict verdict = pbox_member(box, f);
  Command cmd;
  cmd.report["verdict"] = verdict.member ? "member" : "not a member";
  if (!verdict.member) {
    cmd.report["reason"] = verdict.reason;
    if (verdict.witness) cmd.report["witness_point"] = point_json(f, *verdict.witness);
  }
  cmd.exit_code = verdict.member ? 0 : 1;
  return cmd;
}

Command cmd_family_analyze(const Options& opt) {
  if (opt.files.empty()) throw std::invalid_argument("family analyze: need at least one grid file");
  std::vector<GridFunction> fs;
  fs.reserve(opt.files.size());
  for (const std::string& path : opt.files) fs.push_back(load_grid(path));
  // --exact escalates to every group's own cell cap inside analyze_family.
  FamilyReport rep = analyze_family(
      fs, opt.exact ? std::numeric_limits<std::size_t>::max() : opt.max_rects);
  Command cmd;
  bool all_coherent = true;
  Json groups = Json::array();
  for (const FamilyGroup& g : rep.groups) {
    Json jg;
    jg["members"] = g.members;
    jg["margin_x"] = embed(univariate_to_json(g.margin_x));
    jg["margin_y"] = embed(univariate_to_json(g.margin_y));
    jg["envelope_lower"] = embed(grid_to_json(g.lower_envelope));
    jg["envelope_upper"] = embed(grid_to_json(g.upper_envelope));
    jg["copula_lower"] = embed(grid_to_json(g.copula_lower));
    jg["copula_upper"] = embed(grid_to_json(g.copula_upper));
    jg["coherence"] = coherence_json(g.copula_lower, g.coherence);
    groups.push_back(std::move(jg));
    all_coherent = all_coherent && g.coherence.coherent;
  }
  cmd.report["groups"] = std::move(groups);
  cmd.report["verdict"] = all_coherent ? "all groups coherent" : "incoherent group found";
  cmd.exit_code = all_coherent ? 0 : 1;
  if (opt.verify) {
    for (const FamilyGroup& g : rep.groups) {
      RestrictedPBox box(g.lower_envelope, g.upper_envelope);
      for (std::size_t k : g.members)
        verify_or_fail(pbox_member(box, fs[k]).member, "family member inside envelope box");
    }
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_reflect(const Options& opt) {
  if (opt.files.size() != 1) throw std::invalid_argument("reflect: need exactly one grid file");
  if (opt.axis.empty()) throw std::invalid_argument("reflect: --axis x|y is required");
  GridFunction f = load_grid(opt.files[0]);
  GridFunction r = reflect(f, opt.axis == "x" ? Axis::x : Axis::y);
  Command cmd;
  cmd.report["grid"] = embed(grid_to_json(r));
  if (!opt.out.empty()) save_grid(r, opt.out);
  if (opt.verify) {
    verify_or_fail(reflect(r, opt.axis == "x" ? Axis::x : Axis::y) == f,
                   "double reflection identity");
    cmd.report["verified"] = true;
  }
  return cmd;
}

Command cmd_envelope(const Options& opt) {
  if (opt.files.empty()) throw std::invalid_argument("envelope: need at least one grid file");
  std::vector<GridFunction> fs;
  fs.reserve(opt.files.size());
  for (const std::string& path : opt.files) fs.push_back(load_grid(path));
  auto [lo, hi] = envelope(fs);
  Command cmd;
  cmd.report["lower"] = embed(grid_to_json(lo));
  cmd.report["upper"] = embed(grid_to_json(hi));
  if (!opt.out_lower.empty()) save_grid(lo, opt.out_lower);
  if (!opt.out_upper.empty()) save_grid(hi, opt.out_upper);
  if (opt.verify) {
    bool bounded = true;
    for (const GridFunction& f : fs)
      for (std::size_t t = 0; t < f.values().size(); ++t)
        bounded = bounded && lo.values()[t] <= f.values()[t] && f.values()[t] <= hi.values()[t];
    verify_or_fail(bounded, "envelope bounds every input");
    cmd.report["verified"] = true;
  }
  return cmd;
}

}  // namespace

RunResult run(const std::vector<std::string>& args) {
  Json envelope_doc;
  Json command_echo = Json::array();
  for (const std::string& a : args) command_echo.push_back(a);
  envelope_doc["command"] = std::move(command_echo);

  auto finish = [&](int code, Json body) {
    for (auto& [key, value] : body.items()) envelope_doc[key] = value;
    return RunResult{code, envelope_doc.dump(2) + "\n"};
  };

  try {
    if (args.empty()) throw std::invalid_argument(std::string("no command given\n") + kUsage);
    const std::string& head = args[0];
    auto sub = [&](std::size_t i) -> std::string { return i < args.size() ? args[i] : ""; };

    Command cmd;
    if (head == "check" && sub(1) == "dist") {
      cmd = cmd_check_dist(parse_options(args, 2));
    } else if (head == "check" && sub(1) == "imprecise") {
      cmd = cmd_check_imprecise(parse_options(args, 2));
    } else if (head == "check" && sub(1) == "coherence") {
      cmd = cmd_check_coherence(parse_options(args, 2));
    } else if (head == "construct" && sub(1) == "sandwich") {
      cmd = cmd_construct_sandwich(parse_options(args, 2));
    } else if (head == "sklar" && sub(1) == "decompose") {
      cmd = cmd_sklar_decompose(parse_options(args, 2));
    } else if (head == "sklar" && sub(1) == "compose") {
      cmd = cmd_sklar_compose(parse_options(args, 2));
    } else if (head == "pbox" && sub(1) == "build") {
      cmd = cmd_pbox_build(parse_options(args, 2));
    } else if (head == "pbox" && sub(1) == "member") {
      cmd = cmd_pbox_member(parse_options(args, 2));
    } else if (head == "family" && sub(1) == "analyze") {
      cmd = cmd_family_analyze(parse_options(args, 2));
    } else if (head == "reflect") {
      cmd = cmd_reflect(parse_options(args, 1));
    } else if (head == "envelope") {
      cmd = cmd_envelope(parse_options(args, 1));
    } else {
      throw std::invalid_argument("unknown command: " + head + "\n" + kUsage);
    }
    return finish(cmd.exit_code, std::move(cmd.report));
  } catch (const std::exception& e) {
    Json body;
    body["error"] = e.what();
    return finish(2, std::move(body));
  }
}

}  // namespace qdc::cli
