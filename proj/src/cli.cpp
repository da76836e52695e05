#include "bvk/cli.hpp"

#include "bvk/certificate.hpp"
#include "bvk/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bvk::cli {

namespace {

using nlohmann::json;

struct Options {
  std::size_t depth = 40;
  std::size_t max_level = 12;
  unsigned primes = 97;
  std::size_t ladder_span = 12;
  std::string format = "json";
  std::string out_path;

  ClassifyBounds bounds() const { return ClassifyBounds{depth, max_level, primes, ladder_span}; }
};

json bounds_json(const Options& o) { return to_json(o.bounds()); }

json big_vec(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) {
    if (x >= std::numeric_limits<long long>::min() && x <= std::numeric_limits<long long>::max())
      a.push_back(static_cast<long long>(x));
    else
      a.push_back(x.str());
  }
  return a;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

std::string render(const json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::string out;
  for (const auto& [k, v] : report.items()) out += k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
  return out;
}

json spectrum_json(const SupernaturalTruncation& s) {
  json m = json::object();
  for (const auto& e : s.entries) {
    switch (e.kind) {
      case ValuationKind::Infinity: m[e.p.str()] = "inf"; break;
      case ValuationKind::Exact: m[e.p.str()] = e.value; break;
      case ValuationKind::AtLeast: m[e.p.str()] = ">=" + std::to_string(e.value); break;
    }
  }
  return m;
}

DgElement parse_element(std::size_t level, const std::vector<long long>& entries) {
  IntVector v;
  for (auto x : entries) v.push_back(x);
  return DgElement{level, v};
}

Cell parse_cell(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw InputError("cell must be TOWER:FLOOR, got " + s);
  try {
    return Cell{std::stoul(s.substr(0, colon)), std::stoull(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InputError("bad cell " + s);
  }
}

Path parse_path(const std::string& s) {
  Path p;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dot = item.find('.');
    if (dot == std::string::npos) throw InputError("edge must be TARGET.POSITION, got " + item);
    try {
      p.push_back(Edge{std::stoul(item.substr(0, dot)), std::stoul(item.substr(dot + 1))});
    } catch (const std::exception&) {
      throw InputError("bad edge " + item);
    }
  }
  return p;
}

json path_json(const Path& p) {
  json a = json::array();
  for (const auto& e : p) a.push_back({e.target, e.position});
  return a;
}

// Certifying commands write the certificate to --out when given, otherwise
// embed it in the report.
void attach(json& report, const json& cert, const Options& o) {
  if (o.out_path.empty()) {
    report["certificate"] = cert;
  } else {
    write_file(o.out_path, certificate_text(cert));
    report["certificate"] = o.out_path;
  }
}

json obstruction_list(const std::vector<Obstruction>& obs) {
  json a = json::array();
  for (const auto& o : obs) a.push_back({{"kind", to_string(o.kind)}, {"detail", o.detail}});
  return a;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ordered Bratteli diagrams: invariants, classification verdicts and certificates", "bvk"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--depth", o.depth, "push-forward depth bound")->check(CLI::PositiveNumber);
  app.add_option("--max-level", o.max_level, "level bound for searches")->check(CLI::PositiveNumber);
  app.add_option("--primes", o.primes, "prime cutoff for spectra")->check(CLI::PositiveNumber);
  app.add_option("--ladder-span", o.ladder_span, "total level span for ladder search")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--out", o.out_path, "certificate (or report) output path");

  std::string file1, file2;
  std::size_t level = 0;
  std::vector<long long> entries;
  std::vector<std::string> cells;
  std::vector<std::uint64_t> gens;
  std::string start;
  std::size_t count = 64;

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  auto* c_validate = sub("validate", "check structure, primitivity and proper ordering");
  c_validate->add_option("file", file1)->required();
  auto* c_heights = sub("heights", "tower heights at a level");
  c_heights->add_option("file", file1)->required();
  c_heights->add_option("level", level)->required();
  auto* c_class = sub("k0-class", "class of a clopen set given as TOWER:FLOOR cells");
  c_class->add_option("file", file1)->required();
  c_class->add_option("level", level)->required();
  c_class->add_option("cells", cells)->required();
  auto* c_pos = sub("positivity", "order verdict for an element given by its level vector");
  c_pos->add_option("file", file1)->required();
  c_pos->add_option("level", level)->required();
  c_pos->add_option("entries", entries)->required();
  auto* c_spec = sub("spectrum", "periodic spectrum as a supernatural number");
  c_spec->add_option("file", file1)->required();
  auto* c_weak = sub("weak", "weak approximate conjugacy verdict");
  c_weak->add_option("first", file1)->required();
  c_weak->add_option("second", file2)->required();
  auto* c_tau = sub("tau", "approximate tau-conjugacy verdict");
  c_tau->add_option("first", file1)->required();
  c_tau->add_option("second", file2)->required();
  auto* c_kconj = sub("kconj", "approximate K-conjugacy verdict");
  c_kconj->add_option("first", file1)->required();
  c_kconj->add_option("second", file2)->required();
  auto* c_conj = sub("conjugator", "build and check a conjugator at a resolution level");
  c_conj->add_option("first", file1)->required();
  c_conj->add_option("second", file2)->required();
  c_conj->add_option("--level", level, "resolution level")->default_val(2);
  auto* c_verify = sub("verify", "re-check a certificate file");
  c_verify->add_option("file", file1)->required();
  auto* c_vershik = sub("vershik", "enumerate successive paths under the Vershik map");
  c_vershik->add_option("file", file1)->required();
  c_vershik->add_option("level", level)->required();
  c_vershik->add_option("--start", start, "path as TARGET.POSITION,... (default: min path into vertex 0)");
  c_vershik->add_option("--count", count, "maximum number of paths")->default_val(64);
  auto* c_frob = sub("frobenius", "least N with every n >= N a combination of the generators");
  c_frob->add_option("generators", gens)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kCompleted;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    json report{{"command", name}, {"bounds", bounds_json(o)}};
    bool certifying = false;
    auto load = [&](int i) { return load_diagram(i == 0 ? file1 : file2); };

    if (name == "validate") {
      auto d = load(0);
      auto r = validate(d, o.depth);
      report["kind"] = d.is_stationary() ? "stationary" : "explicit";
      report["primitive"] = to_string(r.primitive);
      report["primitive_power"] = r.primitive_power;
      report["properly_ordered"] = to_string(r.properly_ordered);
      if (!r.primitive_witness.empty()) report["primitive_witness"] = r.primitive_witness;
      if (!r.ordering_witness.empty()) report["ordering_witness"] = r.ordering_witness;
    } else if (name == "heights") {
      report["level"] = level;
      report["heights"] = big_vec(load(0).heights(level));
    } else if (name == "k0-class") {
      auto d = load(0);
      ClopenSet u{level, {}};
      for (const auto& c : cells) u.cells.insert(parse_cell(c));
      auto cls = class_of_clopen(d, u);
      report["level"] = cls.level;
      report["class"] = big_vec(cls.vector);
    } else if (name == "positivity") {
      DimGroup g(load(0));
      auto x = parse_element(level, entries);
      auto p = g.is_positive(x, o.depth);
      report["verdict"] = to_string(p.verdict);
      report["level"] = p.level;
      if (g.primitive_stationary()) {
        auto t = g.trace_value(x);
        report["trace_sign"] = t.sign;
        report["trace_enclosure"] = {to_string(t.lo), to_string(t.hi)};
      }
    } else if (name == "spectrum") {
      DimGroup g(load(0));
      SpectrumBounds sb = o.bounds().spectrum();
      auto s = periodic_spectrum(g, sb);
      report["spectrum"] = spectrum_json(s);
      report["complete"] = s.complete;
    } else if (name == "weak") {
      certifying = true;
      auto a = load(0), b = load(1);
      auto r = decide_weak(DimGroup(a), DimGroup(b), o.bounds());
      report["verdict"] = to_string(r.verdict);
      report["spectra"] = {spectrum_json(r.spectra.first), spectrum_json(r.spectra.second)};
      if (r.verdict == Verdict::No) report["witness"] = r.witness.str();
      if (r.verdict != Verdict::Unknown) attach(report, certify_weak(a, b, r, o.bounds()), o);
    } else if (name == "tau") {
      certifying = true;
      auto a = load(0), b = load(1);
      auto r = decide_tau(DimGroup(a), DimGroup(b), o.bounds());
      report["verdict"] = to_string(r.verdict);
      report["trace_images"] = to_string(r.trace_images);
      report["obstructions"] = obstruction_list(r.obstructions);
      if (r.verdict != Verdict::Unknown) attach(report, certify_tau(a, b, r, o.bounds()), o);
    } else if (name == "kconj") {
      certifying = true;
      auto a = load(0), b = load(1);
      auto r = decide_k_conjugacy(DimGroup(a), DimGroup(b), o.bounds());
      report["verdict"] = to_string(r.verdict);
      report["obstructions"] = obstruction_list(r.obstructions);
      report["searched_span"] = r.searched_span;
      if (r.ladder) report["ladder"] = to_json(*r.ladder);
      if (r.verdict != Verdict::Unknown) attach(report, certify_k_conjugacy(a, b, r, o.bounds()), o);
    } else if (name == "conjugator") {
      certifying = true;
      auto a = load(0), b = load(1);
      auto r = conjugate_at_resolution(a, b, level, o.bounds());
      report["level"] = level;
      report["morphism"] = to_json(r.morphism);
      report["blocks"] = r.blocks.size();
      report["check"] = to_string(r.check.outcome);
      report["corrector"] = to_json(r.corrector.sigma);
      if (r.check.ok()) attach(report, certify_conjugator(b, r.blocks, r.images, r.corrector.sigma, 1), o);
    } else if (name == "verify") {
      auto c = verify_certificate(read_file(file1));
      report["claim"] = c.claim;
      report["verified"] = c.ok;
      report["reason"] = c.reason;
      out << render(report, o.format);
      return c.ok ? kCompleted : kInputError;
    } else if (name == "vershik") {
      auto d = load(0);
      Path p = start.empty() ? min_path(d, level, 0) : parse_path(start);
      check_path(d, p);
      json paths = json::array();
      bool reached_max = false;
      for (std::size_t i = 0; i < count; ++i) {
        paths.push_back({{"tower", path_end(p)}, {"floor", floor_of(d, p).str()}, {"path", path_json(p)}});
        auto next = vershik_successor(d, p);
        if (std::holds_alternative<MaxPath>(next)) {
          reached_max = true;
          break;
        }
        p = std::get<Path>(next);
      }
      report["level"] = level;
      report["orbit"] = paths;
      report["reached_max"] = reached_max;
    } else if (name == "frobenius") {
      report["generators"] = gens;
      report["frobenius"] = frobenius(gens);
    }

    const std::string text = render(report, o.format);
    if (!certifying && !o.out_path.empty())
      write_file(o.out_path, text);
    else
      out << text;
    return kCompleted;
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const CapabilityError& e) {
    err << "capability: " << e.what() << "\n";
    return kCapabilityError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace bvk::cli
