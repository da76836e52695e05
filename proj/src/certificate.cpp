#include "bvk/certificate.hpp"

#include "bvk/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

namespace bvk {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

namespace {

json big(const BigInt& x) { return x.str(); }

BigInt big_from(const json& j) {
  if (j.is_number_integer()) return BigInt(j.get<long long>());
  if (!j.is_string()) throw ParseError("expected an integer string", 0);
  const auto& s = j.get_ref<const std::string&>();
  if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos) throw ParseError("bad integer " + s, 0);
  return BigInt(s);
}

json vec(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(big(x));
  return a;
}

json system_entry(const OrderedBratteliDiagram& d) {
  std::string text = serialize_diagram(d);
  return json{{"digest", sha256_hex(text)}, {"obd", text}};
}

json seal(json body) {
  body["digest"] = sha256_hex(body.dump());
  return body;
}

json make(const std::string& claim, const std::vector<const OrderedBratteliDiagram*>& ds, json witness,
          const std::string& verifier, json bounds) {
  json systems = json::array();
  for (auto* d : ds) systems.push_back(system_entry(*d));
  return seal(json{{"format", "bvk-certificate-v1"},
                   {"claim", claim},
                   {"systems", systems},
                   {"witness", std::move(witness)},
                   {"verifier", verifier},
                   {"bounds", std::move(bounds)}});
}

// n divides the unit of one side and not the other.
json divisor_witness(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const BigInt& n,
                     bool in_first, std::size_t depth) {
  DimGroup yes_side(in_first ? a : b), no_side(in_first ? b : a);
  auto y = divides_unit(yes_side, n, depth);
  auto no = divides_unit(no_side, n, depth);
  if (y.verdict != Ternary::Yes || no.verdict != Ternary::No || !no.certificate)
    throw PreconditionError("separating divisor " + n.str() + " has no finite certificate");
  return json{{"n", big(n)},
              {"divides", in_first ? 0 : 1},
              {"level", y.level},
              {"cycle", {{"start", no.certificate->start}, {"period", no.certificate->period}}}};
}

bool check_divisor(const std::vector<OrderedBratteliDiagram>& ds, const json& w, std::string& why) {
  BigInt n = big_from(w.at("n"));
  const int side = w.at("divides").get<int>();
  if (n < 2 || (side != 0 && side != 1)) {
    why = "bad divisor witness";
    return false;
  }
  const auto& yes = ds[static_cast<std::size_t>(side)];
  const auto& no = ds[static_cast<std::size_t>(1 - side)];
  for (const auto& h : yes.heights(w.at("level").get<std::size_t>())) {
    if (mod(h, n) != 0) {
      why = n.str() + " does not divide the unit at the stated level";
      return false;
    }
  }
  ResidueCycle c{n, w.at("cycle").at("start").get<std::size_t>(), w.at("cycle").at("period").get<std::size_t>()};
  if (!no.is_stationary() || !verify_residue_cycle(no, c)) {
    why = "residue cycle does not verify";
    return false;
  }
  return true;
}

json obstructions_witness(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b,
                          const std::vector<Obstruction>& obs, const SpectraComparison* spectra,
                          const ClassifyBounds& bounds) {
  json arr = json::array();
  for (const auto& o : obs) {
    json e{{"kind", to_string(o.kind)}, {"detail", o.detail}};
    if (o.kind == Obstruction::Kind::Spectra) {
      bool first = spectra ? spectra->witness_in_first : false;
      e["divisor"] = divisor_witness(a, b, o.witness, first, bounds.depth);
    }
    arr.push_back(std::move(e));
  }
  return json{{"obstructions", arr}};
}

bool check_obstructions(const std::vector<OrderedBratteliDiagram>& ds, const json& w, std::string& why) {
  const auto& arr = w.at("obstructions");
  if (!arr.is_array() || arr.empty()) {
    why = "no obstruction given";
    return false;
  }
  DimGroup a(ds[0]), b(ds[1]);
  for (const auto& o : arr) {
    const std::string kind = o.at("kind").get<std::string>();
    if (kind == "spectra") {
      if (!check_divisor(ds, o.at("divisor"), why)) return false;
    } else if (kind == "rational-rank") {
      auto ra = a.rational_rank(), rb = b.rational_rank();
      if (!ra || !rb || *ra == *rb) {
        why = "rational ranks agree";
        return false;
      }
    } else if (kind == "trace-image") {
      if (!a.primitive_stationary() || !b.primitive_stationary() ||
          trace_images_isomorphic(trace_image_group(a), trace_image_group(b)) != Ternary::No) {
        why = "trace images are not separated";
        return false;
      }
    } else {
      why = "unknown obstruction kind " + kind;
      return false;
    }
  }
  return true;
}

}  // namespace

json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i)));
  return rows;
}

IntMatrix int_matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows", 0);
  const std::size_t cols = j[0].size();
  IntMatrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != cols) throw ParseError("ragged matrix", 0);
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = big_from(j[i][c]);
  }
  return m;
}

json to_json(const IntertwiningLadder& l) {
  json h = json::array(), big_h = json::array();
  for (const auto& m : l.h) h.push_back(to_json(m));
  for (const auto& m : l.big_h) big_h.push_back(to_json(m));
  return json{{"levels_a", l.levels_a}, {"levels_b", l.levels_b}, {"h", h}, {"H", big_h}};
}

IntertwiningLadder ladder_from_json(const json& j) {
  IntertwiningLadder l;
  l.levels_a = j.at("levels_a").get<std::vector<std::size_t>>();
  l.levels_b = j.at("levels_b").get<std::vector<std::size_t>>();
  for (const auto& m : j.at("h")) l.h.push_back(int_matrix_from_json(m));
  for (const auto& m : j.at("H")) l.big_h.push_back(int_matrix_from_json(m));
  return l;
}

json to_json(const K0Morphism& m) {
  return json{{"level_a", m.level_a}, {"level_b", m.level_b}, {"p", big(m.p)}, {"t", to_json(m.t)}};
}

K0Morphism k0_morphism_from_json(const json& j) {
  return K0Morphism{j.at("level_a").get<std::size_t>(), j.at("level_b").get<std::size_t>(),
                    int_matrix_from_json(j.at("t")), big_from(j.at("p"))};
}

json to_json(const ClassifyBounds& b) {
  return json{{"depth", b.depth}, {"max_level", b.max_level}, {"primes", b.prime_cutoff}, {"ladder_span", b.ladder_span}};
}

ClassifyBounds bounds_from_json(const json& j) {
  ClassifyBounds b;
  b.depth = j.at("depth").get<std::size_t>();
  b.max_level = j.at("max_level").get<std::size_t>();
  b.prime_cutoff = j.at("primes").get<unsigned>();
  b.ladder_span = j.at("ladder_span").get<std::size_t>();
  return b;
}

json certify_k_conjugacy(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const KConjugacyResult& r,
                         const ClassifyBounds& bounds) {
  if (r.verdict == Verdict::Yes && r.ladder)
    return make("k-conjugate", {&a, &b}, json{{"ladder", to_json(*r.ladder)}}, "ladder", to_json(bounds));
  if (r.verdict == Verdict::No) {
    DimGroup ga(a), gb(b);
    auto spectra = spectra_equal(ga, gb, bounds.spectrum());
    return make("not-k-conjugate", {&a, &b}, obstructions_witness(a, b, r.obstructions, &spectra, bounds),
                "obstructions", to_json(bounds));
  }
  throw PreconditionError("an unknown verdict has no certificate");
}

json certify_weak(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const WeakResult& r,
                  const ClassifyBounds& bounds) {
  if (r.verdict == Verdict::Yes) {
    json sched = json::array();
    for (const auto& m : r.schedule) sched.push_back(to_json(m));
    return make("weakly-conjugate", {&a, &b}, json{{"schedule", sched}}, "spectra+schedule", to_json(bounds));
  }
  if (r.verdict == Verdict::No)
    return make("not-weakly-conjugate", {&a, &b}, divisor_witness(a, b, r.witness, r.witness_in_first, bounds.depth),
                "divisor", to_json(bounds));
  throw PreconditionError("an unknown verdict has no certificate");
}

json certify_tau(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const TauResult& r,
                 const ClassifyBounds& bounds) {
  if (r.verdict == Verdict::Yes) return make("tau-conjugate", {&a, &b}, json::object(), "spectra+trace-images", to_json(bounds));
  if (r.verdict == Verdict::No)
    return make("not-tau-conjugate", {&a, &b}, obstructions_witness(a, b, r.obstructions, &r.spectra, bounds),
                "obstructions", to_json(bounds));
  throw PreconditionError("an unknown verdict has no certificate");
}

json certify_conjugator(const OrderedBratteliDiagram& d, const std::vector<ClopenSet>& blocks,
                        const std::vector<ClopenSet>& images, const FullGroupElement& sigma, std::size_t lookahead) {
  json bs = json::array(), is = json::array();
  for (const auto& u : blocks) bs.push_back(to_json(u));
  for (const auto& u : images) is.push_back(to_json(u));
  return make("conjugator", {&d},
              json{{"blocks", bs}, {"images", is}, {"sigma", to_json(sigma)}, {"lookahead", lookahead}},
              "verify_conjugator", to_json(ClassifyBounds{}));
}

std::string certificate_text(const json& cert) { return cert.dump() + "\n"; }

CertificateCheck verify_certificate(std::string_view text) {
  CertificateCheck out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    out.reason = std::string("not valid JSON: ") + e.what();
    return out;
  }
  try {
    if (certificate_text(j) != text) {
      out.reason = "not in canonical form";
      return out;
    }
    out.claim = j.at("claim").get<std::string>();
    json body = j;
    body.erase("digest");
    if (sha256_hex(body.dump()) != j.at("digest").get<std::string>()) {
      out.reason = "digest mismatch";
      return out;
    }
    std::vector<OrderedBratteliDiagram> ds;
    for (const auto& s : j.at("systems")) {
      const std::string obd = s.at("obd").get<std::string>();
      if (sha256_hex(obd) != s.at("digest").get<std::string>()) {
        out.reason = "system digest mismatch";
        return out;
      }
      ds.push_back(parse_diagram(obd));
    }
    const json& w = j.at("witness");
    const ClassifyBounds bounds = bounds_from_json(j.at("bounds"));
    const std::string& claim = out.claim;
    auto need = [&](std::size_t n) {
      if (ds.size() != n) throw ParseError("expected " + std::to_string(n) + " systems", 0);
    };
    std::string why;
    if (claim == "k-conjugate") {
      need(2);
      auto l = ladder_from_json(w.at("ladder"));
      auto check = verify_ladder(l, ds[0], ds[1]);
      out.ok = check.ok && ladder_is_periodic(l, ds[0], ds[1]);
      if (!out.ok) why = check.ok ? "ladder is not periodic" : "square " + std::to_string(check.broken) + ": " + check.reason;
    } else if (claim == "not-k-conjugate" || claim == "not-tau-conjugate") {
      need(2);
      out.ok = check_obstructions(ds, w, why);
      if (out.ok && claim == "not-tau-conjugate") {
        for (const auto& o : w.at("obstructions"))
          if (o.at("kind") == "rational-rank") out.ok = false, why = "rank does not separate tau classes";
      }
    } else if (claim == "weakly-conjugate") {
      need(2);
      std::vector<K0Morphism> sched;
      for (const auto& m : w.at("schedule")) sched.push_back(k0_morphism_from_json(m));
      DimGroup a(ds[0]), b(ds[1]);
      out.ok = verify_schedule(ds[0], ds[1], sched) &&
               spectra_equal(a, b, bounds.spectrum()).verdict == SpectraComparison::Verdict::Equal;
      if (!out.ok) why = "schedule or spectra do not verify";
    } else if (claim == "not-weakly-conjugate") {
      need(2);
      out.ok = check_divisor(ds, w, why);
    } else if (claim == "tau-conjugate") {
      need(2);
      DimGroup a(ds[0]), b(ds[1]);
      out.ok = spectra_equal(a, b, bounds.spectrum()).verdict == SpectraComparison::Verdict::Equal &&
               a.primitive_stationary() && b.primitive_stationary() &&
               trace_images_isomorphic(trace_image_group(a), trace_image_group(b)) == Ternary::Yes;
      if (!out.ok) why = "spectra or trace images differ";
    } else if (claim == "conjugator") {
      need(1);
      std::vector<ClopenSet> blocks, images;
      for (const auto& u : w.at("blocks")) blocks.push_back(clopen_from_json(u));
      for (const auto& u : w.at("images")) images.push_back(clopen_from_json(u));
      auto s = full_group_element_from_json(w.at("sigma"));
      auto check = verify_conjugator(ds[0], s, blocks, images, w.at("lookahead").get<std::size_t>());
      out.ok = check.ok();
      if (!out.ok) why = to_string(check.outcome);
    } else {
      why = "unknown claim " + claim;
    }
    out.reason = out.ok ? "verified" : why;
  } catch (const std::exception& e) {
    out.ok = false;
    out.reason = std::string("malformed certificate: ") + e.what();
  }
  return out;
}

}  // namespace bvk
