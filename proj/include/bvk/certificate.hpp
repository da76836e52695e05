#pragma once

// Self-contained certificate files. Each file embeds the diagrams it talks
// about, a witness, and a SHA-256 digest of its canonical JSON form; verify
// re-derives the claim from the witness with the independent checkers.

#include "bvk/classify.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace bvk {

std::string sha256_hex(std::string_view data);

nlohmann::json to_json(const IntMatrix& m);
IntMatrix int_matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IntertwiningLadder& l);
IntertwiningLadder ladder_from_json(const nlohmann::json& j);
nlohmann::json to_json(const K0Morphism& m);
K0Morphism k0_morphism_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ClassifyBounds& b);
ClassifyBounds bounds_from_json(const nlohmann::json& j);

// Throw PreconditionError for Unknown verdicts or uncertifiable No verdicts.
nlohmann::json certify_k_conjugacy(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b,
                                   const KConjugacyResult& r, const ClassifyBounds& bounds);
nlohmann::json certify_weak(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const WeakResult& r,
                            const ClassifyBounds& bounds);
nlohmann::json certify_tau(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const TauResult& r,
                           const ClassifyBounds& bounds);
nlohmann::json certify_conjugator(const OrderedBratteliDiagram& d, const std::vector<ClopenSet>& blocks,
                                  const std::vector<ClopenSet>& images, const FullGroupElement& sigma,
                                  std::size_t lookahead);

// Canonical text: compact JSON with sorted keys plus a trailing newline.
std::string certificate_text(const nlohmann::json& cert);

struct CertificateCheck {
  bool ok = false;
  std::string claim;
  std::string reason;
};
CertificateCheck verify_certificate(std::string_view text);

}  // namespace bvk
