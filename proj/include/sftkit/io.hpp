#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sftkit/algebra.hpp"
#include "sftkit/differential.hpp"
#include "sftkit/signature.hpp"

namespace sft::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// Contact data file:
//   {"version":1,"n":2,"h2rank":0,"c1":[],
//    "orbits":[{"id":"a","cz":2,"kappa":1,"period":"1"}],
//    "tforms":[{"id":"theta0","formDegree":0}]}
// Differential file:
//   {"version":1,"flavor":"rSFT","contactData":"toy.contact.json",
//    "images":[{"generator":"q:a","terms":[{"coeff":"1","group":[],"q":{},"p":{},"t":{},"hbar":0}]}]}
// A term may carry "rawCount": true; its coefficient is then an uncorrected count n, ingested as
// n / (C(I-) C(I+)), times (-1)^{|p_γ|+1} for p-generator images.

Json contact_to_json(const AlgebraSignature& sig);
AlgebraSignature contact_from_json(const Json& doc);
std::string emit_contact(const AlgebraSignature& sig);
/// Throws ParseError (syntax, with line/column) or SemanticError (violated invariant).
AlgebraSignature parse_contact(std::string_view text);

struct DifferentialFile {
  DifferentialSpec spec;
  std::string contactRef;
};

Json differential_to_json(const DifferentialSpec& spec, const std::string& contactRef);
std::string emit_differential(const DifferentialSpec& spec, const std::string& contactRef);
/// rawCounts treats every term as a raw count regardless of its own flag.
DifferentialFile parse_differential(std::string_view text, const AlgebraSignature& sig, bool rawCounts = false);
/// The "contactData" reference of a differential document.
std::string differential_contact_ref(std::string_view text);

/// Reads a differential file and the contact file it references (resolved next to it).
DifferentialFile load_differential(const std::filesystem::path& path, bool rawCounts = false);

Json element_to_json(const AlgebraSignature& sig, const Element& e);
Element element_from_json(const AlgebraSignature& sig, Flavor flavor, const Json& terms, bool rawCounts = false,
                          std::optional<Var> generator = {});

/// "2*q:a*p:b^2 - 1/3*hbar*t:theta0 + e[1]*q:c"; "0" for the zero element.
std::string format_element(const AlgebraSignature& sig, const Element& e);
std::string format_monomial(const AlgebraSignature& sig, const Monomial& m);
/// Inverse of format_element; factors may come in any order and are normal-ordered by the
/// flavor's product. Throws ParseError.
Element parse_element(const AlgebraSignature& sig, Flavor flavor, std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);

}  // namespace sft::io
