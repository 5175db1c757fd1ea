#include "sftkit/io.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "sftkit/errors.hpp"
#include "sftkit/index_calculus.hpp"

namespace sft::io {

namespace {

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte points one past the offending character.
    auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("malformed JSON", line, column);
  }
}

void require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw SemanticError(what + " must be a JSON object");
}

void check_fields(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  require_object(j, what);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) throw SemanticError("unknown field '" + key + "' in " + what);
}

const Json& field(const Json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw SemanticError("missing field '" + std::string(key) + "' in " + what);
  return *it;
}

std::int64_t get_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw SemanticError(what + " must be an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const Json& j, const std::string& what) {
  if (!j.is_string()) throw SemanticError(what + " must be a string");
  return j.get<std::string>();
}

Rational get_rational(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  return parse_rational(get_string(j, what));
}

void check_version(const Json& doc, const std::string& what) {
  if (get_int(field(doc, "version", what), "version") != kFormatVersion)
    throw SemanticError("unsupported " + what + " version (expected " + std::to_string(kFormatVersion) + ")");
}

Json exponents_to_json(const AlgebraSignature& sig, const ExponentList& list, VarKind kind) {
  Json o = Json::object();
  for (const auto& [i, e] : list) {
    const std::string name = sig.var_name(Var{kind, i});
    o[name.substr(2)] = e;
  }
  return o;
}

ExponentList exponents_from_json(const AlgebraSignature& sig, const Json& j, VarKind kind, const std::string& what) {
  require_object(j, what);
  std::map<std::uint32_t, std::uint32_t> out;
  const char* prefix = kind == VarKind::Q ? "q:" : kind == VarKind::P ? "p:" : "t:";
  for (const auto& [id, value] : j.items()) {
    const Var v = sig.parse_var(prefix + id);
    const auto e = get_int(value, what + " exponent");
    if (e < 0) throw SemanticError("negative exponent in " + what);
    if (e == 0) continue;
    if (e > 1 && sig.is_odd(v)) throw SemanticError("odd variable " + sig.var_name(v) + " with exponent above one");
    out[v.index] += static_cast<std::uint32_t>(e);
  }
  return {out.begin(), out.end()};
}

OrbitMultiset multiset_of(const ExponentList& list) {
  OrbitMultiset ms;
  for (const auto& [i, e] : list) ms[i] = e;
  return ms;
}

}  // namespace

Json contact_to_json(const AlgebraSignature& sig) {
  Json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = sig.n();
  doc["h2rank"] = sig.h2rank();
  doc["c1"] = sig.c1();
  Json orbits = Json::array();
  for (const auto& o : sig.orbits()) {
    Json r;
    r["id"] = o.id;
    r["cz"] = o.cz;
    r["kappa"] = o.kappa;
    if (o.period) r["period"] = format_rational(*o.period);
    orbits.push_back(std::move(r));
  }
  doc["orbits"] = std::move(orbits);
  Json forms = Json::array();
  for (const auto& t : sig.tforms()) forms.push_back(Json{{"id", t.id}, {"formDegree", t.formDegree}});
  doc["tforms"] = std::move(forms);
  return doc;
}

AlgebraSignature contact_from_json(const Json& doc) {
  const std::string what = "contact data";
  check_fields(doc, {"version", "n", "h2rank", "c1", "orbits", "tforms"}, what);
  check_version(doc, what);
  const auto n = get_int(field(doc, "n", what), "n");
  const auto rank = get_int(field(doc, "h2rank", what), "h2rank");
  std::vector<std::int64_t> c1;
  if (doc.contains("c1")) {
    const auto& arr = doc["c1"];
    if (!arr.is_array()) throw SemanticError("c1 must be an array");
    for (const auto& x : arr) c1.push_back(get_int(x, "c1 entry"));
  }
  if (static_cast<std::int64_t>(c1.size()) != rank) throw SemanticError("c1 must have h2rank entries");
  std::vector<OrbitRecord> orbits;
  const auto& arr = field(doc, "orbits", what);
  if (!arr.is_array()) throw SemanticError("orbits must be an array");
  for (const auto& o : arr) {
    check_fields(o, {"id", "cz", "kappa", "period"}, "orbit");
    OrbitRecord r;
    r.id = get_string(field(o, "id", "orbit"), "orbit id");
    r.cz = static_cast<int>(get_int(field(o, "cz", "orbit"), "cz"));
    const auto kappa = get_int(field(o, "kappa", "orbit"), "kappa");
    if (kappa < 1) throw SemanticError("kappa >= 1 violated for orbit '" + r.id + "'");
    r.kappa = static_cast<std::uint32_t>(kappa);
    if (o.contains("period")) r.period = get_rational(o["period"], "period");
    orbits.push_back(std::move(r));
  }
  std::vector<TFormRecord> forms;
  if (doc.contains("tforms")) {
    const auto& tf = doc["tforms"];
    if (!tf.is_array()) throw SemanticError("tforms must be an array");
    for (const auto& t : tf) {
      check_fields(t, {"id", "formDegree"}, "tform");
      const auto d = get_int(field(t, "formDegree", "tform"), "formDegree");
      if (d < 0) throw SemanticError("formDegree must be >= 0");
      forms.push_back({get_string(field(t, "id", "tform"), "tform id"), static_cast<std::uint32_t>(d)});
    }
  }
  return AlgebraSignature(static_cast<int>(n), std::move(c1), std::move(orbits), std::move(forms));
}

std::string emit_contact(const AlgebraSignature& sig) { return contact_to_json(sig).dump(2) + "\n"; }

AlgebraSignature parse_contact(std::string_view text) { return contact_from_json(parse_json(text)); }

Json element_to_json(const AlgebraSignature& sig, const Element& e) {
  Json terms = Json::array();
  for (const auto& [m, c] : e.terms()) {
    Json t;
    t["coeff"] = format_rational(c);
    t["group"] = m.group.coords;
    t["q"] = exponents_to_json(sig, m.q, VarKind::Q);
    t["p"] = exponents_to_json(sig, m.p, VarKind::P);
    t["t"] = exponents_to_json(sig, m.t, VarKind::T);
    t["hbar"] = m.hbar;
    terms.push_back(std::move(t));
  }
  return terms;
}

Element element_from_json(const AlgebraSignature& sig, Flavor flavor, const Json& terms, bool rawCounts,
                          std::optional<Var> generator) {
  if (!terms.is_array()) throw SemanticError("terms must be an array");
  Element e(flavor);
  for (const auto& t : terms) {
    const std::string what = "term";
    check_fields(t, {"coeff", "group", "q", "p", "t", "hbar", "rawCount"}, what);
    Rational c = get_rational(field(t, "coeff", what), "coeff");
    Monomial m = Monomial::unit(sig.h2rank());
    if (t.contains("group")) {
      const auto& g = t["group"];
      if (!g.is_array() || g.size() != sig.h2rank()) throw SemanticError("group must have h2rank entries");
      for (std::size_t i = 0; i < g.size(); ++i) m.group.coords[i] = get_int(g[i], "group entry");
    }
    if (t.contains("q")) m.q = exponents_from_json(sig, t["q"], VarKind::Q, "q");
    if (t.contains("p")) m.p = exponents_from_json(sig, t["p"], VarKind::P, "p");
    if (t.contains("t")) m.t = exponents_from_json(sig, t["t"], VarKind::T, "t");
    if (t.contains("hbar")) {
      const auto h = get_int(t["hbar"], "hbar");
      if (h < 0) throw SemanticError("hbar exponent must be >= 0");
      m.hbar = static_cast<std::uint32_t>(h);
    }
    bool raw = rawCounts;
    if (t.contains("rawCount")) {
      if (!t["rawCount"].is_boolean()) throw SemanticError("rawCount must be a boolean");
      raw = raw || t["rawCount"].get<bool>();
    }
    if (raw) {
      c /= combinatorial_factor(sig, multiset_of(m.q)) * combinatorial_factor(sig, multiset_of(m.p));
      if (generator && generator->kind == VarKind::P && (sig.degree(*generator) + 1) % 2 != 0) c = -c;
    }
    e.add_term(m, c);
  }
  return e;
}

Json differential_to_json(const DifferentialSpec& spec, const std::string& contactRef) {
  Json doc;
  doc["version"] = kFormatVersion;
  doc["flavor"] = std::string(flavor_name(spec.flavor));
  doc["contactData"] = contactRef;
  Json images = Json::array();
  for (const auto& [v, img] : spec.images)
    images.push_back(Json{{"generator", spec.sig.var_name(v)}, {"terms", element_to_json(spec.sig, img)}});
  doc["images"] = std::move(images);
  return doc;
}

std::string emit_differential(const DifferentialSpec& spec, const std::string& contactRef) {
  return differential_to_json(spec, contactRef).dump(2) + "\n";
}

DifferentialFile parse_differential(std::string_view text, const AlgebraSignature& sig, bool rawCounts) {
  const Json doc = parse_json(text);
  const std::string what = "differential";
  check_fields(doc, {"version", "flavor", "contactData", "images"}, what);
  check_version(doc, what);
  DifferentialFile out;
  out.spec.flavor = parse_flavor(get_string(field(doc, "flavor", what), "flavor"));
  out.spec.sig = sig;
  if (doc.contains("contactData")) out.contactRef = get_string(doc["contactData"], "contactData");
  const auto& images = field(doc, "images", what);
  if (!images.is_array()) throw SemanticError("images must be an array");
  for (const auto& img : images) {
    check_fields(img, {"generator", "terms"}, "image");
    const Var v = sig.parse_var(get_string(field(img, "generator", "image"), "generator"));
    if (v.kind != VarKind::Q && !(v.kind == VarKind::P && has_p(out.spec.flavor)))
      throw FlavorError("flavor " + std::string(flavor_name(out.spec.flavor)) + " has no generator " +
                        sig.var_name(v));
    if (out.spec.images.contains(v)) throw SemanticError("duplicate image for " + sig.var_name(v));
    out.spec.images.emplace(v, element_from_json(sig, out.spec.flavor, field(img, "terms", "image"), rawCounts, v));
  }
  return out;
}

std::string differential_contact_ref(std::string_view text) {
  const Json doc = parse_json(text);
  require_object(doc, "differential");
  return get_string(field(doc, "contactData", "differential"), "contactData");
}

DifferentialFile load_differential(const std::filesystem::path& path, bool rawCounts) {
  const std::string text = read_file(path);
  const std::filesystem::path contact = path.parent_path() / differential_contact_ref(text);
  return parse_differential(text, parse_contact(read_file(contact)), rawCounts);
}

std::string format_monomial(const AlgebraSignature& sig, const Monomial& m) {
  std::vector<std::string> factors;
  if (!m.group.is_zero()) {
    std::string g = "e[";
    for (std::size_t i = 0; i < m.group.coords.size(); ++i) {
      if (i) g += ",";
      g += std::to_string(m.group.coords[i]);
    }
    factors.push_back(g + "]");
  }
  auto push = [&](Var v, std::uint32_t e) {
    std::string s = sig.var_name(v);
    if (e > 1) s += "^" + std::to_string(e);
    factors.push_back(std::move(s));
  };
  for (const auto& [i, e] : m.q) push(Var::q(i), e);
  for (const auto& [i, e] : m.p) push(Var::p(i), e);
  for (const auto& [i, e] : m.t) push(Var::t(i), e);
  if (m.hbar) push(Var::hbar(), m.hbar);
  if (factors.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? "*" : "") + factors[i];
  return out;
}

std::string format_element(const AlgebraSignature& sig, const Element& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    const bool negative = sgn(c) < 0;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    const Rational mag = abs(c);
    if (m.is_unit()) {
      out += format_rational(mag);
    } else {
      if (mag != 1) out += format_rational(mag) + "*";
      out += format_monomial(sig, m);
    }
  }
  return out;
}

namespace {

class ElementParser {
 public:
  ElementParser(const AlgebraSignature& sig, Flavor f, std::string_view text) : sig_(sig), f_(f), text_(text) {}

  Element parse() {
    Element result(f_);
    skip();
    if (pos_ == text_.size()) fail("empty element");
    bool firstTerm = true;
    while (pos_ < text_.size()) {
      bool negative = false;
      if (peek() == '+' || peek() == '-') {
        negative = peek() == '-';
        ++pos_;
        skip();
      } else if (!firstTerm) {
        fail("expected '+' or '-'");
      }
      result += term(negative);
      firstTerm = false;
      skip();
    }
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, 1, static_cast<int>(pos_) + 1); }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  static bool id_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

  std::uint64_t integer() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::stoull(std::string(text_.substr(start, pos_ - start)));
  }

  Rational number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '/') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a denominator");
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    try {
      return parse_rational(text_.substr(start, pos_ - start));
    } catch (const SemanticError&) {
      pos_ = start;
      fail("malformed coefficient");
    }
  }

  Element term(bool negative) {
    Rational c = negative ? -1 : 1;
    GroupElement group = GroupElement::zero(sig_.h2rank());
    std::vector<Var> word;
    bool expectFactor = true;
    while (expectFactor) {
      skip();
      const char ch = peek();
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        c *= number();
      } else if (ch == 'e' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '[') {
        pos_ += 2;
        GroupElement a = GroupElement::zero(sig_.h2rank());
        for (std::size_t i = 0; i < sig_.h2rank(); ++i) {
          skip();
          if (i) {
            if (peek() != ',') fail("expected ','");
            ++pos_;
            skip();
          }
          bool neg = false;
          if (peek() == '-') {
            neg = true;
            ++pos_;
          }
          const auto v = static_cast<std::int64_t>(integer());
          a.coords[i] = neg ? -v : v;
        }
        skip();
        if (peek() != ']') fail("expected ']' closing a group element of rank " + std::to_string(sig_.h2rank()));
        ++pos_;
        group = group + a;
      } else if (std::isalpha(static_cast<unsigned char>(ch))) {
        const std::size_t start = pos_;
        while (id_char(peek())) ++pos_;
        if (peek() == ':') {
          ++pos_;
          while (id_char(peek())) ++pos_;
        }
        Var v;
        try {
          v = sig_.parse_var(text_.substr(start, pos_ - start));
        } catch (const SemanticError& e) {
          pos_ = start;
          fail(e.what());
        }
        std::uint64_t power = 1;
        skip();
        if (peek() == '^') {
          ++pos_;
          skip();
          power = integer();
        }
        for (std::uint64_t k = 0; k < power; ++k) word.push_back(v);
      } else {
        fail("expected a factor");
      }
      skip();
      if (peek() == '*') {
        ++pos_;
      } else {
        expectFactor = false;
      }
    }
    return normalize(sig_, f_, word, c, group);
  }

  const AlgebraSignature& sig_;
  Flavor f_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Element parse_element(const AlgebraSignature& sig, Flavor flavor, std::string_view text) {
  return ElementParser(sig, flavor, text).parse();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SemanticError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SemanticError("cannot write " + path.string());
  out << text;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace sft::io
