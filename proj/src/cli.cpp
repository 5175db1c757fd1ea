#include "sftkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

#include "sftkit/corpus.hpp"
#include "sftkit/errors.hpp"
#include "sftkit/index_calculus.hpp"
#include "sftkit/io.hpp"
#include "sftkit/theorem.hpp"

namespace sft::cli {

namespace {

using io::Json;

struct Options {
  std::vector<std::string> files;
  std::string bounds;
  std::string policy;
  std::string element;
  std::string report;
  std::string orbit;
  std::string role = "positive";
  std::string out;
  std::uint64_t seed = 0;
  bool rawCounts = false;
};

// "word=4,p=3,hbar=2,t=2,action=5/2,group=0,weight=5"
struct BoundSpec {
  std::optional<std::uint32_t> word, p, hbar, t, group, weight;
  std::optional<Rational> action;
};

BoundSpec parse_bounds(const std::string& text) {
  BoundSpec b;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw SemanticError("bound '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "action") {
      b.action = parse_rational(value);
      continue;
    }
    const Rational r = parse_rational(value);
    if (r.get_den() != 1 || sgn(r) < 0) throw SemanticError("bound '" + key + "' must be a non-negative integer");
    const auto v = static_cast<std::uint32_t>(r.get_num().get_ui());
    if (key == "word") b.word = v;
    else if (key == "p") b.p = v;
    else if (key == "hbar") b.hbar = v;
    else if (key == "t") b.t = v;
    else if (key == "group") b.group = v;
    else if (key == "weight") b.weight = v;
    else throw SemanticError("unknown bound '" + key + "'");
  }
  return b;
}

SearchBounds search_bounds(const BoundSpec& b) {
  SearchBounds s;
  if (b.word) s.maxWordLength = *b.word;
  if (b.group) s.maxGroupNorm = *b.group;
  if (b.weight) s.weight = *b.weight;
  s.maxAction = b.action;
  return s;
}

TruncationPolicy truncation(const BoundSpec& b) {
  TruncationPolicy p;
  p.maxPWeight = b.p;
  p.maxHbarWeight = b.hbar;
  p.maxTWeight = b.t;
  p.maxWordLength = b.word;
  p.maxFiltrationWeight = b.weight;
  p.maxGroupNorm = b.group;
  p.maxAction = b.action;
  return p;
}

TruncationPolicy lift_policy(const Options& o) {
  if (!o.policy.empty()) return truncation(parse_bounds(o.policy));
  return TruncationPolicy::filtration(search_bounds(parse_bounds(o.bounds)).weight);
}

Json certificate_json(const PrimitiveCertificate& c) {
  Json j;
  j["flavor"] = std::string(flavor_name(c.flavor));
  j["verifiedToWeight"] = c.verifiedToWeight;
  j["exact"] = c.verifiedToWeight == 0;
  j["element"] = io::format_element(c.spec.sig, c.element);
  j["terms"] = io::element_to_json(c.spec.sig, c.element);
  return j;
}

class Session {
 public:
  Session(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  io::DifferentialFile load(const std::string& path) {
    digest_ += io::read_file(path);
    return io::load_differential(path, o_.rawCounts);
  }

  AlgebraSignature load_contact(const std::string& path) {
    const std::string text = io::read_file(path);
    digest_ += text;
    return io::parse_contact(text);
  }

  int finish(const std::string& command, Json body, int code) {
    digest_ += o_.element;
    Json doc;
    doc["tool"] = "sftkit";
    doc["command"] = command;
    doc["inputDigest"] = io::sha256_hex(digest_);
    doc["exitCode"] = code;
    for (auto& [k, v] : body.items()) doc[k] = v;
    const std::string text = doc.dump(2) + "\n";
    if (o_.report.empty()) {
      out_ << text;
    } else {
      io::write_file(o_.report, text);
    }
    return code;
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::string digest_;
};

Element element_arg(const Options& o, const DifferentialSpec& spec) {
  if (o.element.empty()) throw SemanticError("--element is required");
  return io::parse_element(spec.sig, spec.flavor, o.element);
}

void need_files(const Options& o, std::size_t n, const char* usage) {
  if (o.files.size() != n) throw CLI::ValidationError(std::string("usage: ") + usage);
}

int cmd_validate(const Options& o, Session& s) {
  need_files(o, 1, "validate <file.json>");
  const std::string text = io::read_file(o.files[0]);
  const Json probe = Json::parse(text, nullptr, false);
  Json body;
  if (!probe.is_discarded() && probe.is_object() && !probe.contains("flavor")) {
    const auto sig = s.load_contact(o.files[0]);
    body["kind"] = "contact";
    body["orbits"] = sig.orbits().size();
    body["status"] = "ok";
    return s.finish("validate", body, kOk);
  }
  const auto file = s.load(o.files[0]);
  const auto structure = validate_structure(file.spec);
  body["kind"] = "differential";
  body["flavor"] = std::string(flavor_name(file.spec.flavor));
  Json violations = Json::array();
  for (const auto& v : structure.violations)
    violations.push_back(Json{{"kind", std::string(violation_name(v.kind))},
                              {"generator", file.spec.sig.var_name(v.generator)},
                              {"detail", v.detail}});
  body["violations"] = violations;
  body["actionChecked"] = structure.actionChecked;
  body["commutatorCompatible"] = structure.commutatorCompatible;
  bool ok = structure.pass();
  if (structure.commutatorCompatible) {
    const auto d2 = check_d_squared(file.spec);
    body["dSquared"] = d2.pass ? "pass" : "fail";
    ok = ok && d2.pass;
  } else {
    body["dSquared"] = "unchecked";
  }
  body["status"] = ok ? "ok" : (structure.commutatorCompatible ? "invalid" : "formal, d^2 unchecked");
  return s.finish("validate", body, ok ? kOk : kCheckFailed);
}

int cmd_d2(const Options& o, Session& s) {
  need_files(o, 1, "d2 <differential.json>");
  const auto file = s.load(o.files[0]);
  std::optional<TruncationPolicy> policy;
  if (!o.bounds.empty() || !o.policy.empty()) policy = lift_policy(o);
  const auto report = check_d_squared(file.spec, policy);
  Json body;
  body["pass"] = report.pass;
  if (report.verifiedToWeight) body["verifiedToWeight"] = *report.verifiedToWeight;
  Json failures = Json::array();
  for (const auto& f : report.failures)
    failures.push_back(Json{{"generator", file.spec.sig.var_name(f.generator)},
                            {"residual", io::format_element(file.spec.sig, f.residual)}});
  body["failures"] = failures;
  return s.finish("d2", body, report.pass ? kOk : kCheckFailed);
}

int cmd_apply(const Options& o, Session& s) {
  need_files(o, 1, "apply <differential.json> --element <text>");
  const auto file = s.load(o.files[0]);
  const Element x = element_arg(o, file.spec);
  Element dx = apply_d(file.spec, x);
  if (!o.bounds.empty() || !o.policy.empty()) dx = truncate(file.spec.sig, dx, lift_policy(o));
  Json body;
  body["input"] = io::format_element(file.spec.sig, x);
  body["result"] = io::format_element(file.spec.sig, dx);
  body["terms"] = io::element_to_json(file.spec.sig, dx);
  return s.finish("apply", body, kOk);
}

int cmd_find(const Options& o, Session& s) {
  need_files(o, 1, "find-primitive <differential.json>");
  const auto file = s.load(o.files[0]);
  const auto search = find_unit_primitive(file.spec, search_bounds(parse_bounds(o.bounds)));
  Json body;
  body["basisSize"] = search.basisSize;
  body["rowCount"] = search.rowCount;
  if (search.certificate) {
    body["verdict"] = "primitive";
    body["certificate"] = certificate_json(*search.certificate);
  } else {
    body["verdict"] = "none-within-bounds";
    body["reason"] = search.reason;
    body["caveat"] = kSemidecisionCaveat;
  }
  return s.finish("find-primitive", body, kOk);
}

// The source primitive: --element if given (verified), otherwise a bounded search.
std::optional<PrimitiveCertificate> source_primitive(const Options& o, const DifferentialSpec& spec) {
  const auto bounds = search_bounds(parse_bounds(o.bounds));
  if (o.element.empty()) return find_unit_primitive(spec, bounds).certificate;
  PrimitiveCertificate c{spec.flavor, element_arg(o, spec), is_power_series(spec.flavor) ? bounds.weight : 0u, spec};
  if (!certificate_residual(c).is_zero()) throw VerificationError("--element is not a primitive of the unit");
  return c;
}

int cmd_transfer(const Options& o, Session& s, bool lift) {
  const char* name = lift ? "lift" : "project";
  need_files(o, 2, lift ? "lift <source.json> <target.json>" : "project <source.json> <target.json>");
  const auto source = s.load(o.files[0]);
  const auto target = s.load(o.files[1]);
  Json body;
  const auto f0 = source_primitive(o, source.spec);
  if (!f0) {
    body["verdict"] = "none-within-bounds";
    body["caveat"] = kSemidecisionCaveat;
    return s.finish(name, body, kCheckFailed);
  }
  const auto cert = lift ? lift_primitive(*f0, target.spec.flavor, target.spec, lift_policy(o))
                         : project_primitive(*f0, target.spec.flavor, target.spec);
  body["source"] = certificate_json(*f0);
  body["certificate"] = certificate_json(cert);
  return s.finish(name, body, kOk);
}

Json classification_json(const ClassificationReport& r) {
  Json body;
  body["verdict"] = r.verdict == Verdict::Vanishes ? "vanishes" : "none-within-bounds";
  if (r.foundIn) body["foundIn"] = std::string(flavor_name(*r.foundIn));
  Json searched = Json::array();
  for (auto f : r.searched) searched.push_back(std::string(flavor_name(f)));
  body["searched"] = searched;
  Json synth = Json::array();
  for (auto f : r.synthesized) synth.push_back(std::string(flavor_name(f)));
  body["synthesized"] = synth;
  Json certs = Json::object();
  for (const auto& [f, c] : r.certificates) certs[std::string(flavor_name(f))] = certificate_json(c);
  body["certificates"] = certs;
  body["notes"] = r.notes;
  return body;
}

int cmd_classify(const Options& o, Session& s) {
  if (o.files.empty()) throw CLI::ValidationError("usage: classify <differential.json>...");
  std::map<Flavor, DifferentialSpec> specs;
  for (const auto& path : o.files) {
    auto file = s.load(path);
    if (!specs.emplace(file.spec.flavor, std::move(file.spec)).second)
      throw SemanticError("two specs of the same flavor");
  }
  const auto report = classify(specs, search_bounds(parse_bounds(o.bounds)), lift_policy(o));
  return s.finish("classify", classification_json(report), kOk);
}

int cmd_enumerate(const Options& o, Session& s) {
  need_files(o, 1, "enumerate <contact.json> --orbit <id> [--role positive|negative]");
  const auto sig = s.load_contact(o.files[0]);
  const auto orbit = sig.find_orbit(o.orbit);
  if (!orbit) throw SemanticError("unknown orbit '" + o.orbit + "'");
  if (o.role != "positive" && o.role != "negative") throw SemanticError("role must be positive or negative");
  const auto role = o.role == "positive" ? PunctureRole::Positive : PunctureRole::Negative;
  const auto profiles = enumerate_admissible_profiles(sig, *orbit, role, truncation(parse_bounds(o.bounds)));
  Json list = Json::array();
  for (const auto& pr : profiles) {
    Json minus = Json::object();
    for (const auto& [i, e] : pr.iMinus) minus[sig.orbit(i).id] = e;
    Json plus = Json::object();
    for (const auto& [i, e] : pr.iPlus) plus[sig.orbit(i).id] = e;
    list.push_back(Json{{"iMinus", minus},
                        {"iPlus", plus},
                        {"genus", pr.genus},
                        {"group", pr.group.coords},
                        {"termDegree", profile_term_degree(sig, pr, {})}});
  }
  Json body;
  body["orbit"] = o.orbit;
  body["role"] = o.role;
  body["count"] = profiles.size();
  body["profiles"] = list;
  return s.finish("enumerate", body, kOk);
}

int cmd_corpus(const Options& o, Session& s) {
  Json body;
  if (o.files.empty()) {
    body["entries"] = corpus_names();
    return s.finish("corpus", body, kOk);
  }
  need_files(o, 1, "corpus [name|layered] [--seed N] [--out dir]");
  CorpusEntry entry = o.files[0] == "layered" ? random_layered_spec(o.seed) : corpus_entry(o.files[0]);
  body["entry"] = entry.name;
  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    const std::string contact = entry.name + ".contact.json";
    io::write_file(dir / contact, io::emit_contact(entry.sig));
    Json written = Json::array({contact});
    for (const auto& [f, spec] : entry.specs) {
      std::string fl(flavor_name(f));
      std::replace(fl.begin(), fl.end(), '*', 'S');
      const std::string name = entry.name + "." + fl + ".json";
      io::write_file(dir / name, io::emit_differential(spec, contact));
      written.push_back(name);
    }
    body["written"] = written;
    return s.finish("corpus", body, kOk);
  }
  const auto report = classify(entry.specs, entry.bounds, entry.policy);
  const bool vanishes = report.verdict == Verdict::Vanishes;
  const bool expected = entry.expected == ExpectedVerdict::Vanishes;
  body["expected"] = expected ? "vanishes" : "none-within-bounds";
  body["classification"] = classification_json(report);
  body["match"] = vanishes == expected;
  return s.finish("corpus", body, vanishes == expected ? kOk : kCheckFailed);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic toolkit for contact homology and SFT differentials", "sftkit"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool files = true) {
    if (files) sub->add_option("files", o.files, "input files");
    sub->add_option("--bounds", o.bounds, "word=4,p=3,hbar=2,t=2,action=5/2,group=0,weight=5");
    sub->add_option("--policy", o.policy, "truncation policy for lifts, same syntax as --bounds");
    sub->add_option("--report", o.report, "write the JSON report to this file");
    sub->add_flag("--raw-counts", o.rawCounts, "treat every coefficient as an uncorrected count");
  };
  auto* validate = app.add_subcommand("validate", "check a contact or differential file");
  common(validate);
  auto* d2 = app.add_subcommand("d2", "check d∘d = 0 on every generator");
  common(d2);
  auto* apply = app.add_subcommand("apply", "apply d to an element");
  common(apply);
  apply->add_option("--element", o.element, "element text");
  auto* find = app.add_subcommand("find-primitive", "search for a with d a = 1");
  common(find);
  auto* lift = app.add_subcommand("lift", "lift a primitive from the source flavor to the target");
  common(lift);
  lift->add_option("--element", o.element, "source primitive (default: search)");
  auto* project = app.add_subcommand("project", "project a primitive to a poorer flavor");
  common(project);
  project->add_option("--element", o.element, "source primitive (default: search)");
  auto* classify_cmd = app.add_subcommand("classify", "decide whether the unit is exact in the family");
  common(classify_cmd);
  auto* enumerate = app.add_subcommand("enumerate", "list rigid puncture profiles for one orbit");
  common(enumerate);
  enumerate->add_option("--orbit", o.orbit, "orbit id")->required();
  enumerate->add_option("--role", o.role, "positive or negative");
  auto* corpus = app.add_subcommand("corpus", "list, export or check corpus entries");
  common(corpus);
  corpus->add_option("--seed", o.seed, "seed for the layered entry");
  corpus->add_option("--out", o.out, "directory to write the entry's files into");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "sftkit: " << e.what() << "\n";
    return kUsage;
  }

  try {
    Session s(o, out);
    if (validate->parsed()) return cmd_validate(o, s);
    if (d2->parsed()) return cmd_d2(o, s);
    if (apply->parsed()) return cmd_apply(o, s);
    if (find->parsed()) return cmd_find(o, s);
    if (lift->parsed()) return cmd_transfer(o, s, true);
    if (project->parsed()) return cmd_transfer(o, s, false);
    if (classify_cmd->parsed()) return cmd_classify(o, s);
    if (enumerate->parsed()) return cmd_enumerate(o, s);
    if (corpus->parsed()) return cmd_corpus(o, s);
  } catch (const CLI::ValidationError& e) {
    err << "sftkit: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "sftkit: parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const VerificationError& e) {
    err << "sftkit: verification failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "sftkit: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace sft::cli
