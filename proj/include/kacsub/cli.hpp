#pragma once

// Workspace documents (JSON, schema 1), their validation, and execution of
// the command-line commands into machine-readable reports.

#include "kacsub/invariant.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace kacsub::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "kacsub";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct Flags {
  double eps = kDefaultEps;
  Index depth = 3;
  std::uint64_t seed = 0;
  std::string format = "json";
};

// ---------------------------------------------------------------------------
// Parsing helpers

/// Line and column (1-based) of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_document_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the position one past the offending byte.
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
}

inline cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::InvalidInput, "expected a number or [re, im], got " + j.dump());
}

inline Vec parse_vector(const json& j, Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    throw Error(ErrorKind::InvalidInput, what + ": expected " + std::to_string(n) + " entries");
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = parse_complex(j[static_cast<std::size_t>(i)]);
  return v;
}

inline Index parse_index(const json& j, Index bound, const std::string& what) {
  if (!j.is_number_integer()) throw Error(ErrorKind::InvalidInput, what + ": expected an integer index");
  const Index i = j.get<Index>();
  if (i < 0 || i >= bound) throw Error(ErrorKind::InvalidInput, what + ": index " + std::to_string(i) + " out of range");
  return i;
}

/// Sparse matrix entries [row, col, re, im].
inline Mat parse_sparse_matrix(const json& j, Index rows, Index cols, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidInput, what + ": expected a list of [row, col, re, im]");
  Mat m = Mat::Zero(rows, cols);
  for (const auto& e : j) {
    if (!e.is_array() || (e.size() != 3 && e.size() != 4))
      throw Error(ErrorKind::InvalidInput, what + ": malformed entry " + e.dump());
    const double im = e.size() == 4 ? e[3].get<double>() : 0.0;
    m(parse_index(e[0], rows, what), parse_index(e[1], cols, what)) += cplx(e[2].get<double>(), im);
  }
  return m;
}

inline const json& require_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorKind::InvalidInput, where + ": missing field '" + key + "'");
  return obj.at(key);
}

inline std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_string()) throw Error(ErrorKind::InvalidInput, where + ": field '" + key + "' must be a name");
  return v.get<std::string>();
}

inline CoactionKind parse_kind(const std::string& s) {
  if (s == "coaction") return CoactionKind::Coaction;
  if (s == "anticoaction") return CoactionKind::Anticoaction;
  if (s == "none") return CoactionKind::None;
  throw Error(ErrorKind::InvalidInput, "unknown coaction kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Workspace

struct KacEntry {
  KacPtr kac;
  std::optional<std::string> group;  // set for group and function algebras
};

struct InclusionEntry {
  InclusionData data;
  std::optional<SubalgebraEmbedding> emb;
};

struct Workspace {
  std::map<std::string, FiniteGroupTable> groups;
  std::map<std::string, KacEntry> kacs;
  std::map<std::string, AlgebraPtr> algebras;
  std::map<std::string, CrossedProduct> crossed;
  std::map<std::string, Corepresentation> coreps;
  std::map<std::string, CoactionMap> coactions;
  std::map<std::string, InclusionEntry> inclusions;
  std::vector<std::string> order;  // declaration order, "section/name"
  json requests = json::array();

  template <typename M>
  static const typename M::mapped_type& lookup(const M& m, const std::string& name, const char* what) {
    auto it = m.find(name);
    if (it == m.end()) throw Error(ErrorKind::UnresolvedReference, std::string("unresolved ") + what + " '" + name + "'");
    return it->second;
  }
  const FiniteGroupTable& group(const std::string& n) const { return lookup(groups, n, "group"); }
  const KacEntry& kac(const std::string& n) const { return lookup(kacs, n, "Kac algebra"); }
  const AlgebraPtr& algebra(const std::string& n) const { return lookup(algebras, n, "algebra"); }
  const Corepresentation& corep(const std::string& n) const { return lookup(coreps, n, "corepresentation"); }
  const CoactionMap& coaction(const std::string& n) const { return lookup(coactions, n, "coaction"); }
  const InclusionEntry& inclusion(const std::string& n) const { return lookup(inclusions, n, "inclusion"); }
};

namespace detail {

inline void declare(Workspace& ws, const char* section, const std::string& name) {
  const std::string key = std::string(section) + "/" + name;
  for (const auto& k : ws.order)
    if (k.substr(k.find('/') + 1) == name) throw Error(ErrorKind::InvalidInput, "duplicate name '" + name + "'");
  ws.order.push_back(key);
}

inline FiniteGroupTable parse_group(const json& j, const std::string& where) {
  if (j.contains("cyclic")) return cyclic_group(j.at("cyclic").get<Index>());
  if (j.contains("symmetric")) return symmetric_group(j.at("symmetric").get<Index>());
  if (j.contains("dihedral")) return dihedral_group(j.at("dihedral").get<Index>());
  if (j.contains("generators")) return group_from_generators(j.at("generators").get<std::vector<std::vector<Index>>>());
  if (j.contains("cayley")) {
    std::vector<std::string> names;
    if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
    return FiniteGroupTable(j.at("cayley").get<std::vector<std::vector<Index>>>(), names);
  }
  throw Error(ErrorKind::InvalidInput, where + ": group needs one of cyclic, symmetric, dihedral, generators, cayley");
}

inline AlgebraPtr parse_raw_algebra(const json& j, double eps, const std::string& where) {
  const Index n = require_field(j, "dim", where).get<Index>();
  if (n <= 0) throw Error(ErrorKind::InvalidInput, where + ": dim must be positive");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  else
    for (Index i = 0; i < n; ++i) labels.push_back("b" + std::to_string(i));
  std::vector<MultTerm> mult;
  for (const auto& t : require_field(j, "mult", where)) {
    if (!t.is_array() || (t.size() != 4 && t.size() != 5)) throw Error(ErrorKind::InvalidInput, where + ": mult entries are [i, j, k, re, im]");
    const double im = t.size() == 5 ? t[4].get<double>() : 0.0;
    mult.push_back({parse_index(t[0], n, where), parse_index(t[1], n, where), parse_index(t[2], n, where),
                    cplx(t[3].get<double>(), im)});
  }
  Vec unit = parse_vector(require_field(j, "unit", where), n, where + " unit");
  Mat star = parse_sparse_matrix(require_field(j, "star", where), n, n, where + " star");
  Vec trace = parse_vector(require_field(j, "trace", where), n, where + " trace");
  return std::make_shared<FiniteStarAlgebra>(labels, mult, unit, star, trace, FiniteStarAlgebra::Options{eps, false});
}

inline void parse_algebra(Workspace& ws, const std::string& name, const json& j, double eps) {
  const std::string where = "algebra '" + name + "'";
  if (j.contains("matrix")) {
    ws.algebras[name] = matrix_algebra(j.at("matrix").get<Index>());
  } else if (j.contains("multimatrix")) {
    std::vector<double> w;
    if (j.contains("weights")) w = j.at("weights").get<std::vector<double>>();
    ws.algebras[name] = multimatrix(j.at("multimatrix").get<std::vector<Index>>(), w);
  } else if (j.contains("commutative")) {
    std::vector<double> w;
    if (j.contains("weights")) w = j.at("weights").get<std::vector<double>>();
    ws.algebras[name] = commutative_algebra(j.at("commutative").get<Index>(), w);
  } else if (j.contains("kac")) {
    ws.algebras[name] = ws.kac(j.at("kac").get<std::string>()).kac->alg;
  } else if (j.contains("crossed_product")) {
    const json& c = j.at("crossed_product");
    const std::string gname = require_string(c, "group", where);
    const FiniteGroupTable& g = ws.group(gname);
    KacPtr k;
    if (c.contains("kac")) {
      const KacEntry& ke = ws.kac(c.at("kac").get<std::string>());
      if (ke.kac->name != "group_algebra" || ke.group != gname)
        throw Error(ErrorKind::InvalidInput, where + ": kac must be the group algebra of '" + gname + "'");
      k = ke.kac;
    }
    std::vector<double> w;
    if (c.contains("weights")) w = c.at("weights").get<std::vector<double>>();
    GroupAction act = permutation_action(g, require_field(c, "points", where).get<std::vector<std::vector<Index>>>(), w);
    CrossedProduct cp = crossed_product(act, k, eps);
    ws.algebras[name] = cp.algebra;
    ws.crossed.emplace(name, std::move(cp));
  } else if (j.contains("raw")) {
    ws.algebras[name] = parse_raw_algebra(j.at("raw"), eps, where);
  } else {
    throw Error(ErrorKind::InvalidInput, where + ": needs one of matrix, multimatrix, commutative, kac, crossed_product, raw");
  }
}

inline void parse_kac(Workspace& ws, const std::string& name, const json& j, double eps) {
  const std::string where = "kac '" + name + "'";
  if (j.contains("group_algebra")) {
    const std::string g = j.at("group_algebra").get<std::string>();
    ws.kacs[name] = {group_algebra(ws.group(g)), g};
  } else if (j.contains("function_algebra")) {
    const std::string g = j.at("function_algebra").get<std::string>();
    ws.kacs[name] = {function_algebra(ws.group(g)), g};
  } else if (j.contains("raw")) {
    const json& r = j.at("raw");
    AlgebraPtr alg = r.at("algebra").is_string() ? ws.algebra(r.at("algebra").get<std::string>())
                                                 : parse_raw_algebra(r.at("algebra"), eps, where);
    const Index n = alg->dim();
    if (n > kDefaultKacDimCap) throw Error(ErrorKind::InvalidInput, where + ": dimension exceeds the cap");
    Mat comult = Mat::Zero(n * n, n);
    for (const auto& t : require_field(r, "comult", where)) {
      if (!t.is_array() || (t.size() != 4 && t.size() != 5)) throw Error(ErrorKind::InvalidInput, where + ": comult entries are [i, j, k, re, im]");
      const double im = t.size() == 5 ? t[4].get<double>() : 0.0;
      comult(parse_index(t[0], n, where) * n + parse_index(t[1], n, where), parse_index(t[2], n, where)) +=
          cplx(t[3].get<double>(), im);
    }
    Vec counit = parse_vector(require_field(r, "counit", where), n, where + " counit");
    Mat antipode = parse_sparse_matrix(require_field(r, "antipode", where), n, n, where + " antipode");
    Vec haar = parse_vector(require_field(r, "haar", where), n, where + " haar");
    ws.kacs[name] = {make_kac(alg, comult, counit, antipode, haar, name), std::nullopt};
  } else {
    throw Error(ErrorKind::InvalidInput, where + ": needs one of group_algebra, function_algebra, raw");
  }
}

inline void parse_corep(Workspace& ws, const std::string& name, const json& j, double eps) {
  const std::string where = "corep '" + name + "'";
  const KacEntry& ke = ws.kac(require_string(j, "kac", where));
  if (j.contains("diagonal")) {
    if (ke.kac->name != "group_algebra" || !ke.group)
      throw Error(ErrorKind::InvalidInput, where + ": diagonal corepresentations need a group algebra");
    const FiniteGroupTable& g = ws.group(*ke.group);
    std::vector<Vec> likes;
    for (const auto& el : j.at("diagonal")) likes.push_back(unit_vector(g.order(), g.find(el.get<std::string>())));
    ws.coreps[name] = diagonal_corep(ke.kac, likes, name);
  } else if (j.contains("regular")) {
    Corepresentation u = regular_corep(ke.kac, eps);
    u.name = name;
    ws.coreps[name] = u;
  } else if (j.contains("entries")) {
    const Index n = require_field(j, "size", where).get<Index>();
    const Index da = ke.kac->dim();
    Corepresentation u(ke.kac, n, name);
    for (const auto& t : j.at("entries")) {
      if (!t.is_array() || (t.size() != 4 && t.size() != 5)) throw Error(ErrorKind::InvalidInput, where + ": entries are [i, j, m, re, im]");
      const double im = t.size() == 5 ? t[4].get<double>() : 0.0;
      const Index r = parse_index(t[0], n, where), c = parse_index(t[1], n, where), m = parse_index(t[2], da, where);
      u.data((r * n + c) * da + m) += cplx(t[3].get<double>(), im);
    }
    ws.coreps[name] = u;
  } else {
    throw Error(ErrorKind::InvalidInput, where + ": needs one of diagonal, regular, entries");
  }
}

inline void parse_coaction(Workspace& ws, const std::string& name, const json& j, double eps) {
  const std::string where = "coaction '" + name + "'";
  CoactionMap c;
  if (j.contains("delta")) {
    c = comultiplication_coaction(ws.kac(j.at("delta").get<std::string>()).kac);
  } else if (j.contains("kappa_delta")) {
    c = kappa_delta(ws.kac(j.at("kappa_delta").get<std::string>()).kac);
  } else if (j.contains("t_iota_v")) {
    c = t_iota_v(ws.corep(j.at("t_iota_v").get<std::string>()), eps);
  } else if (j.contains("dual")) {
    const std::string a = j.at("dual").get<std::string>();
    auto it = ws.crossed.find(a);
    if (it == ws.crossed.end()) throw Error(ErrorKind::UnresolvedReference, where + ": '" + a + "' is not a crossed product");
    c = it->second.dual;
  } else if (j.contains("trivial")) {
    const json& t = j.at("trivial");
    c = trivial_coaction(ws.kac(require_string(t, "kac", where)).kac, ws.algebra(require_string(t, "algebra", where)));
  } else if (j.contains("raw")) {
    const json& r = j.at("raw");
    KacPtr k = ws.kac(require_string(r, "kac", where)).kac;
    AlgebraPtr b = ws.algebra(require_string(r, "algebra", where));
    c = {k, b, parse_sparse_matrix(require_field(r, "map", where), b->dim() * k->dim(), b->dim(), where), CoactionKind::Coaction, name};
  } else {
    throw Error(ErrorKind::InvalidInput, where + ": needs one of delta, kappa_delta, t_iota_v, dual, trivial, raw");
  }
  if (j.contains("kind")) c.kind = parse_kind(j.at("kind").get<std::string>());
  c.name = name;
  ws.coactions[name] = std::move(c);
}

inline void parse_inclusion(Workspace& ws, const std::string& name, const json& j, double eps) {
  const std::string where = "inclusion '" + name + "'";
  InclusionEntry e;
  if (j.contains("matrix")) {
    IMat m = j.at("matrix").get<IMat>();
    std::vector<long long> n = require_field(j, "dims_small", where).get<std::vector<long long>>();
    std::vector<double> ws_small, ws_big;
    if (j.contains("weights_small")) ws_small = j.at("weights_small").get<std::vector<double>>();
    if (j.contains("weights_big")) ws_big = j.at("weights_big").get<std::vector<double>>();
    e.data = inclusion_from_matrix(m, n, ws_small, ws_big);
  } else {
    AlgebraPtr small = ws.algebra(require_string(j, "small", where));
    AlgebraPtr big = ws.algebra(require_string(j, "big", where));
    Mat embed;
    if (j.contains("embedding")) {
      embed = parse_sparse_matrix(j.at("embedding"), big->dim(), small->dim(), where + " embedding");
    } else if (small->dim() == 1) {
      embed = big->unit();
    } else {
      throw Error(ErrorKind::InvalidInput, where + ": embedding required unless the small algebra is C");
    }
    e.emb = SubalgebraEmbedding{small, big, embed};
  }
  ws.inclusions[name] = std::move(e);
}

}  // namespace detail

/// Builds every declared object. Validation is separate (validate_workspace).
inline Workspace load_workspace(const json& doc, const Flags& flags) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidInput, "document must be a JSON object");
  if (!doc.contains("schema") || doc.at("schema") != kSchemaVersion)
    throw Error(ErrorKind::InvalidInput, "document must declare \"schema\": 1");
  Workspace ws;
  auto section = [&](const char* key, auto&& fn) {
    if (!doc.contains(key)) return;
    const json& s = doc.at(key);
    if (!s.is_object()) throw Error(ErrorKind::InvalidInput, std::string("section '") + key + "' must be an object");
    for (auto it = s.begin(); it != s.end(); ++it) {
      detail::declare(ws, key, it.key());
      fn(it.key(), it.value());
    }
  };
  const double eps = flags.eps;
  section("groups", [&](const std::string& n, const json& j) { ws.groups.emplace(n, detail::parse_group(j, "group '" + n + "'")); });
  section("kac", [&](const std::string& n, const json& j) { detail::parse_kac(ws, n, j, eps); });
  section("algebras", [&](const std::string& n, const json& j) { detail::parse_algebra(ws, n, j, eps); });
  section("coreps", [&](const std::string& n, const json& j) { detail::parse_corep(ws, n, j, eps); });
  section("coactions", [&](const std::string& n, const json& j) { detail::parse_coaction(ws, n, j, eps); });
  section("inclusions", [&](const std::string& n, const json& j) { detail::parse_inclusion(ws, n, j, eps); });
  if (doc.contains("requests")) ws.requests = doc.at("requests");
  // Resolve request references early so unresolved names surface before any work.
  for (const auto& r : ws.requests) {
    for (const char* key : {"inclusion", "coaction", "pi", "corep"})
      if (r.contains(key)) {
        const std::string n = r.at(key).get<std::string>();
        if (std::string(key) == "inclusion") (void)ws.inclusion(n);
        else if (std::string(key) == "corep") (void)ws.corep(n);
        else (void)ws.coaction(n);
      }
  }
  return ws;
}

// ---------------------------------------------------------------------------
// Reports

inline json report_json(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"residual", c.residual}, {"pass", c.pass}});
  return {{"pass", r.pass()}, {"checks", checks}};
}

/// Validates every object; fills the inclusion matrices as a side effect.
inline json validate_workspace(Workspace& ws, const Flags& f, bool& all_pass) {
  json out = json::array();
  all_pass = true;
  auto push = [&](const std::string& section, const std::string& name, const Report& r, json extra = json::object()) {
    json item = {{"section", section}, {"name", name}};
    item.update(report_json(r));
    for (auto it = extra.begin(); it != extra.end(); ++it) item[it.key()] = it.value();
    all_pass = all_pass && r.pass();
    out.push_back(item);
  };
  for (const auto& key : ws.order) {
    const std::string section = key.substr(0, key.find('/'));
    const std::string name = key.substr(key.find('/') + 1);
    if (section == "groups") {
      const FiniteGroupTable& g = ws.group(name);
      Report r;
      r.add_flag("group axioms", true);
      push(section, name, r, {{"order", g.order()}, {"abelian", g.is_abelian()}});
    } else if (section == "kac") {
      const KacEntry& k = ws.kac(name);
      push(section, name, validate_kac(*k.kac, f.eps), {{"dim", k.kac->dim()}});
    } else if (section == "algebras") {
      const AlgebraPtr& a = ws.algebra(name);
      Report r = a->validate(f.eps);
      json extra = {{"dim", a->dim()}};
      if (r.pass()) {
        BlockStructure bs = wedderburn(*a, f.eps, f.seed);
        extra["block_sizes"] = bs.block_sizes;
        extra["weights"] = bs.weights;
        r.add("matrix units", matrix_unit_residual(*a, bs), f.eps);
      }
      push(section, name, r, extra);
    } else if (section == "coreps") {
      const Corepresentation& u = ws.corep(name);
      push(section, name, validate_corep(u, f.eps), {{"size", u.size}});
    } else if (section == "coactions") {
      const CoactionMap& c = ws.coaction(name);
      push(section, name, validate_coaction(c, f.eps), {{"kind", to_string(c.kind)}, {"dim", c.dim()}});
    } else if (section == "inclusions") {
      InclusionEntry& e = ws.inclusions.at(name);
      Report r;
      if (e.emb) {
        r = e.emb->validate(f.eps, true);
        if (r.pass()) {
          e.data = inclusion_data(*e.emb, f.eps);
          for (const auto& c : validate_inclusion(e.data, f.eps).checks) r.checks.push_back(c);
        }
      } else {
        r = validate_inclusion(e.data, f.eps);
        // Weights are optional for matrix-only data; drop the trace check then.
      }
      push(section, name, r, {{"matrix", e.data.matrix}, {"dims_small", e.data.dims_small}, {"dims_big", e.data.dims_big}});
    }
  }
  return out;
}

struct RunResult {
  int exit_code = 0;
  json report;
  std::string graph;  // DOT text for graph commands
};

namespace detail {

inline json index_result(const std::string& name, const InclusionData& d, const Flags& f) {
  MarkovIndex mi = markov_index(d);
  IntegralityResult ir = integrality_check(d, f.eps);
  json j = {{"inclusion", name},
            {"matrix", d.matrix},
            {"markov_index", mi.value},
            {"irreducible", mi.irreducible},
            {"converged", mi.converged},
            {"status", to_string(ir.status)},
            {"integer", ir.status == IntegralityStatus::Integer},
            {"gamma", {ir.alpha, ir.beta}},
            {"certificate", ir.certificate}};
  if (!mi.irreducible) j["warning"] = "NotIrreducible: MM^t is reducible, spectral radius reported";
  if (ir.status == IntegralityStatus::Integer) j["index"] = ir.index;
  else j["reason"] = ir.reason;
  return j;
}

inline json lattice_json(const InvariantLattice& lat) {
  json rows = json::array();
  for (Index i = 0; i <= lat.depth; ++i) rows.push_back(lat.row_dims(i));
  return {{"source", lat.source}, {"depth", lat.depth}, {"row_dims", rows}, {"report", report_json(lat.report)}};
}

inline json graph_json(const PrincipalGraphData& g) {
  json rows = json::array();
  for (const auto& r : g.rows) rows.push_back({{"row", r.row}, {"block_sizes", r.block_sizes}, {"edges", r.edges}});
  return {{"rows", rows}, {"depth_profile", g.depth_profile}};
}

inline std::vector<json> requests_for(const Workspace& ws, const std::string& command) {
  std::vector<json> out;
  for (const auto& r : ws.requests)
    if (r.value("command", std::string()) == command) out.push_back(r);
  return out;
}

inline InvariantLattice lattice_for(const Workspace& ws, const json& r, const Flags& f) {
  if (r.contains("corep")) return r_lattice(ws.corep(r.at("corep").get<std::string>()), f.depth, r.value("mirror", false), f.eps);
  const InclusionEntry& inc = ws.inclusion(require_string(r, "inclusion", "request"));
  return standard_invariant(inc.data, ws.coaction(require_string(r, "coaction", "request")), f.depth, f.eps);
}

}  // namespace detail

/// Executes `command` on document text. Never throws for library errors;
/// they are reported with exit code 2.
inline RunResult run(const std::string& command, const std::string& text, const Flags& f) {
  RunResult res;
  res.report = {{"tool", kToolName},
                {"version", kToolVersion},
                {"schema", kSchemaVersion},
                {"command", command},
                {"flags", {{"eps", f.eps}, {"depth", f.depth}, {"seed", f.seed}, {"format", f.format}}}};
  try {
    static const std::vector<std::string> known = {"validate", "fixed-points", "index", "tower", "invariant", "graph"};
    if (std::find(known.begin(), known.end(), command) == known.end())
      throw Error(ErrorKind::InvalidInput, "unknown command '" + command + "'");
    if (f.depth < 1) throw Error(ErrorKind::InvalidInput, "--depth must be at least 1");
    json doc = parse_document_text(text);
    Workspace ws = load_workspace(doc, f);
    bool valid = true;
    json validation = validate_workspace(ws, f, valid);
    res.report["valid"] = valid;
    if (command == "validate" || !valid) {
      res.report["validation"] = validation;
      res.exit_code = valid ? 0 : 1;
      return res;
    }
    json results = json::array();
    if (command == "index") {
      for (const auto& [name, e] : ws.inclusions) results.push_back(detail::index_result(name, e.data, f));
    } else if (command == "fixed-points") {
      auto reqs = detail::requests_for(ws, "fixed-points");
      if (reqs.empty())
        for (const auto& [name, c] : ws.coactions) reqs.push_back({{"coaction", name}});
      for (const auto& r : reqs) {
        const CoactionMap& beta = ws.coaction(require_string(r, "coaction", "request"));
        if (r.contains("pi")) {
          FixedPointTensor t = fixed_point_tensor(beta, ws.coaction(r.at("pi").get<std::string>()), f.eps);
          results.push_back({{"coaction", beta.name},
                             {"pi", r.at("pi")},
                             {"dim", t.fixed.dim()},
                             {"is_algebra", t.fixed.is_algebra},
                             {"left_regular_residual", t.left_regular_residual}});
        } else {
          FixedPointAlgebra fp = averaging(beta, f.eps);
          results.push_back({{"coaction", beta.name},
                             {"dim", fp.dim()},
                             {"is_algebra", fp.is_algebra},
                             {"idempotence_residual", fp.idempotence_residual},
                             {"closure_residual", fp.closure_residual}});
        }
      }
    } else if (command == "tower") {
      auto reqs = detail::requests_for(ws, "tower");
      if (reqs.empty())
        for (const auto& [name, e] : ws.inclusions)
          if (e.data.emb) reqs.push_back({{"inclusion", name}});
      for (const auto& r : reqs) {
        const InclusionEntry& inc = ws.inclusion(require_string(r, "inclusion", "request"));
        TowerLevelChain t = jones_tower(inc.data, f.depth - 1, f.eps);
        std::vector<Index> dims;
        std::vector<json> blocks;
        for (std::size_t l = 0; l < t.levels.size(); ++l) dims.push_back(t.levels[l]->dim());
        for (const auto& d : t.inclusions) blocks.push_back(d.matrix);
        json item = {{"inclusion", r.at("inclusion")}, {"index", t.index}, {"dims", dims}, {"inclusion_matrices", blocks},
                     {"report", report_json(t.report)}};
        if (r.contains("coaction")) {
          ExtendedCoactions ext = extend_anticoaction(ws.coaction(r.at("coaction").get<std::string>()), t, f.eps);
          item["extension"] = report_json(ext.report);
        }
        results.push_back(item);
      }
    } else if (command == "invariant" || command == "graph") {
      auto reqs = detail::requests_for(ws, "invariant");
      for (const auto& r : detail::requests_for(ws, "graph")) reqs.push_back(r);
      if (reqs.empty()) throw Error(ErrorKind::InvalidInput, "document has no invariant requests");
      for (const auto& r : reqs) {
        InvariantLattice lat = detail::lattice_for(ws, r, f);
        json item = detail::lattice_json(lat);
        if (command == "graph") {
          PrincipalGraphData g = principal_graph(lat, f.eps);
          item["graph"] = detail::graph_json(g);
          res.graph += to_dot(g);
        }
        results.push_back(item);
      }
    }
    res.report["results"] = results;
    res.exit_code = 0;
  } catch (const Error& e) {
    res.report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    res.exit_code = 2;
  } catch (const json::exception& e) {
    res.report["error"] = {{"kind", "InvalidInput"}, {"message", e.what()}};
    res.exit_code = 2;
  }
  return res;
}

/// Short human-readable summary of a report.
inline std::string text_summary(const json& report) {
  std::ostringstream os;
  os << report.at("tool").get<std::string>() << " " << report.at("version").get<std::string>() << " "
     << report.at("command").get<std::string>() << "\n";
  if (report.contains("error")) {
    os << "error: " << report["error"]["message"].get<std::string>() << "\n";
    return os.str();
  }
  if (report.contains("validation"))
    for (const auto& v : report["validation"])
      os << (v["pass"].get<bool>() ? "PASS " : "FAIL ") << v["section"].get<std::string>() << "/" << v["name"].get<std::string>() << "\n";
  if (report.contains("results"))
    for (const auto& r : report["results"]) {
      if (r.contains("row_dims")) {
        os << r["source"].get<std::string>() << "\n";
        for (std::size_t i = 0; i < r["row_dims"].size(); ++i) {
          os << "row " << i << ":";
          for (const auto& d : r["row_dims"][i]) os << " " << d.get<Index>();
          os << "\n";
        }
      } else if (r.contains("markov_index")) {
        os << r["inclusion"].get<std::string>() << ": markov index " << r["markov_index"].get<double>() << ", "
           << r["status"].get<std::string>();
        if (r.contains("index")) os << " " << r["index"].get<long long>();
        os << "\n";
      } else if (r.contains("dims")) {
        os << r["inclusion"].get<std::string>() << ": dims";
        for (const auto& d : r["dims"]) os << " " << d.get<Index>();
        os << "\n";
      } else {
        os << r["coaction"].get<std::string>() << ": fixed-point dimension " << r["dim"].get<Index>() << "\n";
      }
    }
  return os.str();
}

}  // namespace kacsub::cli
