#include "flagdyn/io.hpp"

#include <cstdio>
#include <sstream>

namespace flagdyn {

namespace {

Json require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::InvalidArgument, std::string("json: missing key ") + key);
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("json: bad value for ") + key);
  }
}

Json doubles(const std::vector<double>& v) { return Json(v); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json to_json(const Frame& x) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < x.n(); ++r)
    for (Eigen::Index c = 0; c < x.k(); ++c) entries.push_back(x.mat()(r, c));
  return Json{{"n", x.n()}, {"k", x.k()}, {"kind", to_string(x.kind())}, {"entries", entries}};
}

Frame frame_from_json(const Json& j) {
  const auto n = get<Eigen::Index>(j, "n");
  const auto k = get<Eigen::Index>(j, "k");
  const auto kind = get<std::string>(j, "kind");
  const auto entries = get<std::vector<double>>(j, "entries");
  if (kind != "orthogonal" && kind != "unitary") fail(ErrorCode::InvalidArgument, "json: unknown frame kind");
  if (n < 1 || k < 1 || static_cast<Eigen::Index>(entries.size()) != n * k)
    fail(ErrorCode::ShapeMismatch, "json: frame entry count differs from n*k");
  MatX m(n, k);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < k; ++c) m(r, c) = entries[r * k + c];
  return Frame(m, kind == "unitary" ? FrameKind::unitary : FrameKind::orthogonal);
}

Json to_json(const Tree& t) {
  return Json{{"n", t.n()}, {"k", t.k()}, {"symplectic", t.symplectic()}, {"nodes", t.lists()}};
}

Tree tree_from_json(const Json& j) {
  const int n = get<int>(j, "n");
  const int k = get<int>(j, "k");
  const auto nodes = get<std::vector<std::vector<int>>>(j, "nodes");
  if (static_cast<int>(nodes.size()) != k) fail(ErrorCode::ShapeMismatch, "json: tree node count differs from k");
  return Tree::from_lists(n, nodes, get<bool>(j, "symplectic"));
}

Json to_json(const Perm& p) { return Json(p.word()); }

Perm perm_from_json(const Json& j, int n, bool symplectic) {
  try {
    return Perm(n, j.get<std::vector<int>>(), symplectic);
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::InvalidArgument, "json: permutation must be an integer list");
  }
}

Json to_json(const SkeletonGraph& g) {
  Json v = Json::array(), e = Json::array();
  for (const Perm& p : g.vertices) v.push_back(to_json(p));
  for (auto [t, h] : g.edges) e.push_back(Json::array({t, h}));
  return Json{{"n", g.n}, {"k", g.k}, {"symplectic", g.symplectic}, {"vertices", v}, {"edges", e}, {"index", g.index}};
}

SkeletonGraph graph_from_json(const Json& j) {
  SkeletonGraph g;
  g.n = get<int>(j, "n");
  g.k = get<int>(j, "k");
  g.symplectic = get<bool>(j, "symplectic");
  for (const Json& v : require(j, "vertices")) g.vertices.push_back(perm_from_json(v, g.n, g.symplectic));
  g.edges = get<std::vector<std::pair<int, int>>>(j, "edges");
  g.index = get<std::vector<int>>(j, "index");
  const int nv = static_cast<int>(g.vertices.size());
  if (static_cast<int>(g.index.size()) != nv) fail(ErrorCode::ShapeMismatch, "json: index length differs from vertices");
  g.out.resize(nv);
  g.in.resize(nv);
  for (auto [t, h] : g.edges) {
    if (t < 0 || h < 0 || t >= nv || h >= nv) fail(ErrorCode::BadIndex, "json: edge endpoint out of range");
    g.out[t].push_back(h);
    g.in[h].push_back(t);
  }
  return g;
}

std::string to_dot(const SkeletonGraph& g) {
  std::ostringstream os;
  os << "digraph skeleton {\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    os << "  v" << v << " [label=\"" << g.vertices[v].to_string() << " [H=" << g.index[v] << "]\"];\n";
  for (auto [t, h] : g.edges) os << "  v" << t << " -> v" << h << ";\n";
  os << "}\n";
  return os.str();
}

Json to_json(const Certificate& c) {
  Json pts = Json::array();
  for (const CriticalReport& r : c.per_point) {
    Json p{{"perm", to_json(r.perm)},
           {"H", r.h},
           {"morse_index", r.morse_index},
           {"jacobian_eigs", doubles(r.jacobian_eigs)},
           {"hessian_eigs", doubles(r.hessian_eigs)}};
    if (r.numeric_hessian_eigs) p["numeric_hessian_eigs"] = doubles(*r.numeric_hessian_eigs);
    p["nondegenerate"] = r.nondegenerate;
    p["ok"] = r.ok;
    pts.push_back(std::move(p));
  }
  Json checks = Json::object();
  for (const auto& ch : c.checks) checks[ch.name] = ch.pass;
  return Json{{"n", c.n},
              {"k", c.k},
              {"symplectic", c.symplectic},
              {"morse_coeffs", c.morse.coeffs()},
              {"poincare_coeffs", c.poincare.coeffs()},
              {"match", c.match},
              {"checks", checks},
              {"per_point", pts}};
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.n = get<int>(j, "n");
  c.k = get<int>(j, "k");
  c.symplectic = get<bool>(j, "symplectic");
  c.morse = Polynomial(get<std::vector<std::int64_t>>(j, "morse_coeffs"));
  c.poincare = Polynomial(get<std::vector<std::int64_t>>(j, "poincare_coeffs"));
  c.match = get<bool>(j, "match");
  if (j.contains("checks"))
    for (const auto& [name, pass] : j.at("checks").items()) c.checks.push_back({name, pass.get<bool>()});
  for (const Json& p : require(j, "per_point")) {
    CriticalReport r(perm_from_json(require(p, "perm"), c.n, c.symplectic));
    r.h = get<int>(p, "H");
    r.morse_index = get<int>(p, "morse_index");
    r.jacobian_eigs = get<std::vector<double>>(p, "jacobian_eigs");
    r.hessian_eigs = get<std::vector<double>>(p, "hessian_eigs");
    if (p.contains("numeric_hessian_eigs")) r.numeric_hessian_eigs = get<std::vector<double>>(p, "numeric_hessian_eigs");
    r.nondegenerate = get<bool>(p, "nondegenerate");
    r.ok = get<bool>(p, "ok");
    c.per_point.push_back(std::move(r));
  }
  return c;
}

std::string certificate_csv(const Certificate& c) {
  std::ostringstream os;
  os << "perm,H,morse_index,expanding,ok\n";
  for (const CriticalReport& r : c.per_point) {
    int expanding = 0;
    for (double v : r.jacobian_eigs) expanding += v > 1.0;
    os << r.perm.to_string() << ',' << r.h << ',' << r.morse_index << ',' << expanding << ',' << (r.ok ? 1 : 0)
       << '\n';
  }
  return os.str();
}

Json audit_summary_json(const LyapunovReport& r) {
  Json j{{"monotone", r.monotone}, {"max_violation", r.max_violation}, {"strict", r.strict}, {"stalls", r.stalls}};
  j["converged_to"] = r.converged_to ? Json(*r.converged_to) : Json(nullptr);
  return j;
}

std::string audit_csv(const LyapunovReport& r) {
  std::ostringstream os;
  os << "t,Q,grad_norm,field_norm\n";
  for (const AuditSample& s : r.samples)
    os << format_double(s.t) << ',' << format_double(s.q) << ',' << format_double(s.grad_norm) << ','
       << format_double(s.field_norm) << '\n';
  return os.str();
}

}  // namespace flagdyn
