#include "vpen/instance_io.hpp"

#include <fstream>

#include "vpen/errors.hpp"

namespace vpen {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json quad_to_json(const Quadratic& g) {
  return json{{"Q", mat_to_json(g.Q)}, {"q", vec_to_json(g.q)}, {"r", g.r}};
}

void meta_to_json(const InstanceMeta& meta, json& doc) {
  doc["name"] = meta.name;
  if (!meta.note.empty()) doc["note"] = meta.note;
  if (meta.reference) {
    doc["reference"] = {{"x", vec_to_json(meta.reference->x)},
                        {"f", meta.reference->f},
                        {"tol", meta.reference->tol}};
  }
  if (meta.exact_tau) doc["exact_tau"] = vec_to_json(*meta.exact_tau);
}

// Reader that tracks a JSON pointer for error messages.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  bool has(const char* key) const { return node_.is_object() && node_.contains(key); }

  Reader at(const char* key) const {
    if (!node_.is_object()) fail("expected an object");
    if (!node_.contains(key)) throw ParseError(path_ + "/" + key, "missing field");
    return Reader(node_.at(key), path_ + "/" + key);
  }

  Reader at(std::size_t i) const { return Reader(node_.at(i), path_ + "/" + std::to_string(i)); }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }

  int integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<int>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  std::size_t size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  Eigen::VectorXd vector(std::optional<Eigen::Index> expected = std::nullopt) const {
    const std::size_t n = size();
    if (expected && static_cast<Eigen::Index>(n) != *expected) {
      fail("expected " + std::to_string(*expected) + " entries, got " + std::to_string(n));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) const {
    if (static_cast<Eigen::Index>(size()) != rows) {
      fail("expected " + std::to_string(rows) + " rows");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      m.row(i) = at(static_cast<std::size_t>(i)).vector(cols).transpose();
    }
    return m;
  }

  Quadratic quadratic(Eigen::Index d) const {
    Quadratic g;
    g.Q = has("Q") ? at("Q").matrix(d, d) : Eigen::MatrixXd::Zero(d, d);
    g.q = has("q") ? at("q").vector(d) : Eigen::VectorXd::Zero(d);
    g.r = has("r") ? at("r").number() : 0.0;
    return g;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, what); }

 private:
  const json& node_;
  std::string path_;
};

InstanceMeta read_meta(const Reader& r) {
  InstanceMeta meta;
  meta.name = r.at("name").string();
  if (r.has("note")) meta.note = r.at("note").string();
  if (r.has("reference")) {
    const Reader ref = r.at("reference");
    ReferenceOptimum opt;
    opt.x = ref.at("x").vector();
    opt.f = ref.at("f").number();
    if (ref.has("tol")) opt.tol = ref.at("tol").number();
    meta.reference = std::move(opt);
  }
  if (r.has("exact_tau")) meta.exact_tau = r.at("exact_tau").vector();
  return meta;
}

void read_box(const Reader& r, Eigen::Index d, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const Reader box = r.at("box");
  lo = box.at("lo").vector(d);
  hi = box.at("hi").vector(d);
}

}  // namespace

json serialize_instance(const InstanceSpec& spec) {
  json doc;
  doc["family"] = family_of(spec);
  meta_to_json(meta_of(spec), doc);
  if (const auto* s = std::get_if<NlpSpec>(&spec)) {
    doc["dim"] = s->lo.size();
    doc["box"] = {{"lo", vec_to_json(s->lo)}, {"hi", vec_to_json(s->hi)}};
    doc["objective"] = quad_to_json(s->objective);
    doc["inequalities"] = json::array();
    for (const auto& g : s->inequalities) doc["inequalities"].push_back(quad_to_json(g));
    doc["equalities"] = json::array();
    for (const auto& g : s->equalities) doc["equalities"].push_back(quad_to_json(g));
    if (!s->projection_hint.empty()) doc["projection_hint"] = s->projection_hint;
  } else if (const auto* s = std::get_if<SdpSpec>(&spec)) {
    doc["dim"] = s->lo.size();
    doc["box"] = {{"lo", vec_to_json(s->lo)}, {"hi", vec_to_json(s->hi)}};
    doc["objective"] = quad_to_json(s->objective);
    json maps = json::array();
    for (const auto& a : s->a) maps.push_back(mat_to_json(a));
    doc["matrix_map"] = {{"A0", mat_to_json(s->a0)}, {"A", std::move(maps)}};
  } else if (const auto* s = std::get_if<ControlSpec>(&spec)) {
    doc["control"] = {{"horizon", s->horizon},     {"nodes", s->nodes},
                      {"x0", s->x0},               {"xT", s->xT},
                      {"u_lo", s->u_lo},           {"u_hi", s->u_hi},
                      {"weight", s->weight},       {"state_bound", s->state_bound},
                      {"bound_until", s->bound_until}};
  }
  return doc;
}

InstanceSpec deserialize_instance(const json& doc) {
  const Reader r(doc, "");
  const std::string family = r.at("family").string();
  if (family == "nlp") {
    NlpSpec s;
    s.meta = read_meta(r);
    const Eigen::Index d = r.at("dim").integer();
    if (d < 1) r.at("dim").fail("dimension must be >= 1");
    read_box(r, d, s.lo, s.hi);
    s.objective = r.at("objective").quadratic(d);
    for (const char* key : {"inequalities", "equalities"}) {
      if (!r.has(key)) continue;
      const Reader list = r.at(key);
      auto& out = std::string(key) == "inequalities" ? s.inequalities : s.equalities;
      for (std::size_t i = 0; i < list.size(); ++i) out.push_back(list.at(i).quadratic(d));
    }
    if (r.has("projection_hint")) s.projection_hint = r.at("projection_hint").string();
    return s;
  }
  if (family == "sdp") {
    SdpSpec s;
    s.meta = read_meta(r);
    const Eigen::Index d = r.at("dim").integer();
    if (d < 1) r.at("dim").fail("dimension must be >= 1");
    read_box(r, d, s.lo, s.hi);
    s.objective = r.at("objective").quadratic(d);
    const Reader map = r.at("matrix_map");
    const Reader a0 = map.at("A0");
    const auto l = static_cast<Eigen::Index>(a0.size());
    s.a0 = a0.matrix(l, l);
    const Reader list = map.at("A");
    if (static_cast<Eigen::Index>(list.size()) != d) list.fail("need one matrix per variable");
    for (std::size_t i = 0; i < list.size(); ++i) s.a.push_back(list.at(i).matrix(l, l));
    return s;
  }
  if (family == "control") {
    ControlSpec s;
    s.meta = read_meta(r);
    const Reader c = r.at("control");
    s.horizon = c.at("horizon").number();
    s.nodes = c.at("nodes").integer();
    s.x0 = c.at("x0").number();
    s.xT = c.at("xT").number();
    s.u_lo = c.at("u_lo").number();
    s.u_hi = c.at("u_hi").number();
    s.weight = c.at("weight").number();
    s.state_bound = c.at("state_bound").number();
    s.bound_until = c.at("bound_until").number();
    return s;
  }
  r.at("family").fail("unknown family tag '" + family + "' (expected nlp, sdp or control)");
}

InstanceSpec load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open instance file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
  return deserialize_instance(doc);
}

}  // namespace vpen
