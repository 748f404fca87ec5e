#include "pairsynth/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pairsynth {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError((where.empty() ? "/" : where) + ": " + what);
}

void expect_object(const Json& j, const std::string& where,
                   const std::set<std::string>& required,
                   const std::set<std::string>& optional = {}) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!required.count(key) && !optional.count(key)) {
      fail(where, "unknown field '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!j.contains(key)) fail(where, "missing field '" + key + "'");
  }
}

const Json& expect_array(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int get_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::vector<std::string> get_strings(const Json& j, const std::string& where) {
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const auto& v : expect_array(j, where)) {
    out.push_back(get_string(v, where + "/" + std::to_string(i++)));
  }
  return out;
}

Json complex_to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j, const std::string& where) {
  expect_object(j, where, {"re", "im"});
  return {get_number(j["re"], where + "/re"), get_number(j["im"], where + "/im")};
}

Json label_to_json(const ModeLabel& l) { return Json::array({l.external, l.internal}); }

ModeLabel label_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [external, internal]");
  return {get_string(j[0], where + "/0"), get_string(j[1], where + "/1")};
}

std::size_t mode_index(const ModeSpace& space, const ModeLabel& l,
                       const std::string& where) {
  if (!space.contains(l.external, l.internal)) {
    fail(where, "unknown mode (" + l.external + ", " + l.internal + ")");
  }
  return space.index(l);
}

Json matrix_to_json(const CMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const Json& j, const std::string& where, std::size_t n) {
  expect_object(j, where, {"re", "im"});
  const auto k = static_cast<Eigen::Index>(n);
  CMatrix m(k, k);
  for (const char* part : {"re", "im"}) {
    const std::string w = where + "/" + part;
    const Json& rows = expect_array(j[part], w);
    if (rows.size() != n) fail(w, "expected " + std::to_string(n) + " rows");
    for (std::size_t r = 0; r < n; ++r) {
      const std::string wr = w + "/" + std::to_string(r);
      const Json& row = expect_array(rows[r], wr);
      if (row.size() != n) fail(wr, "expected " + std::to_string(n) + " columns");
      for (std::size_t c = 0; c < n; ++c) {
        const double v = get_number(row[c], wr + "/" + std::to_string(c));
        auto& z = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        z = part[0] == 'r' ? Complex(v, z.imag()) : Complex(z.real(), v);
      }
    }
  }
  return m;
}

Json map_to_json(const std::map<std::string, int>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<std::string, int> map_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  std::map<std::string, int> out;
  for (const auto& [k, v] : j.items()) out[k] = get_int(v, where + "/" + k);
  return out;
}

template <typename F>
auto rethrow_domain(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
}

Json diagnostics_to_json(const Diagnostics& d) {
  Json j{{"unitarity_residual", d.unitarity_residual},
         {"reconstruction_residual", d.reconstruction_residual},
         {"gain", d.gain},
         {"fidelity", d.fidelity}};
  j["contamination"] = d.contamination ? Json(*d.contamination) : Json(nullptr);
  j["warning"] = d.warning ? Json(*d.warning) : Json(nullptr);
  return j;
}

Diagnostics diagnostics_from_json(const Json& j, const std::string& where) {
  expect_object(j, where,
                {"unitarity_residual", "reconstruction_residual", "gain", "fidelity",
                 "contamination", "warning"});
  Diagnostics d;
  d.unitarity_residual = get_number(j["unitarity_residual"], where + "/unitarity_residual");
  d.reconstruction_residual =
      get_number(j["reconstruction_residual"], where + "/reconstruction_residual");
  d.gain = get_number(j["gain"], where + "/gain");
  d.fidelity = get_number(j["fidelity"], where + "/fidelity");
  if (!j["contamination"].is_null()) {
    d.contamination = get_number(j["contamination"], where + "/contamination");
  }
  if (!j["warning"].is_null()) d.warning = get_string(j["warning"], where + "/warning");
  return d;
}

}  // namespace

// -------------------------------------------------------------------- graph

Json graph_to_json(const GraphFile& g) {
  Json edges = Json::array();
  for (const auto& e : g.graph.edges()) {
    edges.push_back({{"u", e.u},
                     {"color_u", e.color_u},
                     {"v", e.v},
                     {"color_v", e.color_v},
                     {"weight", complex_to_json(e.weight)}});
  }
  return Json{{"vertices", g.graph.vertices()},
              {"colors", g.graph.colors()},
              {"edges", edges},
              {"encoding",
               {{"qudit_of", map_to_json(g.encoding.qudit_of())},
                {"logical_of", map_to_json(g.encoding.logical_of())}}}};
}

GraphFile graph_from_json(const Json& j) {
  expect_object(j, "", {"vertices", "colors", "edges", "encoding"});
  auto vertices = get_strings(j["vertices"], "/vertices");
  auto colors = get_strings(j["colors"], "/colors");
  std::vector<Edge> edges;
  std::size_t i = 0;
  for (const auto& e : expect_array(j["edges"], "/edges")) {
    const std::string w = "/edges/" + std::to_string(i++);
    expect_object(e, w, {"u", "color_u", "v", "color_v", "weight"});
    edges.push_back({get_string(e["u"], w + "/u"), get_string(e["color_u"], w + "/color_u"),
                     get_string(e["v"], w + "/v"), get_string(e["color_v"], w + "/color_v"),
                     complex_from_json(e["weight"], w + "/weight")});
  }
  const Json& enc = j["encoding"];
  expect_object(enc, "/encoding", {"qudit_of", "logical_of"});
  GraphFile out;
  out.graph = rethrow_domain("/edges", [&] {
    return ColoredGraph(std::move(vertices), std::move(colors), std::move(edges));
  });
  out.encoding = rethrow_domain("/encoding", [&] {
    Encoding e(map_from_json(enc["qudit_of"], "/encoding/qudit_of"),
               map_from_json(enc["logical_of"], "/encoding/logical_of"));
    e.check_covers(out.graph.mode_space());
    return e;
  });
  return out;
}

// ---------------------------------------------------------------- partition

Json partition_to_json(const Partition& p, const ModeSpace& space) {
  Json groups = Json::array();
  for (std::size_t g = 0; g < p.num_groups(); ++g) {
    Json modes = Json::array();
    for (std::size_t m : p.members(g)) modes.push_back(label_to_json(space.label(m)));
    groups.push_back({{"name", p.name(g)}, {"modes", modes}});
  }
  return Json{{"groups", groups}};
}

Partition partition_from_json(const Json& j, const ModeSpace& space) {
  expect_object(j, "", {"groups"});
  std::vector<std::string> order;
  std::vector<std::string> group_of(space.size());
  std::vector<bool> seen(space.size(), false);
  std::size_t gi = 0;
  for (const auto& g : expect_array(j["groups"], "/groups")) {
    const std::string w = "/groups/" + std::to_string(gi++);
    expect_object(g, w, {"name", "modes"});
    const std::string name = get_string(g["name"], w + "/name");
    order.push_back(name);
    std::size_t mi = 0;
    for (const auto& m : expect_array(g["modes"], w + "/modes")) {
      const std::string wm = w + "/modes/" + std::to_string(mi++);
      const std::size_t idx = mode_index(space, label_from_json(m, wm), wm);
      if (seen[idx]) fail(wm, "mode assigned to more than one group");
      seen[idx] = true;
      group_of[idx] = name;
    }
  }
  for (std::size_t m = 0; m < space.size(); ++m) {
    if (!seen[m]) {
      const ModeLabel l = space.label(m);
      fail("/groups", "mode (" + l.external + ", " + l.internal + ") is in no group");
    }
  }
  return rethrow_domain("/groups", [&] { return Partition(order, group_of); });
}

// ------------------------------------------------------------------- design

Json design_to_json(const DeviceDesign& d) {
  Json bar = Json::array();
  for (const auto& s : source_list(d.solution.beta_bar, d.space)) {
    bar.push_back({{"modes", Json::array({label_to_json(s.first), label_to_json(s.second)})},
                   {"re", s.amplitude.real()},
                   {"im", s.amplitude.imag()}});
  }
  Json blocks = Json::object();
  for (std::size_t g = 0; g < d.partition.num_groups(); ++g) {
    blocks[d.partition.name(g)] = matrix_to_json(d.solution.block_unitaries.at(g));
  }
  Json log = Json::array();
  for (const auto& r : d.solution.resolution_log) {
    log.push_back({{"groups", Json::array({r.group_i, r.group_j})},
                   {"case", to_string(r.tag)}});
  }
  return Json{{"modes", {{"externals", d.space.externals()},
                         {"internals", d.space.internals()}}},
              {"partition", partition_to_json(d.partition, d.space)},
              {"scale", d.scale},
              {"residual", d.solution.residual},
              {"beta_bar", bar},
              {"unitary_blocks", blocks},
              {"resolution_log", log},
              {"diagnostics", diagnostics_to_json(d.diagnostics)}};
}

DeviceDesign design_from_json(const Json& j) {
  expect_object(j, "",
                {"modes", "partition", "scale", "residual", "beta_bar",
                 "unitary_blocks", "resolution_log", "diagnostics"});
  DeviceDesign d;
  const Json& modes = j["modes"];
  expect_object(modes, "/modes", {"externals", "internals"});
  d.space = rethrow_domain("/modes", [&] {
    return ModeSpace(get_strings(modes["externals"], "/modes/externals"),
                     get_strings(modes["internals"], "/modes/internals"));
  });
  try {
    d.partition = partition_from_json(j["partition"], d.space);
  } catch (const ParseError& e) {
    throw ParseError(std::string("/partition") + e.what());
  }
  d.scale = get_number(j["scale"], "/scale");
  d.solution.partition = d.partition;
  d.solution.residual = get_number(j["residual"], "/residual");

  std::vector<PairEntry> entries;
  std::size_t i = 0;
  for (const auto& e : expect_array(j["beta_bar"], "/beta_bar")) {
    const std::string w = "/beta_bar/" + std::to_string(i++);
    expect_object(e, w, {"modes", "re", "im"});
    const Json& pair = e["modes"];
    if (!pair.is_array() || pair.size() != 2) fail(w + "/modes", "expected two modes");
    std::size_t a = mode_index(d.space, label_from_json(pair[0], w + "/modes/0"), w);
    std::size_t b = mode_index(d.space, label_from_json(pair[1], w + "/modes/1"), w);
    if (b < a) std::swap(a, b);
    entries.push_back({a, b, {get_number(e["re"], w + "/re"), get_number(e["im"], w + "/im")}});
  }
  d.solution.beta_bar = rethrow_domain("/beta_bar", [&] {
    return PairMatrix::from_upper(d.space.size(), entries);
  });

  const Json& blocks = j["unitary_blocks"];
  if (!blocks.is_object()) fail("/unitary_blocks", "expected an object");
  for (const auto& [name, value] : blocks.items()) {
    if (!std::count(d.partition.groups().begin(), d.partition.groups().end(), name)) {
      fail("/unitary_blocks", "unknown group '" + name + "'");
    }
  }
  for (std::size_t g = 0; g < d.partition.num_groups(); ++g) {
    const std::string& name = d.partition.name(g);
    if (!blocks.contains(name)) fail("/unitary_blocks", "missing group '" + name + "'");
    d.solution.block_unitaries.push_back(matrix_from_json(
        blocks[name], "/unitary_blocks/" + name, d.partition.members(g).size()));
  }

  i = 0;
  for (const auto& r : expect_array(j["resolution_log"], "/resolution_log")) {
    const std::string w = "/resolution_log/" + std::to_string(i++);
    expect_object(r, w, {"groups", "case"});
    const auto groups = get_strings(r["groups"], w + "/groups");
    if (groups.size() != 2) fail(w + "/groups", "expected two group names");
    const CaseTag tag = rethrow_domain(w + "/case", [&] {
      return case_tag_from_string(get_string(r["case"], w + "/case"));
    });
    d.solution.resolution_log.push_back({groups[0], groups[1], tag});
  }

  d.diagnostics = diagnostics_from_json(j["diagnostics"], "/diagnostics");
  d.sources = source_list(d.solution.beta_bar, d.space);
  return d;
}

Json over_constraint_to_json(const OverConstraintReport& r) {
  auto rows = [](const std::vector<BlockResidual>& v) {
    Json out = Json::array();
    for (const auto& b : v) {
      out.push_back({{"groups", Json::array({b.group_i, b.group_j})},
                     {"residual", b.residual}});
    }
    return out;
  };
  Json log = Json::array();
  for (const auto& rec : r.resolution_log) {
    log.push_back({{"groups", Json::array({rec.group_i, rec.group_j})},
                   {"case", to_string(rec.tag)}});
  }
  return Json{{"status", "over-constrained"},
              {"residual", r.residual},
              {"tolerance", r.tolerance},
              {"blocks", rows(r.blocks)},
              {"inconsistent", rows(r.inconsistent)},
              {"resolution_log", log}};
}

// -------------------------------------------------------------------- files

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << canonical_dump(j);
  if (!out) throw ParseError(path + ": write failed");
}

namespace {

template <typename F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.what());
  }
}

}  // namespace

GraphFile load_graph_file(const std::string& path) {
  const Json j = read_json_file(path);
  return with_path(path, [&] { return graph_from_json(j); });
}

Partition load_partition_file(const std::string& path, const ModeSpace& space) {
  const Json j = read_json_file(path);
  return with_path(path, [&] { return partition_from_json(j, space); });
}

DeviceDesign load_design_file(const std::string& path) {
  const Json j = read_json_file(path);
  return with_path(path, [&] { return design_from_json(j); });
}

}  // namespace pairsynth
