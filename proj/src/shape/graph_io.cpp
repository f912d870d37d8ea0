// Copyright 2026 The Shapeprog Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "shapeprog/shape.hpp"

namespace shapeprog {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ShapeError("expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ShapeError("cannot open " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

std::string serialize_graph(const ShapeGraph& g) {
  json root;
  root["format"] = "shapeprog-graph";
  root["version"] = 1;
  root["name"] = g.name;
  root["diag"] = g.diag;
  root["delta"] = g.delta;
  root["contact_eps"] = g.contact_eps;
  root["cage_margin"] = g.cage_margin;
  json nodes = json::array();
  for (const auto& np : g.nodes) {
    const PartNode& n = *np;
    json cage = json::array();
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 3; ++a) cage.push_back(n.cage.rest(c, a));
    json axes = json::array();
    for (int a = 0; a < 3; ++a) axes.push_back(vec_json(n.cage.axes.col(a)));
    json verts = json::array();
    for (const auto& v : n.mesh.vertices)
      for (int a = 0; a < 3; ++a) verts.push_back(v[a]);
    json tris = json::array();
    for (const auto& t : n.mesh.triangles)
      for (int k : t) tris.push_back(k);
    nodes.push_back({{"id", n.id},
                     {"label", n.label},
                     {"phrase", n.phrase},
                     {"cage", cage},
                     {"center", vec_json(n.cage.center)},
                     {"axes", axes},
                     {"half", vec_json(n.cage.half)},
                     {"planar", n.cage.planar},
                     {"vertices", verts},
                     {"triangles", tris}});
  }
  root["nodes"] = nodes;
  json edges = json::array();
  for (const auto& e : g.edges) {
    json je{{"id", e.id}, {"kind", e.kind_name()}, {"enabled", e.enabled}};
    if (e.is_symmetry()) {
      const auto& s = e.symmetry();
      switch (s.type) {
        case SymmetryType::kReflection:
          je["normal"] = vec_json(s.normal);
          je["offset"] = s.offset;
          break;
        case SymmetryType::kTranslation:
          je["step"] = vec_json(s.step);
          break;
        case SymmetryType::kRotation:
          je["axis"] = vec_json(s.axis);
          je["center"] = vec_json(s.center);
          je["angle"] = s.angle;
          break;
      }
      json members = json::array();
      for (int m : s.members) members.push_back(g.node(m).id);
      je["members"] = members;
      json pairs = json::array();
      for (const auto& p : s.pairs)
        pairs.push_back({{"a", g.node(p.a).id}, {"b", g.node(p.b).id}, {"perm", p.perm},
                         {"power", p.power}});
      je["pairs"] = pairs;
    } else {
      const auto& a = e.attachment();
      je["a"] = g.node(a.a).id;
      je["b"] = g.node(a.b).id;
      json pts = json::array();
      for (const auto& p : a.points)
        pts.push_back({{"rest", vec_json(p.rest)}, {"weights_a", p.on_a}, {"weights_b", p.on_b}});
      je["points"] = pts;
    }
    edges.push_back(je);
  }
  root["edges"] = edges;
  json warnings = json::array();
  for (const auto& w : g.warnings) warnings.push_back(w);
  root["warnings"] = warnings;
  return root.dump(1) + "\n";
}

ShapeGraph parse_graph(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ShapeError(std::string("graph file: ") + e.what());
  }
  try {
    if (root.value("format", "") != "shapeprog-graph")
      throw ShapeError("graph file: unknown format");
    ShapeGraph g;
    g.name = root.value("name", "");
    g.diag = root.at("diag").get<double>();
    g.delta = root.at("delta").get<double>();
    g.contact_eps = root.at("contact_eps").get<double>();
    g.cage_margin = root.at("cage_margin").get<double>();
    for (const auto& jn : root.at("nodes")) {
      PartNode n;
      n.id = jn.at("id").get<std::string>();
      n.label = jn.at("label").get<std::string>();
      n.phrase = jn.value("phrase", "");
      const auto& cage = jn.at("cage");
      if (cage.size() != 24) throw ShapeError("graph file: cage needs 24 floats");
      for (int c = 0; c < 8; ++c)
        for (int a = 0; a < 3; ++a) n.cage.rest(c, a) = cage[static_cast<std::size_t>(c * 3 + a)].get<double>();
      n.cage.center = json_vec(jn.at("center"));
      for (int a = 0; a < 3; ++a) n.cage.axes.col(a) = json_vec(jn.at("axes")[static_cast<std::size_t>(a)]);
      n.cage.half = json_vec(jn.at("half"));
      n.cage.planar = jn.value("planar", false);
      const auto& verts = jn.at("vertices");
      for (std::size_t k = 0; k + 2 < verts.size(); k += 3)
        n.mesh.vertices.emplace_back(verts[k].get<double>(), verts[k + 1].get<double>(),
                                     verts[k + 2].get<double>());
      const auto& tris = jn.at("triangles");
      for (std::size_t k = 0; k + 2 < tris.size(); k += 3)
        n.mesh.triangles.push_back({tris[k].get<int>(), tris[k + 1].get<int>(), tris[k + 2].get<int>()});
      for (const auto& v : n.mesh.vertices)
        n.cage_coords.push_back(cage_coordinates(n.cage, v, g.cage_margin));
      g.nodes.push_back(std::make_shared<const PartNode>(std::move(n)));
    }
    auto part = [&](const json& j) {
      int i = g.find_part(j.get<std::string>());
      if (i < 0) throw ShapeError("graph file: edge references unknown part " + j.dump());
      return i;
    };
    for (const auto& je : root.at("edges")) {
      RelationEdge e;
      e.id = je.at("id").get<std::string>();
      e.enabled = je.value("enabled", true);
      std::string kind = je.at("kind").get<std::string>();
      if (kind == "attachment") {
        AttachmentRelation a;
        a.a = part(je.at("a"));
        a.b = part(je.at("b"));
        for (const auto& jp : je.at("points")) {
          AttachPoint p;
          p.rest = json_vec(jp.at("rest"));
          p.on_a = jp.at("weights_a").get<CageWeights>();
          p.on_b = jp.at("weights_b").get<CageWeights>();
          a.points.push_back(p);
        }
        e.rel = a;
      } else {
        SymmetryRelation s;
        if (kind == "reflection") {
          s.type = SymmetryType::kReflection;
          s.normal = json_vec(je.at("normal"));
          s.offset = je.at("offset").get<double>();
        } else if (kind == "translation") {
          s.type = SymmetryType::kTranslation;
          s.step = json_vec(je.at("step"));
        } else if (kind == "rotation") {
          s.type = SymmetryType::kRotation;
          s.axis = json_vec(je.at("axis"));
          s.center = json_vec(je.at("center"));
          s.angle = je.at("angle").get<double>();
        } else {
          throw ShapeError("graph file: unknown edge kind '" + kind + "'");
        }
        for (const auto& m : je.at("members")) s.members.push_back(part(m));
        for (const auto& jp : je.at("pairs")) {
          SymmetryPair p;
          p.a = part(jp.at("a"));
          p.b = part(jp.at("b"));
          p.perm = jp.at("perm").get<std::array<int, 8>>();
          p.power = jp.value("power", 1);
          s.pairs.push_back(p);
        }
        e.rel = s;
      }
      g.edges.push_back(std::move(e));
    }
    if (root.contains("warnings"))
      for (const auto& w : root["warnings"]) g.warnings.push_back(w.get<std::string>());
    return g;
  } catch (const json::exception& e) {
    throw ShapeError(std::string("graph file: ") + e.what());
  }
}

void save_graph(const std::filesystem::path& path, const ShapeGraph& g) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ShapeError("cannot write " + path.string());
  f << serialize_graph(g);
}

ShapeGraph load_graph(const std::filesystem::path& path) { return parse_graph(read_file(path)); }

SegmentedMesh load_manifest(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(path)) file = path / "manifest.json";
  json root;
  try {
    root = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ShapeError(std::string("manifest: ") + e.what());
  }
  SegmentedMesh out;
  out.name = root.value("name", file.parent_path().filename().string());
  if (!root.contains("parts") || !root["parts"].is_array())
    throw ShapeError("manifest: missing parts array");
  for (const auto& jp : root["parts"]) {
    PartInput p;
    p.id = jp.at("id").get<std::string>();
    p.label = jp.value("label", p.id);
    p.mesh = read_obj(file.parent_path() / jp.at("file").get<std::string>());
    out.parts.push_back(std::move(p));
  }
  return out;
}

}  // namespace shapeprog
