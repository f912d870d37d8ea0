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

#include "shapeprog/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace shapeprog {

Eigen::AlignedBox3d TriMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

TriMesh parse_obj(const std::string& text) {
  TriMesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw MeshIoError("obj line " + std::to_string(line_no) + ": bad vertex");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        // "i", "i/t", "i/t/n", "i//n"; negative indices are relative.
        int v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc())
          throw MeshIoError("obj line " + std::to_string(line_no) + ": bad face index");
        if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
        if (v < 1 || v > static_cast<int>(mesh.vertices.size()))
          throw MeshIoError("obj line " + std::to_string(line_no) + ": index out of range");
        idx.push_back(v - 1);
      }
      if (idx.size() < 3)
        throw MeshIoError("obj line " + std::to_string(line_no) + ": face needs 3 indices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  return mesh;
}

TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw MeshIoError("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_obj(ss.str());
}

namespace {

void append_fixed6(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  out += s;
}

}  // namespace

std::string format_obj(const TriMesh& mesh, const std::string& object_name) {
  std::string out;
  out.reserve(mesh.vertices.size() * 40 + mesh.triangles.size() * 24);
  if (!object_name.empty()) out += "o " + object_name + "\n";
  for (const auto& v : mesh.vertices) {
    out += "v ";
    append_fixed6(out, v.x());
    out += ' ';
    append_fixed6(out, v.y());
    out += ' ';
    append_fixed6(out, v.z());
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' +
           std::to_string(t[2] + 1) + '\n';
  }
  return out;
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh,
               const std::string& object_name) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MeshIoError("cannot write " + path.string());
  f << format_obj(mesh, object_name);
}

TriMesh oriented_box_mesh(const Vec3& center, const Vec3& half, const Mat3& rot) {
  TriMesh m;
  for (int c = 0; c < 8; ++c) {
    Vec3 local((c & 1) ? half.x() : -half.x(), (c & 2) ? half.y() : -half.y(),
               (c & 4) ? half.z() : -half.z());
    m.vertices.push_back(center + rot * local);
  }
  // Outward winding for the corner-bit vertex order.
  m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                 {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return m;
}

TriMesh box_mesh(const Vec3& lo, const Vec3& hi) {
  return oriented_box_mesh(0.5 * (lo + hi), 0.5 * (hi - lo), Mat3::Identity());
}

TriMesh merge_meshes(const std::vector<TriMesh>& meshes) {
  TriMesh out;
  for (const auto& m : meshes) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const auto& t : m.triangles)
      out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
  return out;
}

int count_nonmanifold_edges(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  int bad = 0;
  for (const auto& [e, n] : uses)
    if (n > 2) ++bad;
  return bad;
}

double winding_number(const TriMesh& mesh, const Vec3& p) {
  // Van Oosterom-Strackee solid angle per triangle.
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    Vec3 a = mesh.vertices[static_cast<std::size_t>(t[0])] - p;
    Vec3 b = mesh.vertices[static_cast<std::size_t>(t[1])] - p;
    Vec3 c = mesh.vertices[static_cast<std::size_t>(t[2])] - p;
    double la = a.norm(), lb = b.norm(), lc = c.norm();
    double num = a.dot(b.cross(c));
    double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

}  // namespace shapeprog
