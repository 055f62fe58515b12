#include "dexmap/mesh.hpp"

#include "dexmap/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace dexmap {

double TriangleMesh::face_area(std::size_t face) const {
  const Vec3 a = corner(face, 0);
  return 0.5 * (corner(face, 1) - a).cross(corner(face, 2) - a).norm();
}

Vec3 TriangleMesh::face_normal(std::size_t face) const {
  const Vec3 a = corner(face, 0);
  return (corner(face, 1) - a).cross(corner(face, 2) - a).normalized();
}

namespace {

void add_polygon(TriangleMesh& mesh, const std::vector<int>& poly) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
  }
}

TriangleMesh load_obj(std::istream& in, const std::string& name) {
  TriangleMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z())) {
        throw ParseError(name + ":" + std::to_string(line_no) + ": bad vertex record");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ss >> tok) {
        const auto slash = tok.find('/');
        int idx = 0;
        try {
          idx = std::stoi(tok.substr(0, slash));
        } catch (const std::exception&) {
          throw ParseError(name + ":" + std::to_string(line_no) + ": bad face index '" + tok + "'");
        }
        idx = idx < 0 ? static_cast<int>(mesh.vertices.size()) + idx : idx - 1;
        poly.push_back(idx);
      }
      if (poly.size() < 3) {
        throw ParseError(name + ":" + std::to_string(line_no) + ": face with fewer than 3 vertices");
      }
      add_polygon(mesh, poly);
    }
  }
  return mesh;
}

enum class PlyFormat { ascii, binary_le, binary_be };

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

std::size_t ply_type_size(const std::string& t) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},  {"uchar", 1},  {"int8", 1},   {"uint8", 1},   {"short", 2},
      {"ushort", 2}, {"int16", 2}, {"uint16", 2}, {"int", 4},     {"uint", 4},
      {"int32", 4}, {"uint32", 4}, {"float", 4},  {"float32", 4}, {"double", 8},
      {"float64", 8}};
  const auto it = sizes.find(t);
  if (it == sizes.end()) throw ParseError("unsupported PLY property type '" + t + "'");
  return it->second;
}

double ply_read_binary(std::istream& in, const std::string& t, bool swap) {
  const std::size_t n = ply_type_size(t);
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) {
    throw ParseError("truncated PLY body");
  }
  if (swap) std::reverse(buf, buf + n);
  auto as = [&]<typename T>() {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return as.operator()<std::int8_t>();
  if (t == "uchar" || t == "uint8") return as.operator()<std::uint8_t>();
  if (t == "short" || t == "int16") return as.operator()<std::int16_t>();
  if (t == "ushort" || t == "uint16") return as.operator()<std::uint16_t>();
  if (t == "int" || t == "int32") return as.operator()<std::int32_t>();
  if (t == "uint" || t == "uint32") return as.operator()<std::uint32_t>();
  if (t == "float" || t == "float32") return as.operator()<float>();
  return as.operator()<double>();
}

TriangleMesh load_ply(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw ParseError(name + ": missing 'ply' magic");
  }
  PlyFormat format = PlyFormat::ascii;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "format") {
      std::string f;
      ss >> f;
      if (f == "ascii") format = PlyFormat::ascii;
      else if (f == "binary_little_endian") format = PlyFormat::binary_le;
      else if (f == "binary_big_endian") format = PlyFormat::binary_be;
      else throw ParseError(name + ": unknown PLY format '" + f + "'");
    } else if (tag == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw ParseError(name + ": property before element");
      PlyProperty p;
      std::string t;
      ss >> t;
      if (t == "list") {
        p.is_list = true;
        ss >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ss >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError(name + ": PLY header not terminated");

  const bool swap = (format == PlyFormat::binary_le) != (std::endian::native == std::endian::little);
  auto read_value = [&](const std::string& type) -> double {
    if (format == PlyFormat::ascii) {
      double v;
      if (!(in >> v)) throw ParseError(name + ": truncated ascii PLY body");
      return v;
    }
    return ply_read_binary(in, type, swap);
  };

  TriangleMesh mesh;
  for (const auto& e : elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      Vec3 v = Vec3::Zero();
      std::vector<int> poly;
      for (const auto& p : e.props) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(read_value(p.count_type));
          std::vector<int> items(n);
          for (auto& it : items) it = static_cast<int>(read_value(p.type));
          if (p.name == "vertex_indices" || p.name == "vertex_index") poly = std::move(items);
        } else {
          const double x = read_value(p.type);
          if (p.name == "x") v.x() = x;
          else if (p.name == "y") v.y() = x;
          else if (p.name == "z") v.z() = x;
        }
      }
      if (e.name == "vertex") mesh.vertices.push_back(v);
      else if (e.name == "face") {
        if (poly.size() < 3) throw ParseError(name + ": face with fewer than 3 vertices");
        add_polygon(mesh, poly);
      }
    }
  }
  return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  const std::string name = path.string();
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });

  TriangleMesh mesh = ext == ".ply" ? load_ply(in, name) : load_obj(in, name);
  if (mesh.vertices.empty() || mesh.faces.empty()) {
    throw ParseError(name + ": mesh has no triangles");
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= nv) throw ParseError(name + ": face index out of range");
    }
  }
  return mesh;
}

bool is_closed_manifold(const TriangleMesh& mesh) {
  // Directed edge counts must pair up: each (a,b) appears once and (b,a) once.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      ++directed[{f[k], f[(k + 1) % 3]}];
    }
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto it = directed.find({edge.second, edge.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    vol += mesh.corner(f, 0).dot(mesh.corner(f, 1).cross(mesh.corner(f, 2)));
  }
  return vol / 6.0;
}

Vec3 volume_centroid(const TriangleMesh& mesh) {
  double vol = 0.0;
  Vec3 acc = Vec3::Zero();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
    const double v = a.dot(b.cross(c)) / 6.0;
    vol += v;
    acc += v * (a + b + c) / 4.0;
  }
  if (std::abs(vol) < 1e-18) {
    Vec3 mean = Vec3::Zero();
    for (const auto& v : mesh.vertices) mean += v;
    return mean / static_cast<double>(mesh.vertices.size());
  }
  return acc / vol;
}

void write_point_ply(const std::filesystem::path& path, std::span<const Vec3> points,
                     std::span<const Vec3> normals, std::optional<std::span<const double>> values) {
  if (points.size() != normals.size() || (values && values->size() != points.size())) {
    throw DimensionError("write_point_ply: attribute lengths differ");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n";
  if (values) out << "property float value\n";
  out << "end_header\n";
  auto put = [&](double x) {
    float f = static_cast<float>(x);
    if constexpr (std::endian::native == std::endian::big) {
      unsigned char b[4];
      std::memcpy(b, &f, 4);
      std::reverse(b, b + 4);
      std::memcpy(&f, b, 4);
    }
    out.write(reinterpret_cast<const char*>(&f), 4);
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int k = 0; k < 3; ++k) put(points[i][k]);
    for (int k = 0; k < 3; ++k) put(normals[i][k]);
    if (values) put((*values)[i]);
  }
}

}  // namespace dexmap
