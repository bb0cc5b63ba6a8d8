#include "mirage/ply.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mirage/error.hpp"

namespace mirage {

PlyMesh load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open PLY file: " + path);

    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
        throw ParseError(path + ": missing 'ply' magic");

    std::size_t vertex_count = 0, face_count = 0;
    int xi = -1, yi = -1, zi = -1;
    int vertex_props = 0;
    std::string current_element;
    bool ascii = false;

    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment") continue;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tok == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            current_element = name;
            if (name == "vertex") vertex_count = count;
            if (name == "face") face_count = count;
        } else if (tok == "property") {
            if (current_element == "vertex") {
                std::string type, name;
                ls >> type >> name;
                if (type == "list")
                    throw ParseError(path + ": list property on vertices");
                if (name == "x") xi = vertex_props;
                if (name == "y") yi = vertex_props;
                if (name == "z") zi = vertex_props;
                ++vertex_props;
            }
        } else if (tok == "end_header") {
            break;
        }
    }
    if (!ascii) throw ParseError(path + ": only ASCII PLY is supported");
    if (xi < 0 || yi < 0 || zi < 0)
        throw ParseError(path + ": vertex element lacks x/y/z properties");

    PlyMesh mesh;
    mesh.vertices.reserve(vertex_count);
    std::vector<double> props(static_cast<std::size_t>(vertex_props));
    for (std::size_t v = 0; v < vertex_count; ++v) {
        if (!std::getline(in, line))
            throw ParseError(path + ": truncated vertex list");
        std::istringstream ls(line);
        for (auto& p : props)
            if (!(ls >> p)) throw ParseError(path + ": bad vertex line");
        mesh.vertices.emplace_back(props[static_cast<std::size_t>(xi)],
                                   props[static_cast<std::size_t>(yi)],
                                   props[static_cast<std::size_t>(zi)]);
    }

    mesh.triangles.reserve(face_count);
    for (std::size_t f = 0; f < face_count; ++f) {
        if (!std::getline(in, line))
            throw ParseError(path + ": truncated face list");
        std::istringstream ls(line);
        int n = 0;
        if (!(ls >> n) || n < 3) throw ParseError(path + ": bad face line");
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int& i : idx)
            if (!(ls >> i)) throw ParseError(path + ": bad face index");
        for (int k = 1; k + 1 < n; ++k)
            mesh.triangles.push_back({idx[0], idx[static_cast<std::size_t>(k)],
                                      idx[static_cast<std::size_t>(k + 1)]});
    }
    return mesh;
}

void save_ply(const std::string& path, std::span<const Eigen::Vector3d> vertices,
              std::span<const std::array<int, 3>> triangles) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write PLY file: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << vertices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << triangles.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    char buf[128];
    for (const auto& v : vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(),
                      v.z());
        out << buf;
    }
    for (const auto& t : triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw IoError("write failed: " + path);
}

} // namespace mirage
