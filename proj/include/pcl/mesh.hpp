#ifndef PCL_MESH_HPP
#define PCL_MESH_HPP

#include <Eigen/Dense>

#include "pcl/geometry.hpp"

namespace pcl {

// Conforming triangulation of the domain: every glue edge appears as a union
// of mesh edges, and every node on the boundary or on the glue set carries the
// Dirichlet mask. Positively oriented triangles, linear shape functions
// precomputed per element.
struct ConstrainedMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::uint8_t> dirichlet_mask;

  // mesh edges realizing the glue set, with the source glue-edge id each
  // sub-edge came from
  std::vector<std::array<int, 2>> glue_mesh_edges;
  std::vector<std::int64_t> glue_edge_source;

  double h = 0.0;

  // element caches
  std::vector<double> tri_area;
  std::vector<Eigen::Matrix<double, 2, 3>> tri_grad;  // columns: grad of each hat

  Vec2 centroid(int t) const {
    const auto& tr = triangles[t];
    return (nodes[tr[0]] + nodes[tr[1]] + nodes[tr[2]]) / 3.0;
  }
  int free_count() const {
    int n = 0;
    for (auto m : dirichlet_mask) n += m == 0;
    return n;
  }
  double min_angle_deg() const;
  // index of the triangle containing p, or -1
  int locate(const Vec2& p) const;
};

// Constrained Delaunay triangulation: boundary and glue polylines become
// constrained edges (subdivided to length <= h), the interior is filled with
// a jittered hexagonal lattice, outside and hole triangles are discarded.
// Deterministic for fixed inputs. Throws GlueOutsideDomain / MeshFailure.
ConstrainedMesh build_mesh(const PolygonalDomain& domain, const GlueGraph& glue, double h);

}  // namespace pcl

#endif
