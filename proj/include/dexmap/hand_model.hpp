#pragma once

#include "dexmap/geometry.hpp"
#include "dexmap/object_model.hpp"

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace dexmap {

enum class PrimitiveKind { sphere, capsule, box };

/// Collision primitive in link coordinates.
///   sphere:  dims = (radius, -, -)
///   capsule: dims = (radius, segment length, -), segment along local z, centered
///   box:     dims = full extents (x, y, z)
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::sphere;
  Transform local = Transform::Identity();
  Vec3 dims = Vec3::Zero();

  /// Signed distance from a point given in link coordinates.
  double signed_distance(const Vec3& p_link) const;
};

struct LinkGeometry {
  std::string link_name;
  std::vector<Primitive> primitives;
  std::vector<SurfacePoint> surface_samples;  ///< link frame, outward normals
};

struct JointSpec {
  std::string name;
  std::string parent_link;
  std::string child_link;
  Transform origin = Transform::Identity();  ///< child frame in parent frame at q = 0
  Vec3 axis = Vec3::UnitZ();                 ///< revolute axis, child frame
  double lower_limit = 0.0;
  double upper_limit = 0.0;
};

/// Planar rectangle on a link: origin + u*edge1 + v*edge2, (u,v) in [0,1]^2.
struct ContactRegionSpec {
  std::string link_name;
  Vec3 origin = Vec3::Zero();
  Vec3 edge1 = Vec3::UnitX();
  Vec3 edge2 = Vec3::UnitY();
};

/// Bounding sphere of a run of consecutive hand surface samples on one link.
struct SampleCluster {
  int link = 0;
  int begin = 0;
  int end = 0;
  Vec3 center = Vec3::Zero();  ///< link frame
  double radius = 0.0;
};

/// Articulated hand: a tree of revolute joints over rigid links with
/// primitive collision geometry. Immutable after construction.
class HandModel {
 public:
  HandModel(std::string name, std::vector<LinkGeometry> links, std::vector<JointSpec> joints,
            std::string palm_link, Vec3 palm_backward_direction,
            std::vector<ContactRegionSpec> contact_regions, double sample_spacing,
            int synthesis_contacts);

  const std::string& name() const { return name_; }
  const std::vector<LinkGeometry>& links() const { return links_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<ContactRegionSpec>& contact_regions() const { return regions_; }
  const std::string& palm_link() const { return palm_link_; }
  const Vec3& palm_backward_direction() const { return palm_backward_; }
  double sample_spacing() const { return sample_spacing_; }
  int synthesis_contacts() const { return synthesis_contacts_; }

  std::size_t dof() const { return joints_.size(); }
  int root_link() const { return root_; }
  int link_index(const std::string& name) const;
  int joint_parent_index(std::size_t joint) const { return joint_parent_[joint]; }
  int joint_child_index(std::size_t joint) const { return joint_child_[joint]; }
  int region_link_index(std::size_t region) const { return region_link_[region]; }
  /// Joints ordered so every parent link is placed before its children.
  const std::vector<int>& joint_order() const { return joint_order_; }

  std::size_t sample_count() const { return sample_link_.size(); }
  /// Link of each global surface sample (samples are concatenated link by link).
  const std::vector<int>& sample_link() const { return sample_link_; }
  const std::vector<int>& link_sample_offset() const { return link_offset_; }
  const std::vector<SampleCluster>& clusters() const { return clusters_; }

  VecX lower_limits() const;
  VecX upper_limits() const;
  VecX mid_range() const;

 private:
  void validate_and_index();
  void build_clusters();

  std::string name_;
  std::vector<LinkGeometry> links_;
  std::vector<JointSpec> joints_;
  std::string palm_link_;
  Vec3 palm_backward_;
  std::vector<ContactRegionSpec> regions_;
  double sample_spacing_;
  int synthesis_contacts_;

  std::unordered_map<std::string, int> link_index_;
  int root_ = -1;
  std::vector<int> joint_parent_, joint_child_, joint_order_, region_link_;
  std::vector<int> sample_link_, link_offset_;
  std::vector<SampleCluster> clusters_;
};

/// Deterministic outward-oriented samples of one primitive at roughly the
/// given spacing, in link coordinates.
std::vector<SurfacePoint> sample_primitive(const Primitive& prim, double spacing);

/// Parses and validates a hand-spec JSON file. Throws ParseError for
/// malformed input and ValidationError for invariant violations.
HandModel load_hand_model(const std::filesystem::path& path);
HandModel parse_hand_model(const std::string& json_text, const std::string& source = "<string>");

}  // namespace dexmap
