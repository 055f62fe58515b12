#include "dexmap/errors.hpp"
#include "dexmap/kinematics.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace dexmap;

namespace {

const std::filesystem::path kData = DEXMAP_TEST_DATA;
const std::filesystem::path kHands = std::filesystem::path(DEXMAP_ASSET_DIR) / "hands";
const char* kHandNames[] = {"gripper2", "barrett3", "robotiq3", "allegro4", "shadow5"};

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GraspPose random_pose(const HandModel& hand, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GraspPose p;
  p.translation = 0.1 * Vec3(u(rng), u(rng), u(rng));
  p.rotation = 2.0 * Vec3(u(rng), u(rng), u(rng));
  p.joints = hand.mid_range();
  for (Eigen::Index j = 0; j < p.joints.size(); ++j) {
    const double half = 0.5 * (hand.joints()[j].upper_limit - hand.joints()[j].lower_limit);
    p.joints(j) += half * u(rng);
  }
  return p;
}

GraspPose zero_pose(const HandModel& hand) {
  GraspPose p;
  p.joints = VecX::Zero(static_cast<Eigen::Index>(hand.dof()));
  return p;
}

const char* kQuarterTurnHand = R"({
  "name": "hinge", "palm_link": "base", "palm_backward_direction": [0, 0, -1],
  "links": [{"name": "base", "primitives": [{"kind": "sphere", "dims": [0.01]}]},
            {"name": "arm", "primitives": [{"kind": "box", "dims": [0.02, 0.01, 0.01]}]}],
  "joints": [{"name": "j", "parent": "base", "child": "arm", "axis": [0, 0, 1],
              "limits": [-3, 3]}],
  "contact_regions": [{"link": "arm", "origin": [0, 0, 0.006], "edge1": [0.01, 0, 0],
                       "edge2": [0, 0.004, 0]}]
})";

}  // namespace

TEST_CASE("hand specs load and validate") {
  const HandModel n1 = load_hand_model(kData / "gripper_n1.json");
  CHECK(n1.dof() == 1);
  CHECK_THROWS_AS(load_hand_model(kData / "cyclic_hand.json"), ValidationError);
  CHECK_THROWS_AS(load_hand_model(kData / "missing.json"), ParseError);
  CHECK_THROWS_AS(parse_hand_model("{ not json"), ParseError);

  const std::size_t expected[] = {4, 8, 9, 16, 22};
  for (int i = 0; i < 5; ++i) {
    const HandModel h = load_hand_model(kHands / (std::string(kHandNames[i]) + ".json"));
    CHECK(h.dof() == expected[i]);
    CHECK(h.sample_count() > 100);
    CHECK(h.synthesis_contacts() >= 2);
    std::size_t covered = 0;
    for (const auto& c : h.clusters()) {
      covered += static_cast<std::size_t>(c.end - c.begin);
      const auto& samples = h.links()[c.link].surface_samples;
      for (int k = c.begin; k < c.end; ++k) {
        const Vec3& p = samples[k - h.link_sample_offset()[c.link]].position;
        CHECK((p - c.center).norm() <= c.radius + 1e-12);
      }
    }
    CHECK(covered == h.sample_count());
  }
}

TEST_CASE("hand spec invariants are enforced") {
  auto doc = nlohmann::json::parse(kQuarterTurnHand);
  auto expect_invalid = [](const nlohmann::json& d) {
    CHECK_THROWS_AS(parse_hand_model(d.dump()), ValidationError);
  };
  auto bad = doc;
  bad["joints"][0]["axis"] = {0, 0, 1.001};
  expect_invalid(bad);
  bad = doc;
  bad["palm_link"] = "nowhere";
  expect_invalid(bad);
  bad = doc;
  bad["joints"][0]["limits"] = {1, 1};
  expect_invalid(bad);
  bad = doc;
  bad["links"][0]["primitives"][0]["dims"] = {0.0};
  expect_invalid(bad);
  bad = doc;
  bad["contact_regions"][0]["edge2"] = {0.02, 0, 0};
  expect_invalid(bad);
  CHECK_NOTHROW(parse_hand_model(doc.dump()));
}

TEST_CASE("forward kinematics examples") {
  const HandModel hinge = parse_hand_model(kQuarterTurnHand);
  GraspPose p = zero_pose(hinge);
  KinematicFrames f = forward_kinematics(hinge, p);
  for (const auto& T : f.links) CHECK(T.isApprox(Transform::Identity(), 1e-15));

  p.joints(0) = M_PI / 2;
  f = forward_kinematics(hinge, p);
  const Vec3 mapped = f.links[hinge.link_index("arm")] * Vec3(1, 0, 0);
  CHECK((mapped - Vec3(0, 1, 0)).norm() < 1e-12);

  GraspPose wrong = zero_pose(hinge);
  wrong.joints = VecX::Zero(2);
  CHECK_THROWS_AS(forward_kinematics(hinge, wrong), DimensionError);
}

TEST_CASE("identity pose places links at their rest transforms") {
  for (const char* name : kHandNames) {
    const HandModel h = load_hand_model(kHands / (std::string(name) + ".json"));
    const KinematicFrames f = forward_kinematics(h, zero_pose(h));
    CHECK(f.links[h.root_link()].isApprox(Transform::Identity(), 1e-15));
    // Rest transform of a link: product of joint origins from the root.
    for (std::size_t j = 0; j < h.dof(); ++j) {
      Transform rest = Transform::Identity();
      std::vector<const JointSpec*> chain;
      std::string link = h.joints()[j].child_link;
      while (link != h.links()[h.root_link()].link_name) {
        for (const auto& js : h.joints()) {
          if (js.child_link == link) {
            chain.push_back(&js);
            link = js.parent_link;
            break;
          }
        }
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) rest = rest * (*it)->origin;
      CHECK(f.links[h.joint_child_index(j)].isApprox(rest, 1e-12));
    }
  }
}

TEST_CASE("FK is rigid per link and deterministic") {
  std::mt19937_64 rng(42);
  for (const char* name : kHandNames) {
    const HandModel h = load_hand_model(kHands / (std::string(name) + ".json"));
    const HandSurface rest = hand_surface(h, zero_pose(h));
    for (int trial = 0; trial < 5; ++trial) {
      const GraspPose p = random_pose(h, rng);
      const HandSurface s = hand_surface(h, p);
      const HandSurface again = hand_surface(h, p);
      CHECK((s.points.array() == again.points.array()).all());
      for (std::size_t l = 0; l < h.links().size(); ++l) {
        const int b = h.link_sample_offset()[l], e = h.link_sample_offset()[l + 1];
        for (int i = b; i + 1 < e; i += 3) {
          const double d0 = (rest.points.col(i) - rest.points.col(e - 1)).norm();
          const double d1 = (s.points.col(i) - s.points.col(e - 1)).norm();
          CHECK(std::abs(d0 - d1) < 1e-9);
        }
      }
      CHECK((s.normals.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("hand surface identity and translation equivariance") {
  const HandModel h = load_hand_model(kHands / "allegro4.json");
  const HandSurface s0 = hand_surface(h, zero_pose(h));
  REQUIRE(s0.size() == h.sample_count());
  std::size_t total = 0;
  for (const auto& l : h.links()) total += l.surface_samples.size();
  CHECK(total == s0.size());

  // Identity root and zero joints: sample = rest transform of its link applied
  // to the local sample; for the palm that is the local sample itself.
  const auto& palm = h.links()[h.root_link()].surface_samples;
  for (std::size_t i = 0; i < palm.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(h.link_sample_offset()[h.root_link()] + i);
    CHECK((s0.points.col(k) - palm[i].position).norm() == 0.0);
  }

  std::mt19937_64 rng(1);
  GraspPose p = random_pose(h, rng);
  const HandSurface a = hand_surface(h, p);
  const Vec3 t(0.3, -0.2, 0.05);
  p.translation += t;
  const HandSurface b = hand_surface(h, p);
  CHECK(((b.points.colwise() - t) - a.points).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.normals - a.normals).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("contact points on region rectangles") {
  std::mt19937_64 rng(9);
  for (const char* name : kHandNames) {
    const HandModel h = load_hand_model(kHands / (std::string(name) + ".json"));
    const GraspPose p = random_pose(h, rng);
    const KinematicFrames f = forward_kinematics(h, p);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t r = 0; r < h.contact_regions().size(); ++r) {
      const auto& spec = h.contact_regions()[r];
      const Transform& T = f.links[h.region_link_index(r)];
      const int ri = static_cast<int>(r);
      CHECK((sample_contact_points(h, f, {{ri, 0, 0}})[0] - T * spec.origin).norm() < 1e-12);
      const Vec3 center = T * (spec.origin + 0.5 * spec.edge1 + 0.5 * spec.edge2);
      CHECK((sample_contact_points(h, f, {{ri, 0.5, 0.5}})[0] - center).norm() < 1e-12);

      const double uu = u01(rng), vv = u01(rng), eps = 1e-6;
      const Vec3 x = sample_contact_points(h, f, {{ri, uu, vv}})[0];
      const Vec3 n = region_normal(h, f, ri);
      CHECK(std::abs((x - T * spec.origin).dot(n)) < 1e-9);
      const Vec3 moved = sample_contact_points(h, f, {{ri, uu + eps, vv}})[0];
      CHECK((moved - x - eps * (T.linear() * spec.edge1)).norm() < 1e-12);
      CHECK(std::abs((moved - x).norm() - eps * spec.edge1.norm()) < 1e-12);
    }
    CHECK_THROWS_AS(sample_contact_points(h, f, {{static_cast<int>(h.contact_regions().size()), 0, 0}}),
                    DimensionError);
  }
}

TEST_CASE("pose gradient accumulator matches finite differences") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n01;
  for (const char* name : kHandNames) {
    const HandModel h = load_hand_model(kHands / (std::string(name) + ".json"));
    for (int trial = 0; trial < 3; ++trial) {
      const GraspPose p = random_pose(h, rng);
      Eigen::Matrix3Xd w(3, static_cast<Eigen::Index>(h.sample_count()));
      for (Eigen::Index i = 0; i < w.cols(); ++i) w.col(i) = Vec3(n01(rng), n01(rng), n01(rng));
      // E(q) = sum_i w_i . p_i(q) + 0.5 |p_i(q)|^2
      auto energy = [&](const GraspPose& q) {
        const HandSurface s = hand_surface(h, q);
        return (w.array() * s.points.array()).sum() + 0.5 * s.points.squaredNorm();
      };
      const KinematicFrames f = forward_kinematics(h, p);
      const HandSurface s = hand_surface(h, f);
      PoseGradient acc(h, f);
      for (Eigen::Index i = 0; i < w.cols(); ++i) {
        acc.add(h.sample_link()[i], s.points.col(i), w.col(i) + s.points.col(i));
      }
      const VecX g = acc.finish(p);
      const VecX q0 = p.flat();
      for (Eigen::Index k = 0; k < q0.size(); ++k) {
        VecX qp = q0, qm = q0;
        qp(k) += 1e-6;
        qm(k) -= 1e-6;
        const double fd = (energy(GraspPose::from_flat(qp)) - energy(GraspPose::from_flat(qm))) / 2e-6;
        CHECK(std::abs(fd - g(k)) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}
