// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include "brepair/boolean.hpp"
#include "brepair/primitives.hpp"
#include "brepair/repair.hpp"
#include "brepair/scenarios.hpp"
#include "brepair/set_semantics.hpp"
#include "brepair/tolerance.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace brepair;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double metric(const ScenarioRun& r, const std::string& key) {
  const auto it = r.metrics.find(key);
  return it == r.metrics.end() ? NAN : it->second;
}

void criterion1(Outcome& o) {
  const ScenarioRun r = run_scenario(scenario_ex1());
  const double before = metric(r, "unrepaired.graph.edges"), after = metric(r, "repaired.graph.edges");
  bool kinds = !r.repaired->repairs.empty();
  for (const auto& d : r.repaired->repairs) kinds = kinds && d.kind == DefectKind::vertex_deviation;
  o.require(before > 12, "pre-repair edges > 12");
  o.require(after == 12, "post-repair edges == 12");
  o.require(kinds, "all repairs vertex-deviation");
  o.require(r.seconds < 30, "runtime < 30 s");
  o.detail << "edges " << before << " -> " << after << ", " << r.repaired->repairs.size()
           << " vertex-deviation repairs, " << r.seconds << " s";
}

void criterion2(Outcome& o) {
  const ScenarioRun r = run_scenario(scenario_ex2());
  const double c0 = metric(r, "unrepaired.graph.components"), c1 = metric(r, "repaired.graph.components");
  const double torus = metric(r, "repaired.imprint.logical_faces_b");
  const bool unrepaired_bad = metric(r, "unrepaired.failed") == 1 || metric(r, "unrepaired.imprint.logical_faces_b") == 2;
  const double holes = metric(r, "repaired.result.faces_from_b");
  o.require(c0 == 3 && c1 == 1, "components 3 -> 1");
  o.require(torus == 3, "torus imprint yields 3 faces");
  o.require(unrepaired_bad, "unrepaired imprint fails or yields 2");
  o.require(holes > 0 && metric(r, "repaired.result.open_edges") == 0, "subtraction has closed hole faces");
  o.require(r.seconds < 60, "runtime < 60 s");
  o.detail << "components " << c0 << " -> " << c1 << ", torus faces " << torus << ", unrepaired "
           << (r.unrepaired->failed_stage.empty() ? "ok" : "failed in " + r.unrepaired->failed_stage)
           << ", hole faces " << holes << ", " << r.seconds << " s";
}

void criterion3(Outcome& o) {
  const ScenarioRun r = run_scenario(scenario_ex3());
  const double shorts = metric(r, "repaired.repairs.short_edge");
  const double nm0 = metric(r, "unrepaired.result.non_manifold_edges"), nm1 = metric(r, "repaired.result.non_manifold_edges");
  o.require(shorts == 2 && metric(r, "repaired.repairs.total") == 2, "exactly 2 short-edge defects");
  o.require(nm1 == 0, "repaired result manifold");
  o.require(nm0 == 2, "unrepaired result has 2 non-manifold edges");
  o.require(r.seconds < 30, "runtime < 30 s");
  o.detail << "short edges " << shorts << ", non-manifold edges " << nm0 << " -> " << nm1 << ", " << r.seconds
           << " s";
}

void criterion4(Outcome& o) {
  const ScenarioRun r = run_scenario(scenario_ex4());
  const PipelineRun& run = *r.repaired;
  o.require(run.repairs.empty(), "no repairs");
  o.require(metric(r, "repaired.graph.short_connected_edges") == 2, "two short both-ends-connected groove edges");
  o.require(run.merge.has_value(), "result built");
  int kept = 0;
  if (run.merge) {
    const Body& body = run.merge->body;
    const auto adj = body.adjacency();
    const double short_len = 0.05 * [&] {
      Box3 box;
      for (const auto& [id, v] : run.graph.vertices()) box.extend(v.position);
      return box.diagonal().norm();
    }();
    for (const auto& [id, e] : run.graph.edges()) {
      if (curve_length(e.curve) >= short_len) continue;
      // the groove edge lies on a result edge shared by two faces
      const Point3 mid = eval_curve(e.curve, 0.5 * (e.curve.t_start() + e.curve.t_end()));
      for (const auto& [rid, re] : body.edges())
        if (closest_param_on_curve(re.curve, mid).distance < 1e-7 && adj.at(rid).size() == 2) {
          ++kept;
          break;
        }
    }
    o.require(kept == 2, "groove edges present in result between two faces");
    o.require(metric(r, "repaired.result.faces_from_b") > 0, "groove faces kept");
  }
  o.require(r.seconds < 30, "runtime < 30 s");
  o.detail << "repairs " << run.repairs.size() << ", groove edges in result " << kept << ", " << r.seconds << " s";
}

double max_vertex_mismatch(const Body& x, const Body& y) {
  double worst = 0;
  for (const auto& [id, v] : x.vertices()) {
    double best = INFINITY;
    for (const auto& [jd, w] : y.vertices()) best = std::min(best, (v.position - w.position).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

void criterion5(Outcome& o) {
  for (const auto& n : scenario_names()) {
    const ScenarioRun r = run_scenario(unperturbed(*find_scenario(n)));
    o.require(r.repaired->repairs.empty(), n + " has no records");
    const bool both = r.repaired->merge && r.unrepaired->merge;
    o.require(both, n + " both runs complete");
    if (!both) continue;
    const Body &x = r.repaired->merge->body, &y = r.unrepaired->merge->body;
    const EulerCounts cx = euler_counts(x), cy = euler_counts(y);
    o.require(cx.vertices == cy.vertices && cx.edges == cy.edges && cx.faces == cy.faces, n + " counts match");
    const double d = std::max(max_vertex_mismatch(x, y), max_vertex_mismatch(y, x));
    o.require(d <= 1e-9, n + " positions within 1e-9");
    o.detail << n << " " << r.repaired->repairs.size() << " records, max diff " << d << "; ";
  }
}

void criterion6(Outcome& o) {
  const Body a = build_primitive({PrimitiveKind::box, Frame{}, {1, 1, 1}}, 1, 1);
  const Frame frame = Frame::from_axis({0.5, -0.5, 0.5}, Vec3::UnitZ(), Vec3(std::cos(0.3), std::sin(0.3), 0));
  const Body b = build_primitive({PrimitiveKind::box, frame, {1, 1, 1}}, 2, 10001);
  // exact crossing of b's left plane with a's top-front edge (s, 0, 1)
  const Point3 truth(frame.x.dot(frame.origin - Vec3(0, 0, 1)) / frame.x.x(), 0, 1);
  const double jitter = 1.5e-6;
  PerturbationSpec p;
  p.seed = 7;
  p.vertex_jitter = jitter;
  IntersectionGraph g = stage_intersect(a, b, {1e-6, &p, true}).graph;
  const auto nearest = [&] {
    double best = INFINITY;
    for (const auto& [id, v] : g.vertices()) best = std::min(best, (v.position - truth).norm());
    return best;
  };
  const int parts = g.component_count();
  const double before = nearest();
  const auto records = repair_pass(g, BodySet{&a, &b}, {1e-6});
  const double after = nearest();
  o.require(parts > 1 && !records.empty(), "fixture is disconnected and repaired");
  o.require(after <= 1e-9, "merged vertex within 1e-9 of the exact crossing");
  o.require(after < 0.01 * jitter, "error below 1% of the jitter");
  o.detail << "components " << parts << " -> " << g.component_count() << ", error " << before << " -> " << after;
}

struct ToleranceTuple {
  int d1, d2, de;
  double e1, e2, ee;
};

Surface fitted_surface(int deg, double fe) {
  surfaces::BSpline s;
  s.degree_u = s.degree_v = deg;
  s.count_u = s.count_v = deg + 1;
  s.knots_u.assign(deg + 1, 0.0);
  s.knots_u.insert(s.knots_u.end(), deg + 1, 1.0);
  s.knots_v = s.knots_u;
  for (int i = 0; i <= deg; ++i)
    for (int j = 0; j <= deg; ++j) s.control.emplace_back(i, j, 0.1 * i * j);
  return Surface(s, fe);
}

Curve fitted_curve(int deg, double fe) {
  std::vector<double> knots(deg + 1, 0.0);
  knots.insert(knots.end(), deg + 1, 1.0);
  std::vector<Point3> ctrl;
  for (int i = 0; i <= deg; ++i) ctrl.emplace_back(i, i * i, 0);
  return Curve::bspline(deg, knots, ctrl, fe);
}

void criterion7(Outcome& o) {
  constexpr double t0 = 1e-6;
  const auto t = [](const ToleranceTuple& q) {
    return feature_tolerance(fitted_surface(q.d1, q.e1), fitted_surface(q.d2, q.e2), fitted_curve(q.de, q.ee), t0);
  };
  std::mt19937 rng(7001);
  std::uniform_int_distribution<int> deg(1, 4);
  std::uniform_real_distribution<double> err(0, 50 * t0);
  int sym = 0, mono = 0, floor = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const ToleranceTuple q{deg(rng), deg(rng), deg(rng), err(rng), err(rng), err(rng)};
    const double v = t(q);
    sym += v == t({q.d2, q.d1, q.de, q.e2, q.e1, q.ee});
    floor += v >= t0;
    ToleranceTuple up = q;
    (i % 2 ? up.de : up.d1) += 1;
    up.ee = 2 * up.ee + t0;
    mono += t(up) >= v;
  }
  o.require(sym == n && mono == n && floor == n, "random tuple properties");
  const Surface plane = Surface::plane(Frame{});
  const bool w1 = feature_tolerance(plane, plane, Curve::segment({0, 0, 0}, {1, 0, 0}), t0) == t0;
  const bool w2 = feature_tolerance(plane, Surface::cylinder(Frame{}, 1), Curve::ellipse(Frame{}, 2, 1), t0) == 4 * t0;
  const double v3 = feature_tolerance(Surface::torus(Frame{}, 2, 0.5), plane, fitted_curve(2, 100 * t0), t0);
  const bool w3 = std::abs(v3 - 800 * t0) <= 2 * std::numeric_limits<double>::epsilon() * 800 * t0;
  o.require(w1 && w2 && w3, "worked values t0, 4 t0, 800 t0");
  o.detail << n << " tuples: symmetric " << sym << ", monotone " << mono << ", floor " << floor
           << "; worked values " << (w1 && w2 && w3 ? "exact" : "off");
}

void criterion8(Outcome& o) {
  std::mt19937 rng(8008);
  std::uniform_int_distribution<int> coord(0, 4), op(0, 9);
  std::uniform_real_distribution<double> wiggle(-2e-7, 2e-7);
  const auto point = [&] { return Point3(coord(rng) + wiggle(rng), coord(rng) + wiggle(rng), 0); };
  const auto edge = [](const Point3& a, const Point3& b) {
    IntersectionEdge e;
    e.curve = Curve::segment(a, b);
    e.source_faces = {1, 2};
    e.tolerance = 1e-6;
    return e;
  };
  const auto pick = [&](const auto& m) {
    auto it = m.begin();
    std::advance(it, std::uniform_int_distribution<int>(0, static_cast<int>(m.size()) - 1)(rng));
    return it->first;
  };
  IntersectionGraph g;
  int mutations = 0, round_trips = 0, broken = 0, self_refs = 0;
  while (mutations < 1200) {
    const int k = op(rng);
    const Point3 a = point(), b = point();
    if (k < 5 || g.edges().empty()) {
      if ((a - b).norm() < 0.5) continue;
      g.add_edge(edge(a, b));
    } else if (k < 7) {
      g.remove_edge(pick(g.edges()));
    } else if (k < 8) {
      try {
        const int v = pick(g.vertices());
        g.merge_vertices(v, pick(g.vertices()), g.vertex(v).position);
      } catch (const GraphError&) {
        continue;
      }
    } else if (k < 9) {
      g.add_point(a, 1e-6);
    } else {
      if ((a - b).norm() < 0.5) continue;
      const std::string before = graph_signature(g);
      g.remove_edge(g.add_edge(edge(a, b)));
      broken += graph_signature(g) != before;
      ++round_trips;
    }
    ++mutations;
    broken += !g.check_invariants().empty();
    for (const auto& [id, e] : g.edges()) {
      if (!g.end_connected(id, false)) broken += g.predecessor(id) != id, ++self_refs;
      if (!g.end_connected(id, true)) broken += g.successor(id) != id, ++self_refs;
    }
  }
  o.require(broken == 0, "invariants hold after every mutation");
  o.require(round_trips > 50, "enough add/remove round trips");
  o.detail << mutations << " mutations, " << round_trips << " round trips, " << self_refs
           << " isolated-end checks, " << broken << " violations";
}

void criterion9(Outcome& o) {
  constexpr double tol = 1e-6;
  const auto box = [](const Point3& c, int base) {
    return build_primitive({PrimitiveKind::box, Frame::from_axis(c, Vec3::UnitZ()), {1, 1, 1}}, 0, base);
  };
  const auto face_at = [](const Body& b, const Point3& p) {
    for (const auto& [id, f] : b.faces())
      if (std::abs(signed_distance(f.surface, p)) < 1e-9 && classify_point_on_face(b, id, p, 1e-9) == FacePointState::inside)
        return id;
    return 0;
  };
  const auto edge_between = [](const Body& b, const Point3& p, const Point3& q) {
    for (const auto& [id, e] : b.edges())
      if ((edge_start_point(e) - p).norm() + (edge_end_point(e) - q).norm() < 1e-9 ||
          (edge_start_point(e) - q).norm() + (edge_end_point(e) - p).norm() < 1e-9)
        return id;
    return 0;
  };
  const Body a = box({0, 0, 0}, 1);
  int r1 = 0, n1 = 0, r2 = 0, n2 = 0, l1 = 0, n3 = 0;
  for (const auto& [fid, f] : a.faces())
    for (const Loop& l : f.loops)
      for (const Coedge& c : l.coedges) r1 += check_rule1(a, c.edge, fid, tol), ++n1;
  const int top = face_at(a, {0.5, 0.5, 1});
  const int e1 = edge_between(a, {0, 0, 1}, {1, 0, 1});
  const int front = face_at(a, {0.5, 0, 0.5});
  for (int k = 0; k < 10; ++k) {
    const Point3 c(0.1 + 0.05 * k, 0.2 + 0.03 * k, 0.4);
    const Body b = box(c, 10001);
    const int e = edge_between(b, c, c + Vec3(0, 0, 1));
    r2 += check_rule2(b, e, a, top, {c.x(), c.y(), 1}, tol), ++n2;
    const double x = 0.1 + 0.08 * k, y = 0.15 + 0.07 * k;
    const Body b2 = box({x, -y, 1}, 10001);
    const int e2 = edge_between(b2, {x, -y, 1}, {x, 1 - y, 1});
    l1 += check_lemma1(a, e1, front, b2, e2, face_at(b2, {x, 0.5 - y, 1.5}), {x, 0, 1}, tol), ++n3;
  }
  o.require(r1 == n1 && n1 >= 10, "rule 1");
  o.require(r2 == n2 && n2 >= 10, "rule 2");
  o.require(l1 == n3 && n3 >= 10, "lemma 1");
  o.detail << "rule 1 " << r1 << "/" << n1 << ", rule 2 " << r2 << "/" << n2 << ", lemma 1 " << l1 << "/" << n3
           << " (ball radius 10 tol)";
}

void criterion10(Outcome& o) {
  for (const auto& n : scenario_names()) {
    const Scenario s = *find_scenario(n);
    const auto [a, b] = build_scenario_bodies(s);
    IntersectionGraph g = stage_intersect(a, b, {s.t0, &s.perturbation, true}).graph;
    const auto first = repair_pass(g, BodySet{&a, &b}, {s.t0});
    const auto second = repair_pass(g, BodySet{&a, &b}, {s.t0});
    o.require(second.empty(), n + " second pass empty");
    o.detail << n << " " << first.size() << " then " << second.size() << "; ";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"vertex deviation (ex1)", criterion1},      {"disconnection (ex2)", criterion2},
      {"short edge (ex3)", criterion3},            {"feature preservation (ex4)", criterion4},
      {"no false repair", criterion5},             {"repair recovers truth", criterion6},
      {"tolerance formula properties", criterion7}, {"graph invariants", criterion8},
      {"set semantics", criterion9},               {"idempotence", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2zu %-30s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
