#include "pcl/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "pcl/competitors.hpp"
#include "pcl/errors.hpp"
#include "pcl/flatness.hpp"
#include "pcl/log.hpp"

namespace pcl {

const char* to_string(MoveKind k) {
  switch (k) {
    case MoveKind::PerturbVertex: return "perturb_vertex";
    case MoveKind::SplitEdge: return "split_edge";
    case MoveKind::CollapseEdge: return "collapse_edge";
    case MoveKind::GrowLeaf: return "grow_leaf";
    case MoveKind::PruneLeaf: return "prune_leaf";
    case MoveKind::RemoveLoopArc: return "remove_loop_arc";
    case MoveKind::SteinerMerge: return "steiner_merge";
    case MoveKind::CutCircle: return "cut_circle";
    case MoveKind::CutChord: return "cut_chord";
  }
  return "unknown";
}

MovePool MovePool::defaults() {
  MovePool pool;
  pool.weights = {
      {MoveKind::PerturbVertex, 3.0}, {MoveKind::SplitEdge, 1.0},
      {MoveKind::CollapseEdge, 1.0},  {MoveKind::GrowLeaf, 1.0},
      {MoveKind::PruneLeaf, 1.0},     {MoveKind::RemoveLoopArc, 1.0},
      {MoveKind::SteinerMerge, 0.5},  {MoveKind::CutCircle, 0.25},
      {MoveKind::CutChord, 0.25},
  };
  return pool;
}

std::uint64_t canonical_hash(const GlueGraph& g) {
  // canonical order: vertices sorted lexicographically, edges sorted
  std::vector<int> order(g.vertices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2& u = g.vertices[a];
    const Vec2& v = g.vertices[b];
    return u.x() != v.x() ? u.x() < v.x() : u.y() < v.y();
  });
  std::vector<int> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto mix_double = [&](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    h = hash_combine(h, bits);
  };
  for (int i : order) {
    mix_double(g.vertices[i].x());
    mix_double(g.vertices[i].y());
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edges) edges.push_back(std::minmax(rank[e[0]], rank[e[1]]));
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b] : edges) h = hash_combine(hash_combine(h, a), b);
  return h;
}

namespace {

bool inside_closure(const PolygonalDomain& dom, const Vec2& p, double tau) {
  return dom.contains(p) || dom.distance_to_boundary(p) <= tau;
}

bool graph_in_domain(const PolygonalDomain& dom, const GlueGraph& g) {
  const double tau = 1e-9 * std::max(dom.bbox_diagonal(), 1e-6);
  for (const auto& v : g.vertices)
    if (!inside_closure(dom, v, tau)) return false;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Vec2 a = g.edge_a(static_cast<int>(e)), b = g.edge_b(static_cast<int>(e));
    const int n = 8;
    for (int k = 1; k < n; ++k)
      if (!inside_closure(dom, a + (static_cast<double>(k) / n) * (b - a), tau)) return false;
  }
  return true;
}

// picks a point uniformly by arclength (any vertex for edgeless graphs)
Vec2 random_point_on(const GlueGraph& g, Rng& rng) {
  const double len = total_length(g);
  if (len <= 0.0) {
    if (g.vertices.empty()) throw Error(ErrorCode::EmptySet, "empty graph");
    return g.vertices[rng.uniform_index(g.vertices.size())];
  }
  return point_at_arclength(g, rng.uniform(0.0, len));
}

GlueGraph apply_move(const GlueGraph& g, MoveKind kind, const MovePool& pool,
                     const EvalContext& ctx, Rng& rng) {
  const double step = pool.step_scale;
  switch (kind) {
    case MoveKind::PerturbVertex: {
      if (g.vertices.empty()) throw Error(ErrorCode::Precondition, "no vertices");
      GlueGraph out = g;
      const std::size_t v = rng.uniform_index(out.vertices.size());
      out.vertices[v] += step * Vec2(rng.normal(), rng.normal()) * 0.5;
      return out;
    }
    case MoveKind::SplitEdge: {
      if (g.edges.empty()) throw Error(ErrorCode::Precondition, "no edges");
      GlueGraph out = g;
      const std::size_t e = rng.uniform_index(out.edges.size());
      const double t = rng.uniform(0.3, 0.7);
      const Vec2 mid = out.edge_a(static_cast<int>(e)) +
                       t * (out.edge_b(static_cast<int>(e)) - out.edge_a(static_cast<int>(e)));
      const int b = out.edges[e][1];
      const int m = out.add_vertex(mid);
      out.edges[e][1] = m;
      out.add_edge(m, b);
      return out;
    }
    case MoveKind::CollapseEdge: {
      if (g.edges.empty()) throw Error(ErrorCode::Precondition, "no edges");
      GlueGraph out = g;
      const std::size_t e = rng.uniform_index(out.edges.size());
      const Vec2 mid = 0.5 * (out.edge_a(static_cast<int>(e)) + out.edge_b(static_cast<int>(e)));
      out.vertices[out.edges[e][0]] = mid;
      out.vertices[out.edges[e][1]] = mid;
      return out;  // normalize merges the pair and drops the edge
    }
    case MoveKind::GrowLeaf: {
      if (g.vertices.empty()) throw Error(ErrorCode::Precondition, "no vertices");
      GlueGraph out = g;
      const std::size_t v = rng.uniform_index(out.vertices.size());
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const double len = step * rng.uniform(0.3, 1.0);
      const Vec2 tip = out.vertices[v] + len * Vec2(std::cos(ang), std::sin(ang));
      const int w = out.add_vertex(tip);
      out.add_edge(static_cast<int>(v), w);
      return out;
    }
    case MoveKind::PruneLeaf: {
      std::vector<int> leaves;
      for (std::size_t v = 0; v < g.vertices.size(); ++v)
        if (degree(g, static_cast<int>(v)) == 1) leaves.push_back(static_cast<int>(v));
      if (leaves.empty()) throw Error(ErrorCode::Precondition, "no leaves");
      const int v = leaves[rng.uniform_index(leaves.size())];
      GlueGraph out;
      out.next_id = g.next_id;
      std::vector<int> remap(g.vertices.size(), -1);
      for (std::size_t w = 0; w < g.vertices.size(); ++w) {
        if (static_cast<int>(w) == v) continue;
        remap[w] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(g.vertices[w]);
        out.vertex_ids.push_back(g.vertex_ids[w]);
      }
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e][0] == v || g.edges[e][1] == v) continue;
        out.edges.push_back({remap[g.edges[e][0]], remap[g.edges[e][1]]});
        out.edge_ids.push_back(g.edge_ids[e]);
        out.edge_source.push_back(g.edge_source[e]);
      }
      return out;
    }
    case MoveKind::RemoveLoopArc: {
      const auto loops = find_loops(g);
      if (loops.empty()) throw Error(ErrorCode::Precondition, "no loops");
      const auto& loop = loops[rng.uniform_index(loops.size())];
      const int e = loop[rng.uniform_index(loop.size())];
      GlueGraph out = g;
      out.edges.erase(out.edges.begin() + e);
      out.edge_ids.erase(out.edge_ids.begin() + e);
      out.edge_source.erase(out.edge_source.begin() + e);
      return out;
    }
    case MoveKind::SteinerMerge: {
      std::vector<int> quads;
      for (std::size_t v = 0; v < g.vertices.size(); ++v)
        if (degree(g, static_cast<int>(v)) == 4) quads.push_back(static_cast<int>(v));
      if (quads.empty()) throw Error(ErrorCode::Precondition, "no degree-4 vertex");
      const int v = quads[rng.uniform_index(quads.size())];
      std::vector<int> incident;
      double min_len = std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (g.edges[e][0] == v || g.edges[e][1] == v) {
          incident.push_back(static_cast<int>(e));
          min_len = std::min(min_len, g.edge_length(static_cast<int>(e)));
        }
      const double r_s = std::min(0.9 * min_len, step);
      GlueGraph out = g;
      std::array<Vec2, 4> exits;
      for (int k = 0; k < 4; ++k) {
        const int e = incident[k];
        const int far = out.edges[e][0] == v ? out.edges[e][1] : out.edges[e][0];
        const Vec2 dir = (out.vertices[far] - out.vertices[v]).normalized();
        exits[k] = out.vertices[v] + r_s * dir;
        const int w = out.add_vertex(exits[k]);
        out.edges[e] = {w, far};
      }
      // drop the center vertex; stubs were rewired above
      GlueGraph tree = steiner_connection_4(exits);
      std::vector<int> tmap(tree.vertices.size());
      for (std::size_t w = 0; w < tree.vertices.size(); ++w)
        tmap[w] = out.add_vertex(tree.vertices[w]);
      for (const auto& te : tree.edges) out.add_edge(tmap[te[0]], tmap[te[1]]);
      // the old center may be isolated now; normalize keeps it only if used
      GlueGraph cleaned;
      cleaned.next_id = out.next_id;
      std::vector<int> remap(out.vertices.size(), -1);
      for (std::size_t w = 0; w < out.vertices.size(); ++w) {
        if (static_cast<int>(w) == v) continue;
        remap[w] = static_cast<int>(cleaned.vertices.size());
        cleaned.vertices.push_back(out.vertices[w]);
        cleaned.vertex_ids.push_back(out.vertex_ids[w]);
      }
      for (std::size_t e = 0; e < out.edges.size(); ++e) {
        if (out.edges[e][0] == v || out.edges[e][1] == v) continue;
        cleaned.edges.push_back({remap[out.edges[e][0]], remap[out.edges[e][1]]});
        cleaned.edge_ids.push_back(out.edge_ids[e]);
        cleaned.edge_source.push_back(out.edge_source[e]);
      }
      return cleaned;
    }
    case MoveKind::CutCircle: {
      const Vec2 x = random_point_on(g, rng);
      const double r = step * rng.uniform(0.25, 1.0);
      if (ctx.domain.distance_to_boundary(x) <= r || !ctx.domain.contains(x))
        throw Error(ErrorCode::Precondition, "ball leaves the domain");
      return competitor_cut_circle(g, x, r, default_n_arc(r, ctx.mesh_h));
    }
    case MoveKind::CutChord: {
      const Vec2 x = random_point_on(g, rng);
      const double r = step * rng.uniform(0.25, 1.0);
      if (ctx.domain.distance_to_boundary(x) <= r || !ctx.domain.contains(x))
        throw Error(ErrorCode::Precondition, "ball leaves the domain");
      return competitor_cut_chord(g, x, r, pool.beta_wall);
    }
  }
  throw Error(ErrorCode::Precondition, "unknown move");
}

}  // namespace

Evaluation evaluate(const GlueGraph& sigma, const EvalContext& ctx) {
  GlueGraph g = normalize(sigma);
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "glue graph is not connected");
  if (!graph_in_domain(ctx.domain, g))
    throw Error(ErrorCode::GlueOutsideDomain, "glue leaves the domain closure");

  const std::uint64_t key =
      hash_combine(canonical_hash(g), std::hash<double>{}(ctx.p * 1e3 + ctx.mesh_h));
  if (auto it = ctx.cache.find(key); it != ctx.cache.end())
    return {it->second[0] + ctx.lambda * it->second[2], it->second[1], it->second[2]};

  const ConstrainedMesh mesh = build_mesh(ctx.domain, g, ctx.mesh_h);
  const double mask_fraction =
      1.0 - static_cast<double>(mesh.free_count()) / static_cast<double>(mesh.nodes.size());
  if (mask_fraction > ctx.properness_mask_fraction)
    throw Error(ErrorCode::Precondition, "glue covers too much of the domain (not proper)");

  const ScalarField u = solve_p_poisson(mesh, ctx.force, ctx.p, ctx.solver_tol);
  const double c = compliance(mesh, u, ctx.force).from_gradient;
  const double len = total_length(g);
  ctx.cache[key] = {c, c, len};
  return {c + ctx.lambda * len, c, len};
}

Proposal propose(const GlueGraph& sigma, const MovePool& pool, const EvalContext& ctx, Rng& rng,
                 double h1_budget) {
  std::vector<std::pair<MoveKind, double>> enabled;
  double total = 0.0;
  for (const auto& [kind, w] : pool.weights)
    if (w > 0.0) {
      enabled.push_back({kind, w});
      total += w;
    }
  if (enabled.empty()) throw Error(ErrorCode::Precondition, "empty move pool");

  for (int attempt = 0; attempt < 32; ++attempt) {
    double pick = rng.uniform(0.0, total);
    MoveKind kind = enabled.back().first;
    for (const auto& [k, w] : enabled) {
      if (pick < w) {
        kind = k;
        break;
      }
      pick -= w;
    }
    try {
      GlueGraph cand = normalize(apply_move(sigma, kind, pool, ctx, rng));
      if (!is_connected(cand)) continue;
      if (cand.vertices.empty()) continue;
      if (!graph_in_domain(ctx.domain, cand)) continue;
      if (total_length(cand) > h1_budget) continue;
      return {std::move(cand), kind};
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorCode::NoFeasibleMove, "32 proposals failed");
}

namespace {

// deterministic tie-break: smaller length, then fewer vertices, then
// lexicographically smaller sorted vertex list
bool strictly_better(const Evaluation& cand_eval, const GlueGraph& cand,
                     const Evaluation& best_eval, const GlueGraph& best) {
  if (cand_eval.objective < best_eval.objective - 1e-15) return true;
  if (cand_eval.objective > best_eval.objective + 1e-15) return false;
  if (cand_eval.length != best_eval.length) return cand_eval.length < best_eval.length;
  if (cand.vertices.size() != best.vertices.size())
    return cand.vertices.size() < best.vertices.size();
  auto key = [](const GlueGraph& g) {
    std::vector<std::pair<double, double>> k;
    for (const auto& v : g.vertices) k.push_back({v.x(), v.y()});
    std::sort(k.begin(), k.end());
    return k;
  };
  return key(cand) < key(best);
}

}  // namespace

OptimizeResult optimize(const GlueGraph& start, const EvalContext& ctx,
                        const AnnealSchedule& schedule, const MovePool& pool,
                        bool keep_snapshots, const TraceSink& sink) {
  Rng rng(schedule.seed);
  OptimizeResult res;
  GlueGraph cur = normalize(start);
  Evaluation cur_eval = evaluate(cur, ctx);
  res.best = cur;
  res.best_eval = cur_eval;
  res.trace.best_timeline.push_back(cur_eval.objective);

  const double h1_budget = 100.0 * std::max(total_length(cur), ctx.mesh_h);
  double temperature = schedule.t0;

  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    for (int k = 0; k < schedule.proposals_per_epoch; ++k) {
      Proposal prop;
      try {
        prop = propose(cur, pool, ctx, rng, h1_budget);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoFeasibleMove) continue;
        throw;
      }
      Evaluation cand_eval;
      try {
        cand_eval = evaluate(prop.candidate, ctx);
      } catch (const SolverStalledError& e) {
        res.trace.aborted = true;
        res.trace.abort_reason = e.what();
        return res;
      } catch (const Error&) {
        continue;  // inadmissible candidate (properness, containment)
      }
      const double df = cand_eval.objective - cur_eval.objective;
      bool accept = df <= 0.0;
      if (!accept && temperature > 0.0) accept = rng.uniform() < std::exp(-df / temperature);
      if (!accept) continue;

      TraceRecord rec;
      rec.kind = prop.kind;
      rec.d_compliance = cand_eval.compliance - cur_eval.compliance;
      rec.d_length = cand_eval.length - cur_eval.length;
      rec.d_objective = df;
      rec.objective = cand_eval.objective;
      if (keep_snapshots) {
        rec.snapshot = static_cast<int>(res.trace.snapshots.size());
        res.trace.snapshots.push_back(prop.candidate);
      }
      cur = std::move(prop.candidate);
      cur_eval = cand_eval;
      if (strictly_better(cur_eval, cur, res.best_eval, res.best)) {
        res.best = cur;
        res.best_eval = cur_eval;
      }
      res.trace.best_timeline.push_back(res.best_eval.objective);
      if (sink) sink(rec, cur);
      res.trace.records.push_back(std::move(rec));
    }
    temperature *= schedule.cooling;
  }
  return res;
}

std::vector<LambdaScanRow> lambda_scan(const GlueGraph& start, const EvalContext& ctx,
                                       const AnnealSchedule& schedule, const MovePool& pool,
                                       const std::vector<double>& lambdas) {
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] <= lambdas[i - 1] || lambdas[i - 1] <= 0.0)
      throw Error(ErrorCode::Precondition, "lambda values must be positive ascending");
  std::vector<LambdaScanRow> rows;
  for (double lam : lambdas) {
    EvalContext local = ctx;
    local.lambda = lam;
    local.cache.clear();
    const OptimizeResult r = optimize(start, local, schedule, pool);
    rows.push_back({lam, r.best_eval.length, r.best_eval.objective});
    PCL_INFO("lambda_scan: lambda=%g H1=%g F=%g", lam, r.best_eval.length,
             r.best_eval.objective);
  }
  return rows;
}

}  // namespace pcl
