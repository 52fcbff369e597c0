#ifndef PCL_OPTIMIZER_HPP
#define PCL_OPTIMIZER_HPP

#include <functional>
#include <map>
#include <unordered_map>

#include "pcl/rng.hpp"
#include "pcl/solver.hpp"

namespace pcl {

enum class MoveKind {
  PerturbVertex,
  SplitEdge,
  CollapseEdge,
  GrowLeaf,
  PruneLeaf,
  RemoveLoopArc,
  SteinerMerge,
  CutCircle,
  CutChord,
};
const char* to_string(MoveKind k);

// Proposal distribution for the local search. Weights need not normalize;
// disabled moves carry weight zero. step_scale is in domain length units.
struct MovePool {
  std::map<MoveKind, double> weights;
  double step_scale = 0.1;
  double beta_wall = 0.1;  // flatness gate for the chord move

  static MovePool defaults();
};

struct AnnealSchedule {
  double t0 = 0.0;  // zero means greedy descent
  double cooling = 0.9;
  int epochs = 10;
  int proposals_per_epoch = 32;
  std::uint64_t seed = 0;
};

// Everything an objective evaluation needs; owns a cache keyed by the
// canonical form of the normalized graph.
struct EvalContext {
  PolygonalDomain domain;
  ForceSpec force;
  double p = 2.0;
  double lambda = 0.1;
  double mesh_h = 0.05;
  double solver_tol = 1e-8;
  double properness_mask_fraction = 0.9;  // reject glue covering more nodes

  mutable std::unordered_map<std::uint64_t, std::array<double, 3>> cache;
};

struct Evaluation {
  double objective = 0.0;
  double compliance = 0.0;
  double length = 0.0;
};

// F = C_p + lambda H^1 for an admissible (connected, contained, proper)
// graph; re-meshes from scratch, memoized on the canonical graph hash.
Evaluation evaluate(const GlueGraph& sigma, const EvalContext& ctx);

struct Proposal {
  GlueGraph candidate;
  MoveKind kind = MoveKind::PerturbVertex;
};

// One random connectivity-preserving move; retries internally up to 32 times
// and throws NoFeasibleMove when nothing admissible comes up.
Proposal propose(const GlueGraph& sigma, const MovePool& pool, const EvalContext& ctx,
                 Rng& rng, double h1_budget);

struct TraceRecord {
  MoveKind kind;
  double d_compliance = 0.0;
  double d_length = 0.0;
  double d_objective = 0.0;
  double objective = 0.0;
  int snapshot = -1;
};

struct OptTrace {
  std::vector<TraceRecord> records;
  std::vector<double> best_timeline;  // nonincreasing
  std::vector<GlueGraph> snapshots;   // per accepted move when enabled
  bool aborted = false;
  std::string abort_reason;
};

struct OptimizeResult {
  GlueGraph best;
  Evaluation best_eval;
  OptTrace trace;
};

using TraceSink = std::function<void(const TraceRecord&, const GlueGraph& current)>;

// Metropolis annealing over the move pool. Fully reproducible from the seed;
// every intermediate graph is connected; the best-seen admissible graph is
// returned. Solver failures abort with the partial trace in the result.
OptimizeResult optimize(const GlueGraph& start, const EvalContext& ctx,
                        const AnnealSchedule& schedule, const MovePool& pool,
                        bool keep_snapshots = false, const TraceSink& sink = nullptr);

struct LambdaScanRow {
  double lambda = 0.0;
  double h1 = 0.0;
  double objective = 0.0;
};

// One optimize run per lambda (shared seed); the empirical nontriviality
// threshold is the last lambda with positive glue length.
std::vector<LambdaScanRow> lambda_scan(const GlueGraph& start, const EvalContext& ctx,
                                       const AnnealSchedule& schedule, const MovePool& pool,
                                       const std::vector<double>& lambdas);

// canonical content hash of a normalized graph (evaluation cache key)
std::uint64_t canonical_hash(const GlueGraph& g);

}  // namespace pcl

#endif
