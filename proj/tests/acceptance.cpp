// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance <path-to-sheaflearn-cli>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <tuple>

#include "sheaflearn/align.hpp"
#include "sheaflearn/denoise.hpp"
#include "sheaflearn/experiment.hpp"
#include "sheaflearn/infer.hpp"
#include "sheaflearn/io.hpp"
#include "sheaflearn/sheaf.hpp"
#include "sheaflearn/synth.hpp"

using namespace sheaflearn;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and sizes.
constexpr int kOptimalityInstances = 200;
constexpr int kOptimalityMaps = 100;
constexpr double kOptimalityMargin = -1e-9;
constexpr double kOptimalitySeconds = 10.0;

constexpr int kTraceInstances = 200;
constexpr double kTraceRelTol = 1e-9;

constexpr int kScanInstances = 50;
constexpr int kScanPoints = 1000000;
constexpr double kScanTol = 1e-6;

constexpr int kLaplacianSheaves = 100;
constexpr int kLaplacianMaxNodes = 12;
constexpr int kLaplacianMaxDim = 6;
constexpr double kFactorRelTol = 1e-12;
constexpr double kPsdRelTol = 1e-9;
constexpr double kQuadraticRelTol = 1e-9;

constexpr int kGreedySeeds = 50;
constexpr int kGreedyMaxNodes = 6;
constexpr double kGreedySumRelTol = 1e-12;

constexpr double kDominanceTol = 1e-9;
constexpr double kSweepSeconds = 120.0;

constexpr int kClusterSeeds = 20;
constexpr int kClusterRequiredWins = 18;
constexpr int kConnectLow = 40;
constexpr int kConnectHigh = 80;

constexpr int kDenoiseInstances = 20;
constexpr double kDenoiseObjectiveTol = 1e-6;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kLeastSquaresTol = 1e-9;
constexpr double kConvergedRelTol = 1e-14;
constexpr int kConvergedMaxIters = 1000000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

MatrixXd subspace_signal(int d, int k, int n, Rng& rng) {
  return random_orthonormal(d, k, rng) * gaussian_matrix(k, n, rng);
}

Verdict procrustes_optimality() {
  const auto start = Clock::now();
  Rng rng = substream(1001, 0);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kOptimalityInstances; ++i) {
    const int d = 1 + i % 8;
    const int n = 1 + (i * 7) % 64;
    const int ku = 1 + i % d, kv = 1 + (i / 3) % d;
    const MatrixXd du = random_orthonormal(d, ku, rng), dv = random_orthonormal(d, kv, rng);
    const MatrixXd su = gaussian_matrix(ku, n, rng);
    MatrixXd sv = gaussian_matrix(kv, n, rng);
    if (i % 2 == 0) sv += dv.transpose() * random_orthonormal(d, d, rng) * du * su;
    const Candidate cand = procrustes_align(du, su, dv, sv);
    const MatrixXd xu = du * su, xv = dv * sv;
    const double achieved = std::max(cand.cost, (cand.map_u.matrix * xu - xv).squaredNorm());
    for (int q = 0; q < kOptimalityMaps; ++q)
      worst = std::min(worst, (random_orthonormal(d, d, rng) * xu - xv).squaredNorm() - achieved);
  }
  const double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "min margin %.3e (>= %.0e), %.2f s (< %.0f s)", worst, kOptimalityMargin, elapsed,
                kOptimalitySeconds);
  return {worst >= kOptimalityMargin && elapsed < kOptimalitySeconds, buf};
}

Verdict trace_identity() {
  Rng rng = substream(1002, 0);
  double worst = 0.0;
  for (int i = 0; i < kTraceInstances; ++i) {
    const int d = 2 + i % 7;
    const int n = 4 + (i * 5) % 61;
    const int ku = 1 + i % d, kv = 1 + (i / 2) % d;
    const MatrixXd du = random_orthonormal(d, ku, rng), dv = random_orthonormal(d, kv, rng);
    const MatrixXd su = gaussian_matrix(ku, n, rng), sv = gaussian_matrix(kv, n, rng);
    const Candidate cand = procrustes_align(du, su, dv, sv);
    const MatrixXd chat = cross_covariance(su, sv).matrix;
    const double achieved = (cand.map_u.matrix * du * chat * dv.transpose()).trace() * n;
    const MatrixXd a = du * su * sv.transpose() * dv.transpose();
    const double sigma_sum = Eigen::JacobiSVD<MatrixXd>(a).singularValues().sum();
    worst = std::max(worst, std::abs(achieved - sigma_sum) / std::max(sigma_sum, 1e-300));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max relative error %.3e (<= %.0e)", worst, kTraceRelTol);
  return {worst <= kTraceRelTol, buf};
}

// ||M Xu - Xv||^2 = tr(M^T M Gu) - 2 tr(M Xu Xv^T) + ||Xv||^2 for any 2 x 2 M.
double scan_min(const Eigen::Matrix2d& gu, const Eigen::Matrix2d& cross, double nv) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanPoints; ++i) {
    const double t = 2.0 * std::numbers::pi * i / kScanPoints;
    const double c = std::cos(t), s = std::sin(t);
    Eigen::Matrix2d rot, ref;
    rot << c, -s, s, c;
    ref << c, s, s, -c;
    for (const Eigen::Matrix2d* m : {&rot, &ref}) {
      const double v = (m->transpose() * *m * gu).trace() - 2.0 * (*m * cross).trace() + nv;
      best = std::min(best, v);
    }
  }
  return best;
}

Verdict angle_scan() {
  Rng rng = substream(1003, 0);
  double worst = 0.0;
  for (int i = 0; i < kScanInstances; ++i) {
    const int n = 2 + (i * 3) % 30;
    const int ku = 1 + i % 2, kv = 1 + (i / 2) % 2;
    const MatrixXd du = random_orthonormal(2, ku, rng), dv = random_orthonormal(2, kv, rng);
    const MatrixXd su = gaussian_matrix(ku, n, rng), sv = gaussian_matrix(kv, n, rng);
    const Candidate cand = procrustes_align(du, su, dv, sv);
    const MatrixXd xu = du * su, xv = dv * sv;
    const Eigen::Matrix2d gu = xu * xu.transpose(), cross = xu * xv.transpose();
    worst = std::max(worst, std::abs(cand.cost - scan_min(gu, cross, xv.squaredNorm())));
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max |cost - scan| %.3e (<= %.0e), %d points per branch", worst, kScanTol,
                kScanPoints);
  return {worst <= kScanTol, buf};
}

MatrixXd graph_laplacian(int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  MatrixXd l = MatrixXd::Zero(n, n);
  for (const auto& [u, v] : edges) {
    l(u, u) += 1.0;
    l(v, v) += 1.0;
    l(u, v) -= 1.0;
    l(v, u) -= 1.0;
  }
  return l;
}

Verdict laplacian_algebra() {
  Rng rng = substream(1004, 0);
  double factor = 0.0, psd = 0.0, quad = 0.0;
  bool constant_exact = true;
  for (int i = 0; i < kLaplacianSheaves; ++i) {
    const int n = 2 + i % (kLaplacianMaxNodes - 1);
    const int d = 1 + i % kLaplacianMaxDim;
    const int all = n * (n - 1) / 2;
    const int m = std::uniform_int_distribution<int>(0, all)(rng);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(m);

    Sheaf<double> sheaf(StalkSpec(n, d));
    for (const auto& [u, v] : pairs) sheaf.add_edge(u, v, random_orthonormal(d, d, rng), random_orthonormal(d, d, rng));
    const auto lap = assemble_laplacian(sheaf);
    const MatrixXd bbt = lap.incidence * lap.incidence.transpose();
    const double lnorm = std::max(lap.matrix.norm(), 1e-300);
    factor = std::max(factor, (lap.matrix - bbt).norm() / lnorm);

    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(lap.matrix, Eigen::EigenvaluesOnly).eigenvalues();
    if (eig.maxCoeff() > 0.0) psd = std::max(psd, -eig.minCoeff() / eig.maxCoeff());

    const MatrixXd g = graph_laplacian(n, pairs);
    MatrixXd expected = MatrixXd::Zero(n * d, n * d);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) expected.block(u * d, v * d, d, d) = g(u, v) * MatrixXd::Identity(d, d);
    if (assemble_laplacian(constant_sheaf(n, d, pairs)).matrix != expected) constant_exact = false;

    const MatrixXd x = gaussian_matrix(n * d, 1 + i % 5, rng);
    double edge_sum = 0.0;
    for (const auto& e : sheaf.edges())
      edge_sum += (e.tail_map.matrix * x.middleRows(e.tail * d, d) - e.head_map.matrix * x.middleRows(e.head * d, d))
                      .squaredNorm();
    const double tv = total_variation(lap.matrix, x);
    quad = std::max(quad, std::abs(tv - edge_sum) / std::max(edge_sum, 1e-300));
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "||L-BB^T||/||L|| %.2e (<= %.0e), -lmin/lmax %.2e (<= %.0e), constant sheaf %s, TV rel %.2e (<= %.0e)",
                factor, kFactorRelTol, psd, kPsdRelTol, constant_exact ? "exact" : "MISMATCH", quad, kQuadraticRelTol);
  return {factor <= kFactorRelTol && psd <= kPsdRelTol && constant_exact && quad <= kQuadraticRelTol, buf};
}

Verdict greedy_exactness() {
  int instances = 0, failures = 0;
  for (int seed = 0; seed < kGreedySeeds; ++seed) {
    Rng rng = substream(1005, seed);
    for (int n = 2; n <= kGreedyMaxNodes; ++n) {
      std::vector<MatrixXd> signals;
      for (int u = 0; u < n; ++u) signals.push_back(subspace_signal(4, 2, 6, rng));
      const auto cands = enumerate_candidates_signals(
          signals, seed % 2 == 0 ? DistanceMode::aligned : DistanceMode::baseline);
      const int m = static_cast<int>(cands.size());
      std::vector<double> best(m + 1, std::numeric_limits<double>::infinity());
      std::vector<unsigned> arg(m + 1, 0);
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        double total = 0.0;
        for (int k = 0; k < m; ++k)
          if (mask & (1u << k)) total += cands[k].cost;
        const int size = __builtin_popcount(mask);
        if (total < best[size]) {
          best[size] = total;
          arg[size] = mask;
        }
      }
      for (int e0 = 0; e0 <= m; ++e0) {
        ++instances;
        const auto sel = select_topology(cands, e0);
        const std::set<std::pair<NodeId, NodeId>> chosen(sel.selected.begin(), sel.selected.end());
        double total = 0.0;
        bool same = static_cast<int>(chosen.size()) == e0;
        for (int k = 0; k < m; ++k) {
          const bool in = chosen.count({cands[k].u, cands[k].v}) > 0;
          if (in) total += cands[k].cost;
          if (in != bool(arg[e0] & (1u << k))) same = false;
        }
        if (!same || std::abs(total - best[e0]) > kGreedySumRelTol * std::max(1.0, best[e0])) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(instances - failures) + "/" + std::to_string(instances) +
                             " (seed, V <= 6, E0) instances match exhaustive search"};
}

Verdict sweep_dominance() {
  const auto start = Clock::now();
  const SweepSpec spec;
  const RunReport report = run_tv_sweep(spec, SynthConfig{}, DenoiseConfig{}, RunOptions{1, false});
  const double elapsed = seconds_since(start);
  std::map<std::tuple<double, double, int>, double> aligned, baseline;
  std::map<std::pair<double, double>, std::set<int>> e0s;
  std::map<std::pair<double, double>, int> connect;
  for (const auto& r : report.rows) {
    (r.mode == DistanceMode::aligned ? aligned : baseline)[{r.alpha, r.snr_db, r.e0}] = r.total_variation;
    e0s[{r.alpha, r.snr_db}].insert(r.e0);
    auto [it, fresh] = connect.emplace(std::pair{r.alpha, r.snr_db}, r.connect_min);
    if (!fresh) it->second = std::min(it->second, r.connect_min);
  }
  int violations = 0;
  for (const auto& [key, tv] : aligned) {
    auto it = baseline.find(key);
    if (it == baseline.end() || tv > it->second + kDominanceTol) ++violations;
  }
  // Every (alpha, snr) point must cover E0 = connectivity minimum .. 120 in both modes.
  bool grid_ok = e0s.size() == spec.alpha_grid.size() * spec.snr_grid.size() && aligned.size() == baseline.size();
  int lo = 120;
  for (const auto& [point, set] : e0s) {
    const int c = connect.at(point);
    lo = std::min(lo, c);
    grid_ok = grid_ok && static_cast<int>(set.size()) == 120 - c + 1 && *set.begin() == c && *set.rbegin() == 120;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%d violations over %zu grid points (E0 from %d..120), grid %s, %.1f s single-threaded (< %.0f s)",
                violations, aligned.size(), lo, grid_ok ? "complete" : "INCOMPLETE", elapsed, kSweepSeconds);
  return {violations == 0 && grid_ok && elapsed < kSweepSeconds, buf};
}

Verdict cluster_reproduction() {
  int wins = 0, in_range = 0, lo = std::numeric_limits<int>::max(), hi = 0;
  for (int seed = 1; seed <= kClusterSeeds; ++seed) {
    const ClusterOutcome out = run_cluster_experiment(static_cast<std::uint64_t>(seed));
    const ModeResult& a = out.modes.at(0);
    const ModeResult& b = out.modes.at(1);
    if (a.intra_cluster_fraction > b.intra_cluster_fraction) ++wins;
    if (a.connect_min >= kConnectLow && a.connect_min <= kConnectHigh) ++in_range;
    lo = std::min(lo, a.connect_min);
    hi = std::max(hi, a.connect_min);
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "aligned intra-cluster fraction wins %d/%d (>= %d); aligned connectivity minimum in [%d, %d] for "
                "%d/%d seeds (observed %d..%d)",
                wins, kClusterSeeds, kClusterRequiredWins, kConnectLow, kConnectHigh, in_range, kClusterSeeds, lo, hi);
  return {wins >= kClusterRequiredWins && in_range == kClusterSeeds, buf};
}

// Exact cyclic block-coordinate descent over the rows of S.
MatrixXd coordinate_descent_oracle(const MatrixXd& x, const MatrixXd& d, double alpha) {
  MatrixXd s = MatrixXd::Zero(d.cols(), x.cols());
  MatrixXd residual = x;
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index i = 0; i < d.cols(); ++i) {
      residual += d.col(i) * s.row(i);
      const Eigen::RowVectorXd target = d.col(i).transpose() * residual;
      const double norm = target.norm();
      Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(x.cols());
      if (norm > alpha / 2.0) next = (norm - alpha / 2.0) / norm * target / d.col(i).squaredNorm();
      moved = std::max(moved, (next - s.row(i)).cwiseAbs().maxCoeff());
      s.row(i) = next;
      residual -= d.col(i) * s.row(i);
    }
    if (moved < 1e-15) break;
  }
  return s;
}

Verdict denoiser_optimality() {
  Rng rng = substream(1008, 0);
  double gap = 0.0, default_gap = 0.0, rise = 0.0, ls = 0.0;
  for (int i = 0; i < kDenoiseInstances; ++i) {
    const int d = 3 + i % 4;
    const int k = d + i % 3;
    const Dictionary dict{gaussian_matrix(d, k, rng), false};
    const MatrixXd x = gaussian_matrix(d, 4 + i % 5, rng);
    DenoiseConfig cfg;
    cfg.alpha = 0.1 + 0.25 * (i % 5);
    const double oracle = group_lasso_objective(x, dict.atoms, coordinate_descent_oracle(x, dict.atoms, cfg.alpha),
                                                cfg.alpha);
    default_gap = std::max(default_gap, std::abs(block_sparse_code(x, dict, cfg).objective - oracle));

    cfg.rel_tol = kConvergedRelTol;
    cfg.max_iters = kConvergedMaxIters;
    const SparseCode code = block_sparse_code(x, dict, cfg);
    gap = std::max(gap, std::abs(code.objective - oracle));
    for (std::size_t t = 1; t < code.objective_history.size(); ++t)
      rise = std::max(rise, code.objective_history[t] - code.objective_history[t - 1]);

    const Dictionary ortho{random_orthonormal(d, d, rng), true};
    DenoiseConfig zero;
    zero.alpha = 0.0;
    const SparseCode exact = block_sparse_code(x, ortho, zero);
    ls = std::max(ls, (exact.coefficients - ortho.atoms.transpose() * x).cwiseAbs().maxCoeff());
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "max |F - F_oracle| %.2e at rel_tol %.0e (<= %.0e; %.2e with default stopping), max per-iteration "
                "rise %.2e (<= %.0e), alpha=0 error %.2e (<= %.0e)",
                gap, kConvergedRelTol, kDenoiseObjectiveTol, default_gap, rise, kMonotoneSlack, ls, kLeastSquaresTol);
  return {gap <= kDenoiseObjectiveTol && rise <= kMonotoneSlack && ls <= kLeastSquaresTol, buf};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).generic_string()] = io::read_text(entry.path());
  return files;
}

Verdict cli_determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "sheaflearn_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  io::write_json(config, io::json::parse(R"({
    "synth": {"node_count": 8, "ambient_dim": 32, "dim_min": 3, "dim_max": 12, "snapshots": 128},
    "denoise": {"alpha": 0.5},
    "sweep": {"alpha_grid": [0.1, 1.0], "snr_grid": [10, 20]},
    "cluster": {"snapshots": 256}
  })"));

  const std::string base = "\"" + cli + "\" --config \"" + config.string() + "\" --seed 11 ";
  struct Job {
    std::string name;
    std::string args;
  };
  // export consumes the sheaf written by the first infer run.
  const std::vector<Job> jobs{
      {"generate", "generate"},
      {"denoise", "denoise"},
      {"infer", "infer --maps"},
      {"infer_baseline", "infer --mode baseline --e0 12"},
      {"sweep", "sweep"},
      {"cluster", "cluster"},
      {"export", "export --sheaf \"" + (root / "run0" / "infer" / "sheaf.json").string() + "\""},
  };
  std::vector<std::string> failed;
  for (const auto& job : jobs) {
    std::map<std::string, std::string> outputs[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / ("run" + std::to_string(run)) / job.name;
      const std::string cmd = base + "--out \"" + out.string() + "\" " + job.args + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0 || !fs::exists(out)) {
        ran = false;
        break;
      }
      outputs[run] = snapshot(out);
    }
    if (!ran || outputs[0].empty() || outputs[0] != outputs[1]) failed.push_back(job.name);
  }
  fs::remove_all(root);
  std::string detail = std::to_string(jobs.size() - failed.size()) + "/" + std::to_string(jobs.size()) +
                       " subcommand runs byte-identical across two runs";
  for (const auto& f : failed) detail += "; differs or failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <sheaflearn-cli>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"procrustes optimality vs random orthogonal maps", procrustes_optimality},
      {"trace identity", trace_identity},
      {"2x2 angle-scan oracle over O(2)", angle_scan},
      {"sheaf Laplacian algebra", laplacian_algebra},
      {"greedy selection matches exhaustive search", greedy_exactness},
      {"total variation sweep: aligned below baseline", sweep_dominance},
      {"two-cluster scenario", cluster_reproduction},
      {"group-sparse denoiser optimality", denoiser_optimality},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s [%zu] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
