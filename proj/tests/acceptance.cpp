// Acceptance suite: one line per criterion, non-zero exit if any fails.
//
//   1  retained-fit chi2 identity vs explicit submatrix inversion
//   2  downdate vs inversion of the reduced covariance
//   3  uncorrelated collapse of delta-chi2 onto the naive score
//   4  3-sigma retention probability
//   5  downdate+refit elimination == brute-force elimination
//   6  measured complexity exponents and ordering
//   7  refit dominance
//   8  invariant suite

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "corrfit/bench.hpp"
#include "corrfit/outlier.hpp"
#include "corrfit/report.hpp"
#include "oracles.hpp"

using namespace corrfit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %-2s %-44s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

FitProblem make_problem(const oracle::Instance& inst) {
  return FitProblem{inst.design, inst.y, invert(assemble_covariance(inst.model))};
}

bool bitwise_symmetric(const SymmetricMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::signbit(m(i, j)) != std::signbit(m(j, i)) || m(i, j) != m(j, i)) return false;
  return true;
}

Outcome central_identity() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> dim(1, 40), kdim(0, 4);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = dim(rng), K = kdim(rng);
    const auto model = oracle::random_model(rng, n, K);
    const auto v = assemble_covariance(model);
    const auto p = invert(v);
    std::vector<double> eps(n);
    for (auto& e : eps) e = 2.0 * g(rng);
    // Quad precision keeps the oracle's own chi2 - chi2_k cancellation negligible.
    const auto refs = oracle::fixed_residual_scores<oracle::Quad>(v, eps);
    for (std::size_t k = 0; k < n; ++k) {
      const double got = delta_chi2_score(p, eps, k).value;
      const double ref = refs[k];
      worst = std::max(worst, std::abs(got - ref) / std::max(ref, 1e-300));
      ++checked;
    }
  }
  return {worst <= 1e-10, fmt("%.0f scores, worst relative error %.2e (tol 1e-10)", double(checked), worst)};
}

Outcome downdate_correctness() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<std::size_t> dim(2, 40), kdim(0, 4);
  double worst_lib = 0.0, worst_ext = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = dim(rng);
    const auto v = trial % 2 ? oracle::random_spd(rng, n) : assemble_covariance(oracle::random_model(rng, n, kdim(rng)));
    const auto p = invert(v);
    for (std::size_t k = 0; k < n; ++k) {
      const auto reduced = delete_row_col(v, k);
      const auto block = downdate(p, k).surviving_block();
      const auto lib = invert(reduced);
      const auto ext = oracle::gauss_jordan_inverse(oracle::to_dense(reduced));
      double scale = 0.0, err_lib = 0.0, err_ext = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
          scale = std::max(scale, std::abs(lib(i, j)));
          err_lib = std::max(err_lib, std::abs(block(i, j) - lib(i, j)));
          err_ext = std::max(err_ext, static_cast<double>(std::fabs(block(i, j) - ext[i][j])));
        }
      worst_lib = std::max(worst_lib, err_lib / scale);
      worst_ext = std::max(worst_ext, err_ext / scale);
    }
  }
  return {worst_lib <= 1e-10 && worst_ext <= 1e-10,
          fmt("vs invert %.2e, vs extended-precision oracle %.2e (tol 1e-10)", worst_lib, worst_ext)};
}

Outcome uncorrelated_collapse() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  std::normal_distribution<double> g(0.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = dim(rng);
    const auto model = oracle::random_model(rng, n, 0);
    const auto p = invert(assemble_covariance(model));
    std::vector<double> eps(n);
    for (auto& e : eps) e = g(rng);
    const auto dc = delta_chi2_scores(p, eps);
    const auto nv = naive_scores(eps, model.sigma);
    for (std::size_t k = 0; k < n; ++k)
      worst = std::max(worst, std::abs(dc[k].value - nv[k].value) / std::max(1.0, nv[k].value));
  }
  return {worst <= 1e-14, fmt("worst |D_delta - D_naive| / max(1, D) = %.2e (tol 1e-14)", worst)};
}

Outcome retention_probability() {
  std::mt19937_64 rng(4004);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> sig(0.1, 10.0);
  const std::size_t n = 1000000;
  std::vector<double> eps(n), sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigma[i] = sig(rng);
    eps[i] = sigma[i] * g(rng);
  }
  std::size_t kept = 0;
  for (const auto& s : naive_scores(eps, sigma)) kept += s.value <= 3.0;
  const double frac = static_cast<double>(kept) / static_cast<double>(n);
  return {frac >= 0.9953 && frac <= 0.9993, fmt("retained fraction %.5f (window [0.9953, 0.9993])", frac)};
}

Outcome strategy_equivalence() {
  std::mt19937_64 rng(5005);
  std::uniform_int_distribution<std::size_t> dim(6, 30), kdim(0, 4), odim(1, 4);
  int seq_mismatch = 0;
  double worst = 0.0;
  std::size_t removals = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = oracle::random_instance(rng, dim(rng), kdim(rng), odim(rng));
    const auto p = make_problem(inst);
    const auto bf = eliminate(p, inst.model, {.strategy = Strategy::BruteForce, .refit_each_iteration = true});
    const auto dd = eliminate(p, inst.model, {.strategy = Strategy::Downdate, .refit_each_iteration = true});
    bool same = bf.iterations.size() == dd.iterations.size();
    for (std::size_t i = 0; same && i < bf.iterations.size(); ++i) same = bf.iterations[i].point == dd.iterations[i].point;
    if (!same) ++seq_mismatch;
    removals += bf.iterations.size();
    // Brute-force reference: rebuild V over the brute-force survivors and fit from scratch.
    Matrix X(bf.surviving.size(), 2);
    Vector y(bf.surviving.size());
    for (std::size_t a = 0; a < bf.surviving.size(); ++a) {
      X(a, 0) = inst.design(bf.surviving[a], 0);
      X(a, 1) = inst.design(bf.surviving[a], 1);
      y[a] = inst.y[bf.surviving[a]];
    }
    const double ref = gls_fit(FitProblem{X, y, invert(assemble_covariance(inst.model.subset(bf.surviving)))}).chi2;
    // Saturated fits have chi2 == 0 up to rounding; floor the scale there.
    const double scale = std::max(ref, 1e-12 * bf.initial_fit.chi2);
    worst = std::max(worst, std::abs(dd.final_fit.chi2 - ref) / scale);
    worst = std::max(worst, std::abs(bf.final_fit.chi2 - ref) / scale);
  }
  return {seq_mismatch == 0 && worst <= 1e-8,
          fmt("%.0f sequence mismatches, %.0f removals, worst final chi2 rel diff %.2e (tol 1e-8)", double(seq_mismatch),
              double(removals), worst)};
}

Outcome complexity() {
  const auto slope_of = [](Strategy s, std::vector<std::size_t> sizes) {
    BenchOptions opt;
    opt.sizes = std::move(sizes);
    opt.strategies = {s};
    opt.seed = 6006;
    opt.min_seconds = 0.5;
    return benchmark(opt);
  };
  const auto dc = slope_of(Strategy::DeltaChi2, {256, 512});
  const auto dd = slope_of(Strategy::Downdate, {256, 512});
  const auto bf = slope_of(Strategy::BruteForce, {64, 128});
  const double s_dc = dc.slopes.at(Strategy::DeltaChi2);
  const double s_dd = dd.slopes.at(Strategy::Downdate);
  const double s_bf = bf.slopes.at(Strategy::BruteForce);
  const bool ok = s_dc >= 1.5 && s_dc <= 2.5 && s_dd >= 2.5 && s_dd <= 3.5 && s_bf >= 3.3 && s_bf <= 4.7;
  return {ok, fmt("slopes delta-chi2 %.2f [1.5,2.5], downdate %.2f [2.5,3.5], brute-force %.2f [3.3,4.7]", s_dc, s_dd,
                  s_bf)};
}

Outcome complexity_ordering() {
  BenchOptions opt;
  opt.sizes = {512};
  opt.strategies = {Strategy::DeltaChi2, Strategy::Downdate, Strategy::BruteForce};
  opt.seed = 6007;
  opt.min_seconds = 0.5;
  const auto r = benchmark(opt);
  const double t_dc = r.rows[0].seconds, t_dd = r.rows[1].seconds, t_bf = r.rows[2].seconds;
  const bool ok = t_bf > 5.0 * t_dd && t_dd > 5.0 * t_dc;
  return {ok, fmt("N=512 pass: brute-force %.3gs, downdate %.3gs, delta-chi2 %.3gs (each >= 5x)", t_bf, t_dd, t_dc)};
}

Outcome refit_dominance() {
  std::mt19937_64 rng(7007);
  std::uniform_int_distribution<std::size_t> dim(4, 30), kdim(0, 4), odim(0, 3);
  std::size_t points = 0, violations = 0, strict_cases = 0, strict_failures = 0;
  double min_move = INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = oracle::random_instance(rng, dim(rng), kdim(rng), odim(rng));
    const auto p = make_problem(inst);
    const auto base = gls_fit(p);
    const auto bf = brute_force_scores(p, inst.model);
    const auto dc = delta_chi2_scores(p.precision, base.residuals);
    for (std::size_t k = 0; k < p.points(); ++k) {
      ++points;
      if (bf[k].value < dc[k].value) ++violations;
      auto reduced = p;
      downdate_in_place(reduced.precision, k);
      const auto refit = gls_fit(reduced);
      double move = 0.0;
      for (std::size_t a = 0; a < p.parameters(); ++a)
        move = std::max(move, std::abs(refit.parameters[a] - base.parameters[a]));
      min_move = std::min(min_move, move);
      if (move > 1e-12) {
        ++strict_cases;
        if (!(bf[k].value > dc[k].value)) ++strict_failures;
      }
    }
  }
  return {violations == 0 && strict_failures == 0,
          fmt("%.0f points, %.0f violations of D_bf >= D_dc, strict failures %.0f", double(points), double(violations),
              double(strict_failures)) +
              fmt(" of %.0f (smallest beta move %.1e)", double(strict_cases), min_move)};
}

Outcome invariant_suite() {
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<std::size_t> dim(3, 40), kdim(0, 5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::string> broken;
  const auto note = [&](bool ok, const std::string& what) {
    if (!ok && std::find(broken.begin(), broken.end(), what) == broken.end()) broken.push_back(what);
  };
  double worst_roundtrip = 0.0, worst_commute = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = dim(rng);
    const auto model = oracle::random_model(rng, n, kdim(rng));
    const auto v = assemble_covariance(model);
    note(bitwise_symmetric(v), "covariance symmetry");
    const auto p = invert(v);
    note(bitwise_symmetric(p.entries()), "inverse symmetry");
    note(p.removed().empty(), "fresh inverse has no removals");

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += v(i, k) * p(k, j);
        worst_roundtrip = std::max(worst_roundtrip, std::abs(s - (i == j ? 1.0 : 0.0)));
      }

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    const auto ab = downdate(downdate(p, a), b);
    const auto ba = downdate(downdate(p, b), a);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) worst_commute = std::max(worst_commute, std::abs(ab(i, j) - ba(i, j)));
    for (const auto* q : {&ab, &ba}) {
      note(bitwise_symmetric(q->entries()), "downdate symmetry");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k : {a, b}) {
          const double x = q->entries()(k, i), y = q->entries()(i, k);
          note(x == 0.0 && !std::signbit(x) && y == 0.0 && !std::signbit(y), "bitwise-zero removed rows");
        }
    }

    std::vector<double> eps(n);
    for (auto& e : eps) e = 3.0 * g(rng);
    const double chi2 = chi_squared(eps, p);
    note(chi2 >= 0.0, "chi2 non-negative");
    for (const auto& s : delta_chi2_scores(p, eps)) note(std::isfinite(s.value) && s.value >= 0.0, "D real");
    for (const auto& s : downdate_scores(p, eps)) note(std::isfinite(s.value) && s.value >= 0.0, "D real");
  }
  note(worst_roundtrip <= 1e-10, "invert round trip");
  note(worst_commute <= 1e-12, "downdate commutativity");

  // Elimination invariants under repeated runs and refits.
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = oracle::random_instance(rng, 8 + static_cast<std::size_t>(trial) % 20, kdim(rng), 1 + trial % 4);
    const auto p = make_problem(inst);
    for (auto s : {Strategy::Naive, Strategy::DeltaChi2, Strategy::Downdate, Strategy::BruteForce}) {
      for (bool refit : {false, true}) {
        const EliminationConfig cfg{.strategy = s, .refit_each_iteration = refit};
        const auto r1 = eliminate(p, inst.model, cfg);
        const auto r2 = eliminate(p, inst.model, cfg);
        Dataset names;
        for (std::size_t i = 0; i < p.points(); ++i) names.points.push_back({"p" + std::to_string(i), 0.0, 1.0, {1.0, 0.0}});
        note(serialize_report(r1, names) == serialize_report(r2, names), "eliminate determinism");
        note(r1.final_fit.chi2 >= 0.0 && r1.initial_fit.chi2 >= 0.0, "chi2 non-negative");
        double last = r1.initial_fit.chi2;
        for (const auto& step : r1.iterations) {
          note(step.score > cfg.d_max, "removed points exceed d_max");
          if (refit) {
            note(step.chi2_after <= last * (1 + 1e-12), "chi2 non-increasing under refit");
            last = step.chi2_after;
          }
        }
      }
    }
  }
  std::string detail = fmt("round trip %.1e, commutativity %.1e", worst_roundtrip, worst_commute);
  for (const auto& b : broken) detail += "; broken: " + b;
  return {broken.empty(), detail};
}

}  // namespace

int main() {
  run("1", "central identity (retained-fit chi2_k)", central_identity);
  run("2", "downdate correctness", downdate_correctness);
  run("3", "uncorrelated collapse", uncorrelated_collapse);
  run("4", "retention probability at D_max = 3", retention_probability);
  run("5", "strategy equivalence (downdate+refit)", strategy_equivalence);
  run("6", "complexity exponents", complexity);
  run("6b", "complexity ordering at N = 512", complexity_ordering);
  run("7", "refit dominance", refit_dominance);
  run("8", "invariant suite", invariant_suite);
  std::printf("%s: %d criterion line(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
