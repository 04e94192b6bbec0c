// Serial vs OpenMP timings for the distance kernels and batch assignment.
// Each case also checks that both paths agree exactly.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phida/assignment.hpp"
#include "phida/kernels.hpp"
#include "phida/learner.hpp"
#include "phida/synthetic.hpp"

namespace {

using phida::Points;
using phida::Vector;
using phida::kernels::Exec;

Points random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  phida::SplitMix64 rng(seed);
  Points p(n, Vector(d));
  for (auto& v : p) {
    for (auto& x : v) x = rng.normal();
  }
  return p;
}

// Best of `reps` wall-clock runs, in milliseconds.
double time_ms(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool report(const std::string& name, int reps, const std::function<void(Exec)>& f,
            const std::function<bool()>& same) {
  const double s = time_ms(reps, [&] { f(Exec::serial); });
  const double p = time_ms(reps, [&] { f(Exec::parallel); });
  const bool ok = same();
  std::printf("%-28s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  %s\n", name.c_str(), s, p, s / p,
              ok ? "match" : "MISMATCH");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phida kernel benchmark"};
  std::size_t n = 2000;
  std::size_t d = 8;
  int reps = 5;
  app.add_option("-n,--points", n, "points per kernel")->check(CLI::PositiveNumber);
  app.add_option("-d,--dim", d, "dimension")->check(CLI::PositiveNumber);
  app.add_option("-r,--reps", reps, "repetitions (best is reported)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::printf("openmp %s, max threads %d\n", phida::kernels::openmp_enabled() ? "on" : "off",
              phida::kernels::max_threads());
  bool ok = true;

  const auto pts = random_points(n, d, 1);
  {
    std::vector<double> a, b;
    ok &= report(
        "pairwise_distances", reps,
        [&](Exec e) { (e == Exec::serial ? a : b) = phida::kernels::pairwise_distances(pts, e); },
        [&] { return a == b; });
  }
  {
    const auto queries = random_points(200, d, 2);
    std::vector<double> a(n), b(n);
    ok &= report(
        "distances_to x200", reps,
        [&](Exec e) {
          auto& out = e == Exec::serial ? a : b;
          for (const auto& q : queries) phida::kernels::distances_to(q, pts, out, e);
        },
        [&] { return a == b; });
  }
  {
    phida::ModelState model(d, phida::AblationFlags{});
    phida::fit(model, pts);
    phida::finalize(model);
    const auto& view = phida::prediction_view(model);
    const auto queries = random_points(n * 5, d, 3);
    std::vector<std::size_t> a, b;
    ok &= report(
        "assign_batch (" + std::to_string(model.node_count()) + " nodes)", reps,
        [&](Exec e) { (e == Exec::serial ? a : b) = phida::assign_batch(view, queries, e); },
        [&] { return a == b; });
  }
  return ok ? 0 : 1;
}
