// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qxfer/cli.hpp"
#include "qxfer/experiment.hpp"
#include "qxfer/io.hpp"
#include "qxfer/model.hpp"
#include "qxfer/perturb.hpp"
#include "test_util.hpp"

using namespace qxfer;
using qxfer::testing::Gen;
using qxfer::testing::max_abs;

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kReferenceC = 1.0 / 400.0;
constexpr std::uint64_t kSeed = 7;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string num(double v) { return format_number(v); }

ModelInstance reference_instance(double c, std::uint64_t seed) {
  const auto [sa, sb] = split_seed(seed);
  return reference_model(c, sa, sb);
}

// Long enough that P passes 0.8 and I(B, Ā) approaches its ceiling.
TimeGrid long_grid(const ModelInstance& m) { return default_grid(m, 4.0, 1000); }

struct DecayAgreement {
  double early_gap = 0.0;  // max |P_pert - P_num| before P_num first exceeds 0.4
  double late_gap = 0.0;   // max |P_pert - P_num| where P_num > 0.8
};

DecayAgreement decay_agreement(std::uint64_t seed) {
  const ModelInstance m = reference_instance(kReferenceC, seed);
  const TimeSeries ts = run_decay_series(m, long_grid(m));
  const auto& pn = ts.column(column::kPNumeric);
  const auto& pp = ts.column(column::kPPerturbative);
  DecayAgreement d;
  bool early = true;
  for (std::size_t n = 0; n < ts.size(); ++n) {
    const double gap = std::abs(pp[n] - pn[n]);
    if (pn[n] > 0.4) early = false;
    if (early) d.early_gap = std::max(d.early_gap, gap);
    if (pn[n] > 0.8) d.late_gap = std::max(d.late_gap, gap);
  }
  return d;
}

Verdict criterion1() {
  std::ostringstream detail;
  bool pass = true;
  for (std::uint64_t seed = 7; seed <= 11; ++seed) {
    const DecayAgreement d = decay_agreement(seed);
    const bool ok = d.early_gap <= 0.05 && d.late_gap > 0.1;
    pass = pass && ok;
    detail << " seed " << seed << ": early " << num(d.early_gap) << " late " << num(d.late_gap)
           << (ok ? "" : " (miss)") << ";";
  }
  int agreeing = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    if (decay_agreement(seed).early_gap <= 0.05) ++agreeing;
  }
  detail << " early gap <= 0.05 on " << agreeing << "/30 seeds in 1..30";
  return {pass, detail.str()};
}

Verdict criterion2() {
  const ModelInstance m = reference_instance(kReferenceC, kSeed);
  const TimeSeries ts = run_mi_series(m, long_grid(m));
  const auto& num_i = ts.column(column::kINumeric);
  const auto& mod_i = ts.column(column::kIModel);
  double worst = 0.0;
  for (std::size_t n = 0; n < ts.size(); ++n) worst = std::max(worst, std::abs(num_i[n] - mod_i[n]));
  const double start = num_i.front();
  const double peak = *std::max_element(num_i.begin(), num_i.end());
  const bool pass = worst <= 1e-3 && start <= 1e-6 && peak >= 2.0 * kLn2 - 0.1;
  return {pass, "max |I_model - I_numeric| = " + num(worst) + ", I(0) = " + num(start) +
                    ", max I = " + num(peak)};
}

const SweepResult& reference_sweep() {
  static const SweepResult sweep = [] {
    const auto [sa, sb] = split_seed(kSeed);
    return coupling_sweep([sa, sb](double c) { return reference_model(c, sa, sb); },
                          default_couplings());
  }();
  return sweep;
}

Verdict criterion3() {
  const SweepResult& s = reference_sweep();
  double t_min = INFINITY;
  int valid = 0;
  for (const auto& r : s.rows) {
    if (!r.valid) continue;
    ++valid;
    t_min = std::min(t_min, r.t_target);
  }
  const double share = std::abs(s.fit.intercept) / t_min;
  const bool pass = valid == 10 && s.fit.r_squared >= 0.99 && share <= 0.1;
  return {pass, "valid rows " + std::to_string(valid) + "/10, r2 = " + num(s.fit.r_squared) +
                    ", intercept = " + num(s.fit.intercept) + " (" + num(100.0 * share) +
                    "% of min T = " + num(t_min) + ")"};
}

Verdict criterion4() {
  const auto ks = reference_sweep().row_k();
  if (ks.size() < 2) return {false, "fewer than two valid rows"};
  const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
  double mean = 0.0;
  for (double k : ks) mean += k;
  mean /= ks.size();
  const double spread = (*hi - *lo) / mean;
  return {spread <= 0.3, "K in [" + num(*lo) + ", " + num(*hi) + "], (max - min)/mean = " +
                             num(spread)};
}

Verdict criterion5() {
  const auto [sa, sb] = split_seed(kSeed);
  const AdditivityReport r = pathway_additivity_check(kReferenceC, kReferenceC, sa, sb);
  return {std::abs(r.ratio - 1.0) <= 0.3,
          "1/T combined = " + num(r.inv_combined) + ", sum of single = " + num(r.inv_sum) +
              ", ratio = " + num(r.ratio)};
}

Verdict criterion6() {
  const ModelInstance m = qxfer::testing::toy_model(0.05);
  double worst = 0.0;
  for (double t : {0.1, 1.0, 10.0}) {
    for (int k = 0; k < 2; ++k) {
      for (int kf = 0; kf < 2; ++kf) {
        for (int i = 0; i < 4; ++i) {
          const Complex mel = qxfer::testing::matrix_element_oracle(m, k, kf, i);
          const double de = m.eig_a.eigenvalues[kf] + m.eig_b.eigenvalues[i] -
                            m.eig_a.eigenvalues[k] - m.eig_b.eigenvalues[0];
          const Complex oracle =
              Complex(0, -1) *
              qxfer::testing::simpson([&](double s) { return std::polar(1.0, s * de) * mel; }, t, 4000);
          worst = std::max(worst, std::abs(transition_amplitude(m, k, kf, i, t) - oracle));
        }
      }
    }
  }
  return {worst <= 1e-8, "max |A - quadrature| = " + num(worst)};
}

// Random two-factor model with a qubit A and a dim-8 B.
ModelInstance random_model(Gen& g) {
  const SubsystemSpec a{2, {0.0, 1.0}, g.engine()()};
  const SubsystemSpec b{8, g.sorted_spectrum(8, 0.0, 2.0), g.engine()()};
  const auto eig_a = hamiltonian_from_spectrum(a).second;
  return assemble_model(a, b, {{g.uniform(0.01, 0.3), 1.0, sigma_x_in_eigenbasis(eig_a), g.hermitian(8)}});
}

struct Tally {
  double worst = 0.0;
  void add(double v) { worst = std::max(worst, v); }
};

Verdict criterion7() {
  Gen g(2024);
  Tally unitarity, reconstruction, identity, drift, dual, haar, endpoints;

  for (int trial = 0; trial < 40; ++trial) {
    const int n = g.integer(2, 64);
    const ComplexMatrix h = g.hermitian(n, g.uniform(0.1, 10.0));
    const SpectralDecomposition d = eig_decompose(h);
    reconstruction.add(max_abs(d.reconstruct() - h) / std::max(1.0, max_abs(h)));
    const StateVector x({g.unit_vector(n), {n}});
    const StateVector y({g.unit_vector(n), {n}});
    const double t = g.uniform(0.0, 1e4);
    const StateVector xt = evolve(x, d, t), yt = evolve(y, d, t);
    unitarity.add(std::abs(xt.amplitudes().norm() - 1.0));
    unitarity.add(std::abs(xt.amplitudes().dot(yt.amplitudes()) - x.amplitudes().dot(y.amplitudes())));

    const int hd = g.integer(1, 128);
    const ComplexMatrix u = haar_unitary(hd, g.engine()());
    haar.add(max_abs(u.adjoint() * u - ComplexMatrix::Identity(hd, hd)));
  }

  // Trajectories on random small models and on the built-in instance.
  std::vector<ModelInstance> models;
  for (int k = 0; k < 10; ++k) models.push_back(random_model(g));
  models.push_back(reference_instance(kReferenceC, kSeed));
  const std::vector<int> bar{0}, a{1}, b{2};
  for (const auto& m : models) {
    const EntangledEvolution ent(m, {0, 1});
    const DecayEvolution excited(m, 1), ground(m, 0);
    const double t_max = m.eig_b.dim() == 128 ? long_grid(m).t_max : 200.0;
    for (double t : TimeGrid{t_max, 60}.points()) {
      const StateVector psi = ent.at(t);
      identity.add(std::abs(mutual_information(psi, a, bar) + mutual_information(psi, b, bar) -
                            2.0 * kLn2));
      drift.add(std::abs(subsystem_entropy(psi, bar) - kLn2));
      const ComplexMatrix rho_a = partial_trace(psi, a).matrix;
      const ComplexVector e1 = m.eig_a.eigenvectors.col(1);
      const double excited_pop = e1.dot(rho_a * e1).real();
      dual.add(std::abs(excited.decay_probability(t) -
                        (1.0 - 2.0 * excited_pop + ground.population(1, t))));
    }
  }

  const QubitEntropies at0 = qubit_model_entropies(0.0), at1 = qubit_model_entropies(1.0);
  endpoints.add(std::abs(at0.s_a - kLn2));
  endpoints.add(std::abs(at0.s_b));
  endpoints.add(std::abs(at1.s_a));
  endpoints.add(std::abs(at1.s_b - kLn2));
  endpoints.add(std::abs(qubit_model_mutual_information(0.0)));
  endpoints.add(std::abs(qubit_model_mutual_information(1.0) - 2.0 * kLn2));

  const bool pass = unitarity.worst <= 1e-10 && reconstruction.worst <= 1e-10 &&
                    identity.worst <= 1e-8 && drift.worst <= 1e-10 && dual.worst <= 1e-10 &&
                    haar.worst <= 1e-12 && endpoints.worst <= 1e-12;
  return {pass, "unitarity " + num(unitarity.worst) + ", reconstruction " +
                    num(reconstruction.worst) + ", I(A,Abar)+I(B,Abar) " + num(identity.worst) +
                    ", S(Abar) drift " + num(drift.worst) + ", dual P " + num(dual.worst) +
                    ", Haar " + num(haar.worst) + ", qubit endpoints " + num(endpoints.worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Verdict criterion8() {
  auto csv = [](std::uint64_t seed) {
    const ModelInstance m = reference_instance(kReferenceC, seed);
    std::ostringstream out;
    write_series_csv(out, run_full_series(m, default_grid(m)));
    return out.str();
  };
  const bool library = csv(kSeed) == csv(kSeed) && csv(kSeed + 1) == csv(kSeed + 1);

  // Same check end to end through the command line.
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "qxfer_acceptance";
  fs::remove_all(root);
  std::ostringstream sink;
  std::string files[2];
  int codes[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / std::to_string(run);
    codes[run] = run_cli({"decay", "--paper", "--seed", "7", "--no-plot", "--out", dir.string()},
                         sink, sink);
    files[run] = slurp(dir / "decay_series.csv");
  }
  fs::remove_all(root);
  const bool cli = codes[0] == 0 && codes[1] == 0 && !files[0].empty() && files[0] == files[1];
  return {library && cli, std::string("library runs ") + (library ? "identical" : "differ") +
                              ", CLI runs " + (cli ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"decay agreement, exact vs first order", criterion1},
      {"mutual information vs qubit model", criterion2},
      {"T0.8 linear in 1/c^2", criterion3},
      {"rate constant K across the sweep", criterion4},
      {"pathway additivity", criterion5},
      {"first-order amplitude vs quadrature", criterion6},
      {"invariants", criterion7},
      {"determinism", criterion8},
  };
  int failed = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    Verdict v;
    try {
      v = criteria[n].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %zu [%s]: %s  %s\n", n + 1, criteria[n].first.c_str(),
                v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
