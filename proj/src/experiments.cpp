#include "experiments.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qfes/circuits.hpp"
#include "qfes/koopman.hpp"
#include "qfes/lindblad.hpp"
#include "qfes/qstate.hpp"
#include "qfes/rkhs.hpp"
#include "qfes/sawtooth.hpp"
#include "qfes/threewave.hpp"

namespace qfes::cli {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Output plumbing

// CSV with a one-line header; floating point at 17 significant digits for
// bit-stable round trips.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file " + path.string());
    out_ << header << '\n';
  }

  void field(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    sep();
    out_ << buf;
  }
  void field(long v) {
    sep();
    out_ << v;
  }
  void field(std::uint64_t v) {
    sep();
    out_ << v;
  }
  void field(const std::string& v) {
    sep();
    out_ << v;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

int thread_budget() {
  if (const char* env = std::getenv("QFES_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Deterministic chunked parallel loop: the work split is fixed by the chunk
// size, never by the thread count.
void parallel_for(Index count, const std::function<void(Index, Index)>& body) {
  const int threads = thread_budget();
  if (threads <= 1 || count < 1024) {
    body(0, count);
    return;
  }
  const Index chunk = (count + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (Index start = 0; start < count; start += chunk) {
    const Index stop = std::min(count, start + chunk);
    pool.emplace_back([&body, start, stop] { body(start, stop); });
  }
  for (auto& t : pool) t.join();
}

struct Outputs {
  fs::path dir;
  std::map<std::string, std::string> checksums;

  fs::path file(const std::string& name) const { return dir / name; }
  void seal(const std::string& name) { checksums[name] = file_checksum((dir / name).string()); }
};

// ---------------------------------------------------------------------------
// Experiment runners

void run_ghz(const RunConfig& cfg, Outputs& out) {
  const int n = static_cast<int>(cfg.get_int("qubits"));
  Circuit<> c;
  c.n_qubits = n;
  c.push(Gate<>::h(0));
  for (int q = 1; q < n; ++q) c.push(Gate<>::cnot(0, q));
  auto state = run_circuit(StateVector<>::zero_state(n), c);
  auto counts = measure_samples(state, static_cast<std::uint64_t>(cfg.get_int("shots")), cfg.seed);

  CsvWriter csv(out.file("counts.csv"), "bitstring,count");
  for (const auto& [index, count] : counts) {
    csv.field(bitstring_label(index, n));
    csv.field(count);
    csv.end_row();
  }
}

void run_qft_check(const RunConfig& cfg, Outputs& out) {
  const int n_max = static_cast<int>(cfg.get_int("n_max"));
  CsvWriter csv(out.file("qft_check.csv"), "n,max_error,gate_count,expected_gate_count");
  for (int n = 1; n <= n_max; ++n) {
    auto circuit = qft_circuit<double>(n);
    const Index dim = Index(1) << n;
    ComplexMatrix<> dft(dim, dim);
    for (Index k = 0; k < dim; ++k)
      for (Index j = 0; j < dim; ++j)
        dft(k, j) = std::polar(1.0 / std::sqrt(static_cast<double>(dim)),
                               2.0 * kPi * static_cast<double>(j * k) / static_cast<double>(dim));
    const double err = (circuit_matrix(circuit) - dft).cwiseAbs().maxCoeff();
    csv.field(static_cast<long>(n));
    csv.field(err);
    csv.field(static_cast<long>(circuit.size()));
    csv.field(static_cast<long>(n * (n + 1) / 2 + n / 2));
    csv.end_row();
  }
}

void run_qpe(const RunConfig& cfg, Outputs& out) {
  const double phase = cfg.get_real("phase");
  const int m = static_cast<int>(cfg.get_int("m"));
  ComplexMatrix<> u(2, 2);
  u << Complex<double>(1, 0), Complex<double>(0, 0), Complex<double>(0, 0), std::polar(1.0, phase);
  auto r = phase_estimation(u, StateVector<>::basis_state(1, 1), m);

  CsvWriter csv(out.file("distribution.csv"), "readout,alpha,probability");
  const Index big_m = Index(1) << m;
  for (Index y = 0; y < big_m; ++y) {
    csv.field(static_cast<long>(y));
    csv.field(2.0 * kPi * static_cast<double>(y) / static_cast<double>(big_m));
    csv.field(r.ancilla_probs[y]);
    csv.end_row();
  }
  CsvWriter summary(out.file("estimate.csv"), "alpha_estimate,mode,true_phase,abs_error");
  double err = std::abs(r.alpha - phase);
  err = std::min(err, 2 * kPi - err);
  summary.field(r.alpha);
  summary.field(static_cast<long>(r.mode));
  summary.field(phase);
  summary.field(err);
  summary.end_row();
}

void run_qae(const RunConfig& cfg, Outputs& out) {
  const int n = static_cast<int>(cfg.get_int("qubits"));
  const int m = static_cast<int>(cfg.get_int("m"));
  const Index dim = Index(1) << n;
  std::vector<Index> marked;
  std::stringstream ss(cfg.get_text("marked"));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) marked.push_back(std::stol(tok));
  }
  auto walk = GroverWalk<>::walsh_hadamard(n, marked);
  auto r = amplitude_estimate(walk, m);

  CsvWriter csv(out.file("distribution.csv"), "readout,probability");
  for (Index y = 0; y < r.qpe.ancilla_probs.size(); ++y) {
    csv.field(static_cast<long>(y));
    csv.field(r.qpe.ancilla_probs[y]);
    csv.end_row();
  }
  CsvWriter summary(out.file("estimate.csv"), "amplitude_estimate,true_fraction,abs_error,bound");
  const double truth = static_cast<double>(marked.size()) / static_cast<double>(dim);
  const double bound = kPi / std::pow(2.0, m) + kPi * kPi / std::pow(2.0, 2 * m);
  summary.field(r.estimate);
  summary.field(truth);
  summary.field(std::abs(r.estimate - truth));
  summary.field(bound);
  summary.end_row();
}

void run_gkls(const RunConfig& cfg, Outputs& out) {
  std::vector<CollapseTerm<>> terms;
  if (cfg.get_real("relax_rate") > 0) terms.push_back({sigma_minus<double>(), cfg.get_real("relax_rate")});
  if (cfg.get_real("dephase_rate") > 0)
    terms.push_back({dephasing_collapse<double>(), cfg.get_real("dephase_rate")});
  auto model = LindbladModel<>::make(ComplexMatrix<>::Zero(2, 2), std::move(terms));

  DensityMatrix<> rho;
  if (cfg.get_text("initial") == "plus_x") {
    ComplexVector<> v(2);
    v << Complex<double>(1, 0), Complex<double>(1, 0);
    rho = DensityMatrix<>::from_pure(StateVector<>::from_amplitudes(v));
  } else {
    rho = DensityMatrix<>::from_pure(StateVector<>::basis_state(1, 1));
  }

  const double t_final = cfg.get_real("t_final");
  const long samples = cfg.get_int("samples");
  const double dt_sample = t_final / static_cast<double>(samples);

  CsvWriter csv(out.file("trajectory.csv"), "t,rho00,rho01_re,rho01_im,rho11,trace,purity");
  auto emit = [&](double t, const DensityMatrix<>& r) {
    csv.field(t);
    csv.field(r.matrix()(0, 0).real());
    csv.field(r.matrix()(0, 1).real());
    csv.field(r.matrix()(0, 1).imag());
    csv.field(r.matrix()(1, 1).real());
    csv.field(r.trace());
    csv.field(r.purity());
    csv.end_row();
  };
  emit(0.0, rho);
  for (long s = 1; s <= samples; ++s) {
    rho = gkls_evolve(rho, model, dt_sample, 1e-3);
    emit(dt_sample * static_cast<double>(s), rho);
  }
}

void run_sawtooth(const RunConfig& cfg, Outputs& out) {
  auto prm = SawtoothParams::make(cfg.get_real("K"), static_cast<int>(cfg.get_int("qubits")),
                                  cfg.get_real("tau"));
  const long steps = cfg.get_int("steps");
  const std::string mode = cfg.get_text("mode");
  const double p0 = cfg.get_real("p_over_pi") * kPi / prm.tau;

  if (mode != "quantum") {
    auto ens = ClassicalEnsemble::line(cfg.get_int("ensemble"), p0, cfg.seed);
    // Cap the Poincare file near 200k rows by striding over steps.
    const long total = static_cast<long>(ens.size()) * steps;
    const long stride = std::max(1L, total / 200000L);
    CsvWriter csv(out.file("poincare.csv"), "q,p,step");
    for (long s = 1; s <= steps; ++s) {
      parallel_for(ens.size(), [&](Index i0, Index i1) { csm_step_range(ens, prm, i0, i1); });
      if (s % stride == 0) {
        for (Index i = 0; i < ens.size(); ++i) {
          csv.field(ens.q[i]);
          csv.field(ens.p[i]);
          csv.field(s);
          csv.end_row();
        }
      }
    }
    out.seal("poincare.csv");
  }

  if (mode != "classical") {
    const long m0 = std::lround(p0 / prm.hbar());
    auto psi = momentum_eigenstate(prm, m0);
    QuantumSawtoothMap map(prm);
    const long avg_window = std::min<long>(cfg.get_int("husimi_average"), steps);
    const Index nq = cfg.get_int("husimi_nq"), np = cfg.get_int("husimi_np");
    RealMatrix<double> accum = RealMatrix<double>::Zero(nq, np);
    HusimiField last;
    for (long s = 1; s <= steps; ++s) {
      map.step(psi);
      if (s > steps - avg_window) {
        last = husimi_q(psi, prm, nq, np);
        accum += last.value;
      }
    }
    accum /= static_cast<double>(avg_window);
    CsvWriter csv(out.file("husimi.csv"), "q,p,Q");
    for (Index a = 0; a < nq; ++a)
      for (Index b = 0; b < np; ++b) {
        csv.field(last.q_centers[a]);
        csv.field(last.p_centers[b]);
        csv.field(accum(a, b));
        csv.end_row();
      }
    out.seal("husimi.csv");
  }
}

void run_sawtooth_echo(const RunConfig& cfg, Outputs& out) {
  auto prm = SawtoothParams::make(cfg.get_real("K"), static_cast<int>(cfg.get_int("qubits")),
                                  cfg.get_real("tau"));
  const long steps = cfg.get_int("steps");
  const long m0 = static_cast<long>(3 * prm.dim / 8);  // p/(2 pi) = 3/8 of the lattice

  EchoResult echo;
  if (cfg.get_text("mode") == "jitter") {
    echo = loschmidt_echo(momentum_eigenstate(prm, m0), prm, cfg.get_real("epsilon"), steps, cfg.seed);
  } else {
    GateNoiseProfile<double> profile;
    profile.relax_rate = cfg.get_real("relax_rate");
    profile.dephase_rate = cfg.get_real("dephase_rate");
    echo = loschmidt_echo_lindblad(momentum_eigenstate(prm, m0), prm, profile, steps);
  }

  CsvWriter csv(out.file("echo.csv"), "t,fidelity");
  for (Index t = 0; t < echo.fidelity.size(); ++t) {
    csv.field(static_cast<long>(t));
    csv.field(echo.fidelity[t]);
    csv.end_row();
  }

  nlohmann::ordered_json fit;
  fit["preferred"] = echo.fit.preferred == DecayFit::Kind::exponential
                         ? "exponential"
                         : (echo.fit.preferred == DecayFit::Kind::algebraic ? "algebraic" : "perturbative");
  fit["rate"] = echo.fit.rate;
  fit["exponent"] = echo.fit.exponent;
  fit["r2_exponential"] = echo.fit.r2_exponential;
  fit["r2_algebraic"] = echo.fit.r2_algebraic;
  fit["points_used"] = echo.fit.points_used;
  std::ofstream fout(out.file("fit.json"));
  fout << fit.dump(2) << '\n';
  fout.close();
  out.seal("fit.json");
}

void run_threewave(const RunConfig& cfg, Outputs& out) {
  auto sub = ThreeWaveSubspace::make(cfg.get_int("s2"), cfg.get_int("s3"),
                                     {cfg.get_real("g_re"), cfg.get_real("g_im")});
  const double dt = cfg.get_real("dt");
  const long steps = cfg.get_int("steps");
  ComplexVector<double> psi0 = ComplexVector<double>::Zero(sub.dim());
  psi0[cfg.get_int("initial_j")] = 1.0;

  auto traj = propagate(build_subspace_hamiltonian(sub), psi0, dt, steps);
  auto occ = occupation_expectations(traj, sub);
  const double s2 = static_cast<double>(sub.s2), s3 = static_cast<double>(sub.s3);
  const double g2 = std::norm(sub.g);

  CsvWriter csv(out.file("series.csv"), "t,n1,n2,n3,s2_error,s3_error,moment_residual");
  for (Index t = 0; t < occ.n1.size(); ++t) {
    double residual = 0;
    if (t > 0 && t + 1 < occ.n1.size()) {
      const double dd = (occ.n1[t + 1] - 2 * occ.n1[t] + occ.n1[t - 1]) / (dt * dt);
      residual = std::abs(dd - 2 * g2 * (s2 * s3 - (2 * s2 + 2 * s3 + 1) * occ.n1[t] + 3 * occ.n1_sq[t]));
    }
    csv.field(dt * static_cast<double>(t));
    csv.field(occ.n1[t]);
    csv.field(occ.n2[t]);
    csv.field(occ.n3[t]);
    csv.field(std::abs(occ.n1[t] + occ.n2[t] - s2));
    csv.field(std::abs(occ.n1[t] + occ.n3[t] - s3));
    csv.field(residual);
    csv.end_row();
  }
}

void run_embed_kvn(const RunConfig& cfg, Outputs& out) {
  const double gamma = cfg.get_real("gamma");
  const double half = cfg.get_real("half_width");
  auto grid = PeriodicGrid::line(cfg.get_int("grid"), -half, half);
  auto field = VectorField::polynomial_1d({0.0, -gamma});
  const double z0 = cfg.get_real("z0"), sigma = cfg.get_real("sigma");

  RealVector<double> density(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double z = grid.point(i)[0];
    density[i] = std::exp(-(z - z0) * (z - z0) / (2 * sigma * sigma));
  }
  density /= density.sum() * grid.measure();
  ComplexVector<double> psi = density.cwiseSqrt().cast<Complex<double>>();
  psi.normalize();

  auto op = GridOperator::build(grid, field);
  const double dt = cfg.get_real("dt");
  const auto dir = cfg.get_text("direction") == "forward" ? Direction::forward : Direction::backward;
  KvnStepper stepper(op, dt, cfg.get_real("theta"), dir);
  if (stepper.cfl() > 1.0)
    std::fprintf(stderr, "[qfes] warning: KvN accuracy guard V_max dt/dz = %.3f exceeds 1\n", stepper.cfl());

  const long steps = cfg.get_int("steps");
  CsvWriter series(out.file("series.csv"), "t,mean_z,norm,participation_ratio");
  auto emit = [&](double t) {
    double num = 0, den = 0;
    for (Index i = 0; i < grid.size(); ++i) {
      const double w = std::norm(psi[i]);
      num += grid.point(i)[0] * w;
      den += w;
    }
    series.field(t);
    series.field(num / den);
    series.field(psi.norm());
    series.field(participation_ratio(psi));
    series.end_row();
  };
  emit(0.0);
  for (long s = 1; s <= steps; ++s) {
    psi = stepper.step(psi);
    if (s % std::max(1L, steps / 200) == 0 || s == steps) emit(dt * static_cast<double>(s));
  }
  out.seal("series.csv");

  CsvWriter snap(out.file("snapshot.csv"), "z,psi_re,psi_im,density");
  for (Index i = 0; i < grid.size(); ++i) {
    snap.field(grid.point(i)[0]);
    snap.field(psi[i].real());
    snap.field(psi[i].imag());
    snap.field(std::norm(psi[i]) / grid.measure());
    snap.end_row();
  }
  out.seal("snapshot.csv");
}

void run_embed_liouville(const RunConfig& cfg, Outputs& out) {
  const double gamma = cfg.get_real("gamma");
  const double half = cfg.get_real("half_width");
  auto grid = PeriodicGrid::line(cfg.get_int("grid"), -half, half);
  auto field = VectorField::polynomial_1d({0.0, -gamma});
  const double z0 = cfg.get_real("z0"), sigma = cfg.get_real("sigma");

  RealVector<double> pdf(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double z = grid.point(i)[0];
    pdf[i] = std::exp(-(z - z0) * (z - z0) / (2 * sigma * sigma));
  }
  pdf /= pdf.sum() * grid.measure();

  auto op = GridOperator::build(grid, field);
  const double dt = cfg.get_real("dt");
  const SparseReal gen = cfg.get_flag("upwind") ? upwind_pf_generator(grid, field) : op.perron_frobenius;
  ThetaStepper stepper(gen, dt, cfg.get_real("theta"), op.cfl(dt));

  const long steps = cfg.get_int("steps");
  CsvWriter series(out.file("series.csv"), "t,mean_z,mass");
  auto emit = [&](double t) {
    double num = 0, den = 0;
    for (Index i = 0; i < grid.size(); ++i) {
      num += grid.point(i)[0] * pdf[i];
      den += pdf[i];
    }
    series.field(t);
    series.field(num / den);
    series.field(den * grid.measure());
    series.end_row();
  };
  emit(0.0);
  for (long s = 1; s <= steps; ++s) {
    pdf = stepper.step(pdf);
    if (s % std::max(1L, steps / 200) == 0 || s == steps) emit(dt * static_cast<double>(s));
  }
  out.seal("series.csv");

  CsvWriter snap(out.file("snapshot.csv"), "z,pdf");
  for (Index i = 0; i < grid.size(); ++i) {
    snap.field(grid.point(i)[0]);
    snap.field(pdf[i]);
    snap.end_row();
  }
  out.seal("snapshot.csv");
}

void run_embed_carleman(const RunConfig& cfg, Outputs& out) {
  std::vector<double> coeffs;
  std::stringstream ss(cfg.get_text("coefficients"));
  std::string tok;
  while (std::getline(ss, tok, ',')) coeffs.push_back(std::stod(tok));
  if (coeffs.empty()) throw ConfigError("constraint violated: coefficients must be a non-empty list");
  auto field = VectorField::polynomial_1d(coeffs);

  const double z0 = cfg.get_real("z0"), dt = cfg.get_real("dt");
  const long steps = cfg.get_int("steps");
  const Index order = cfg.get_int("order");
  if (order + 1 < static_cast<Index>(coeffs.size()))
    throw ConfigError("constraint violated: order must reach the polynomial degree");

  CarlemanSystem sys = cfg.get_flag("rescale")
                           ? carleman_build_rescaled(field, order, z0, dt * static_cast<double>(steps), dt)
                           : carleman_build(field, order);
  auto carleman = carleman_propagate(sys, z0, dt, steps);
  RealVector<double> start(1);
  start[0] = z0;
  auto oracle = rk4_trajectory(field, start, dt, steps);

  CsvWriter csv(out.file("series.csv"), "t,z_carleman,z_oracle,abs_error,tail_magnitude");
  for (Index s = 0; s <= steps; ++s) {
    csv.field(dt * static_cast<double>(s));
    csv.field(carleman.z[s]);
    csv.field(oracle(s, 0));
    csv.field(std::abs(carleman.z[s] - oracle(s, 0)));
    csv.field(carleman.tail[s]);
    csv.end_row();
  }
}

void run_rkhs_table(const RunConfig& cfg, Outputs& out) {
  const Index order = cfg.get_int("max_order");
  const auto metric_conv = cfg.get_text("metric") == "raw-moment" ? MetricConvention::raw_moment
                                                                  : MetricConvention::factorial_normalized;
  const auto ladder_conv = cfg.get_text("ladder") == "derivative-raises"
                               ? LadderConvention::derivative_raises
                               : LadderConvention::multiplication_raises;
  std::vector<RkhsKind> kinds;
  const std::string which = cfg.get_text("space");
  if (which == "all" || which == "segal-bargmann") kinds.push_back(RkhsKind::segal_bargmann);
  if (which == "all" || which == "bergman") kinds.push_back(RkhsKind::bergman);
  if (which == "all" || which == "hardy") kinds.push_back(RkhsKind::hardy);

  CsvWriter csv(out.file("rkhs_table.csv"), "space,j,rho_jj,w_j_jm1,z_jm1_j");
  for (auto kind : kinds) {
    auto space = RkhsSpace::named(kind, metric_conv);
    auto metric = metric_moments(space, order);
    auto ladder = ladder_operators(space, order, ladder_conv);
    for (Index j = 0; j <= order; ++j) {
      csv.field(std::string(rkhs_kind_name(kind)));
      csv.field(static_cast<long>(j));
      csv.field(metric(j, j));
      csv.field(j > 0 ? ladder.raising(j, j - 1) : 0.0);
      csv.field(j > 0 ? ladder.lowering(j - 1, j) : 0.0);
      csv.end_row();
    }
  }
}

}  // namespace

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot checksum missing file " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, hash);
  return hex;
}

RunManifest execute(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Outputs out;
  out.dir = cfg.out_dir;
  fs::create_directories(out.dir);

  if (cfg.kind == "ghz")
    run_ghz(cfg, out);
  else if (cfg.kind == "qft-check")
    run_qft_check(cfg, out);
  else if (cfg.kind == "qpe")
    run_qpe(cfg, out);
  else if (cfg.kind == "qae")
    run_qae(cfg, out);
  else if (cfg.kind == "gkls")
    run_gkls(cfg, out);
  else if (cfg.kind == "sawtooth-run")
    run_sawtooth(cfg, out);
  else if (cfg.kind == "sawtooth-echo")
    run_sawtooth_echo(cfg, out);
  else if (cfg.kind == "threewave")
    run_threewave(cfg, out);
  else if (cfg.kind == "embed-kvn")
    run_embed_kvn(cfg, out);
  else if (cfg.kind == "embed-liouville")
    run_embed_liouville(cfg, out);
  else if (cfg.kind == "embed-carleman")
    run_embed_carleman(cfg, out);
  else if (cfg.kind == "rkhs-table")
    run_rkhs_table(cfg, out);
  else
    throw ConfigError("unknown experiment kind '" + cfg.kind + "'");

  // Seal any CSV the runner did not seal itself.
  for (const auto& entry : fs::directory_iterator(out.dir)) {
    const auto name = entry.path().filename().string();
    if (entry.path().extension() == ".csv" && !out.checksums.count(name)) out.seal(name);
  }

  RunManifest manifest;
  manifest.kind = cfg.kind;
  manifest.seed = cfg.seed;
  manifest.output_checksums = out.checksums;
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::ordered_json j;
  j["kind"] = cfg.kind;
  j["artifact_version"] = "1.0.0";
  j["seed"] = cfg.seed;
  nlohmann::ordered_json params;
  for (const auto& [k, v] : cfg.params) params[k] = v;
  j["config"] = params;
  j["notices"] = cfg.notices;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  nlohmann::ordered_json sums;
  for (const auto& [k, v] : manifest.output_checksums) sums[k] = v;
  j["outputs"] = sums;

  const fs::path mpath = out.dir / "manifest.json";
  std::ofstream mout(mpath);
  mout << j.dump(2) << '\n';
  manifest.manifest_path = mpath.string();
  return manifest;
}

}  // namespace qfes::cli
