#include "afree/runspec.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "afree/dynamics.hpp"
#include "afree/field_io.hpp"
#include "afree/kernels.hpp"
#include "afree/norms.hpp"
#include "afree/projection.hpp"
#include "afree/report.hpp"
#include "afree/rng.hpp"
#include "afree/statics.hpp"
#include "afree/symbol.hpp"
#include "afree/version.hpp"

namespace afree {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!j.is_object()) throw SpecError(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw SpecError(ctx + ": unknown key '" + it.key() + "'");
}

Grid parse_grid(const json& j) {
  check_keys(j, {"d", "n"}, "grid");
  const int d = j.at("d").get<int>();
  const int n = j.at("n").get<int>();
  if (n % 2 == 0) throw SpecError("grid: n must be odd");
  return Grid(d, n);
}

DiffOp parse_operator(const json& j) {
  if (j.contains("tag")) {
    check_keys(j, {"tag", "params"}, "operator");
    if (j.contains("params")) {
      for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
        if (it.key() != "m" && it.key() != "d")
          throw SpecError("operator.params: unknown key '" + it.key() + "'");
    }
  } else {
    check_keys(j, {"d", "N", "M", "k", "coeffs", "name"}, "operator");
  }
  try {
    return operator_from_json(j.dump());
  } catch (const std::exception& e) {
    throw SpecError(std::string("operator: ") + e.what());
  }
}

EnergyDensity parse_density(const json& j) {
  check_keys(j, {"entry", "matrix", "gamma", "N", "coeffs", "name"}, "density");
  try {
    return density_from_json(j.dump());
  } catch (const std::exception& e) {
    throw SpecError(std::string("density: ") + e.what());
  }
}

ConservationSystem parse_system(const json& j) {
  check_keys(j, {"tag", "a", "b", "lambda", "mu", "density"}, "system");
  try {
    return system_from_json(j.dump());
  } catch (const std::exception& e) {
    throw SpecError(std::string("system: ") + e.what());
  }
}

Eigen::VectorXd parse_vector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw SpecError(ctx + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

/// Random band-limited zero-mean real field (no PDE constraint).
PeriodicField random_band_field(const Grid& grid, int fiber, int band,
                                unsigned long long seed, double amplitude) {
  SpectralField hat(grid, fiber);
  Rng rng(seed);
  std::vector<int> freq(static_cast<std::size_t>(grid.dim), -band);
  while (true) {
    int first_nonzero = 0;
    for (int a = 0; a < grid.dim; ++a)
      if (freq[static_cast<std::size_t>(a)] != 0) {
        first_nonzero = freq[static_cast<std::size_t>(a)];
        break;
      }
    if (first_nonzero > 0) {
      Eigen::VectorXcd g(fiber);
      for (int c = 0; c < fiber; ++c) g(c) = {rng.gaussian(), rng.gaussian()};
      const long long flat = mode_index(grid, freq.data());
      Eigen::Map<Eigen::VectorXcd>(hat.at(flat), fiber) = g;
      std::vector<int> nf(freq);
      for (auto& v : nf) v = -v;
      Eigen::Map<Eigen::VectorXcd>(hat.at(mode_index(grid, nf.data())), fiber) = g.conjugate();
    }
    int a = grid.dim - 1;
    while (a >= 0 && freq[static_cast<std::size_t>(a)] == band) {
      freq[static_cast<std::size_t>(a)] = -band;
      --a;
    }
    if (a < 0) break;
    ++freq[static_cast<std::size_t>(a)];
  }
  const double nrm = l2_norm(hat);
  if (nrm > 0.0)
    for (auto& c : hat.coeffs) c *= amplitude / nrm;
  return inverse_transform(hat);
}

/// Initial state for a conservation system: unconstrained components are
/// random band-limited; the involution block is projected mode-wise.
PeriodicField make_system_initial(const ConservationSystem& sys, const Grid& grid, int band,
                                  double amplitude, unsigned long long seed) {
  PeriodicField full = random_band_field(grid, sys.state_dim, band, seed, amplitude);
  if (!sys.involution) return full;
  // Project the constrained block A-free, leave the rest.
  PeriodicField block(grid, static_cast<int>(sys.constraint_components.size()));
  kernels::parallel_for(static_cast<std::size_t>(grid.points()), [&](std::size_t q) {
    for (std::size_t c = 0; c < sys.constraint_components.size(); ++c)
      block.at(static_cast<long long>(q))[c] =
          full.at(static_cast<long long>(q))[sys.constraint_components[c]];
  });
  const PeriodicField proj = project_afree(*sys.involution, block);
  kernels::parallel_for(static_cast<std::size_t>(grid.points()), [&](std::size_t q) {
    for (std::size_t c = 0; c < sys.constraint_components.size(); ++c)
      full.at(static_cast<long long>(q))[sys.constraint_components[c]] =
          proj.at(static_cast<long long>(q))[c];
  });
  return zero_mean(full);
}

struct Artifacts {
  fs::path dir;
  json report;
  std::vector<std::string> summary;

  explicit Artifacts(const RunSpec& spec) : dir(spec.out_dir) {
    fs::create_directories(dir);
    report["command"] = spec.command;
    report["version"] = kVersion;
    report["spec_hash"] = fnv1a_hex(spec.canonical_text);
    report["seed"] = spec.seed;
  }

  void finish(const std::string& status) {
    report["status"] = status;
    std::ofstream out(dir / "report.json");
    out << report.dump(2) << "\n";
    std::ofstream sum(dir / "summary.txt");
    sum << "status: " << status << "\n";
    for (const auto& line : summary) sum << line << "\n";
  }
};

int run_symbol(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp op = parse_operator(doc.at("operator"));
  const int n_samples = doc.value("n_samples", 2000);
  const RankReport rank = constant_rank_check(op, n_samples, kRankTol,
                                              static_cast<unsigned>(spec.seed));
  Artifacts art(spec);
  art.report["rank_report"] = to_json(rank);

  std::vector<RealVector> xis;
  if (doc.contains("xis")) {
    for (const auto& x : doc["xis"]) xis.push_back(parse_vector(x, "xis"));
  } else {
    for (int a = 0; a < op.dim; ++a) {
      RealVector e = RealVector::Zero(op.dim);
      e(a) = 1.0;
      xis.push_back(e);
    }
  }
  json samples = json::array();
  CsvWriter csv((art.dir / "rows.csv").string());
  std::vector<std::string> head;
  for (int a = 0; a < op.dim; ++a) head.push_back("xi_" + std::to_string(a));
  head.insert(head.end(), {"rank", "sigma_max", "sigma_min_kept"});
  csv.header(head);
  for (const auto& xi : xis) {
    const SymbolSample s = symbol(op, xi);
    samples.push_back(to_json(s));
    std::vector<double> row;
    for (int a = 0; a < op.dim; ++a) row.push_back(s.xi(a));
    row.push_back(s.rank);
    row.push_back(s.singular_values.empty() ? 0.0 : s.singular_values.front());
    row.push_back(s.rank > 0 ? s.singular_values[static_cast<std::size_t>(s.rank - 1)] : 0.0);
    csv.row(row);
  }
  art.report["samples"] = samples;

  // Optional potential compatibility when the operator registers a partner.
  if (auto opB = partner_potential(op)) {
    const CompatReport comp = potential_compat_check(op, *opB, n_samples, kRankTol,
                                                     static_cast<unsigned>(spec.seed));
    art.report["potential_compat"] = to_json(comp);
    art.summary.push_back("potential partner: " + opB->name +
                          (comp.compatible ? " (compatible)" : " (INCOMPATIBLE)"));
    if (!comp.compatible) {
      art.finish("violation");
      return 2;
    }
  }
  art.summary.push_back("constant rank: " + std::string(rank.is_constant_rank ? "yes" : "NO"));
  art.summary.push_back("rank range: [" + std::to_string(rank.min_rank) + ", " +
                        std::to_string(rank.max_rank) + "]");
  art.finish(rank.is_constant_rank ? "pass" : "violation");
  return rank.is_constant_rank ? 0 : 2;
}

int run_wavecone(const RunSpec& spec) {
  const DiffOp op = parse_operator(spec.doc.at("operator"));
  const int n_dirs = spec.doc.value("n_dirs", 64);
  const auto dirs = sample_directions(op.dim, n_dirs, static_cast<unsigned>(spec.seed));
  const auto cone = wave_cone_sample(op, dirs);
  Artifacts art(spec);
  CsvWriter csv((art.dir / "rows.csv").string());
  std::vector<std::string> head;
  for (int a = 0; a < op.dim; ++a) head.push_back("xi_" + std::to_string(a));
  head.push_back("kernel_dim");
  csv.header(head);
  json entries = json::array();
  for (const auto& [xi, basis] : cone) {
    std::vector<double> row;
    for (int a = 0; a < op.dim; ++a) row.push_back(xi(a));
    row.push_back(static_cast<double>(basis.cols()));
    csv.row(row);
    json e;
    e["xi"] = json::array();
    for (int a = 0; a < op.dim; ++a) e["xi"].push_back(xi(a));
    e["kernel_dim"] = basis.cols();
    json b = json::array();
    for (int c = 0; c < basis.cols(); ++c) {
      json col = json::array();
      for (int r = 0; r < basis.rows(); ++r) col.push_back(basis(r, c));
      b.push_back(col);
    }
    e["kernel_basis"] = b;
    entries.push_back(e);
  }
  art.report["wave_cone"] = entries;
  art.summary.push_back("directions sampled: " + std::to_string(cone.size()));
  art.finish("pass");
  return 0;
}

int run_project(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp op = parse_operator(doc.at("operator"));
  const Grid grid = parse_grid(doc.at("grid"));
  const int n_fields = doc.value("n_fields", 20);
  const int band = doc.value("band", 4);
  Artifacts art(spec);
  CsvWriter csv((art.dir / "rows.csv").string());
  csv.header({"field_id", "v_norm", "afree_residual", "idempotence_residual", "fmdec_ratio"});
  double fitted_c = 0.0;
  double worst_afree = 0.0, worst_idem = 0.0;
  for (int i = 0; i < n_fields; ++i) {
    const PeriodicField v =
        zero_mean(random_band_field(grid, op.fiber_in, band, spec.seed + static_cast<unsigned>(i), 1.0));
    const PeriodicField Pv = project_afree(op, v);
    const double nv = l2_norm(v);
    const double afree_res = l2_norm(apply_operator(op, Pv)) / std::max(nv, 1e-300);
    const PeriodicField PPv = project_afree(op, Pv);
    double idem = 0.0;
    for (std::size_t k = 0; k < Pv.samples.size(); ++k)
      idem = std::max(idem, std::abs(PPv.samples[k] - Pv.samples[k]));
    PeriodicField diff = v;
    for (std::size_t k = 0; k < diff.samples.size(); ++k) diff.samples[k] -= Pv.samples[k];
    const double num = l2_norm(diff);
    const double den = sobolev_norm(apply_operator(op, v), -op.order, 2.0);
    const double ratio = den > 0.0 ? num / den : 0.0;
    fitted_c = std::max(fitted_c, ratio);
    worst_afree = std::max(worst_afree, afree_res);
    worst_idem = std::max(worst_idem, idem);
    csv.row({static_cast<double>(i), nv, afree_res, idem, ratio});
  }
  art.report["fitted_C"] = fitted_c;
  art.report["worst_afree_residual"] = worst_afree;
  art.report["worst_idempotence_residual"] = worst_idem;
  art.summary.push_back("fitted C (FM inequality): " + format_double(fitted_c));
  const bool ok = worst_afree <= 1e-9 && worst_idem <= 1e-9;
  art.finish(ok ? "pass" : "violation");
  return ok ? 0 : 2;
}

int run_primitive(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp opA = parse_operator(doc.at("operator"));
  const Grid grid = parse_grid(doc.at("grid"));
  const int n_fields = doc.value("n_fields", 20);
  const int band = doc.value("band", 4);
  const double p = doc.value("p", 2.0);
  const auto opB = partner_potential(opA);
  if (!opB) throw SpecError("primitive: operator has no registered potential partner");
  Artifacts art(spec);
  CsvWriter csv((art.dir / "rows.csv").string());
  csv.header({"field_id", "roundtrip_rel", "c_ii", "c_iii", "c_iv"});
  double worst = 0.0;
  for (int i = 0; i < n_fields; ++i) {
    const PeriodicField psi =
        random_afree_field(opA, grid, band, spec.seed + static_cast<unsigned>(i), 1.0);
    const PrimitivePair pair = primitive(*opB, psi);
    const PeriodicField back = apply_operator(*opB, pair.phi);
    double err2 = 0.0;
    for (std::size_t k = 0; k < back.samples.size(); ++k) {
      const double r = back.samples[k] - psi.samples[k];
      err2 += r * r;
    }
    const double rel = std::sqrt(err2 / static_cast<double>(grid.points())) /
                       std::max(l2_norm(psi), 1e-300);
    worst = std::max(worst, rel);
    const PrimitiveBoundsReport b = primitive_bounds_report(pair, p);
    csv.row({static_cast<double>(i), rel, b.c_ii, b.c_iii, b.c_iv});
  }
  art.report["worst_roundtrip_rel"] = worst;
  art.summary.push_back("worst round-trip relative error: " + format_double(worst));
  const bool ok = worst <= 1e-9;
  art.finish(ok ? "pass" : "violation");
  return ok ? 0 : 2;
}

int run_decompose(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp opA = parse_operator(doc.at("operator"));
  const Grid grid = parse_grid(doc.at("grid"));
  const int n_fields = doc.value("n_fields", 8);
  const int band = doc.value("band", 4);
  const double p = doc.value("p", 2.0);
  const std::string family = doc.value("family", "oscillation");
  const auto opB = partner_potential(opA);
  if (!opB) throw SpecError("decompose: operator has no registered potential partner");

  std::vector<PeriodicField> fields;
  std::vector<double> ks;
  for (int j = 1; j <= n_fields; ++j) {
    if (family == "oscillation") {
      fields.push_back(
          random_afree_field(opA, grid, std::min(band * j, grid.half_band()),
                             spec.seed + static_cast<unsigned>(j), 1.0));
      ks.push_back(64.0 + j);
    } else if (family == "spike") {
      // Concentrating bump: amplitude grows, support shrinks with j.
      PeriodicField bump(grid, opA.fiber_in);
      const double scale = 1.0 / static_cast<double>(j);
      const long long pts = grid.points();
      std::vector<int> idx(static_cast<std::size_t>(grid.dim));
      for (long long q = 0; q < pts; ++q) {
        grid.decode(q, idx.data());
        double r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
          double x = static_cast<double>(idx[static_cast<std::size_t>(a)]) / grid.n - 0.5;
          r2 += x * x;
        }
        const double amp = std::pow(static_cast<double>(j), grid.dim / 2.0) *
                           std::exp(-r2 / (2.0 * scale * scale));
        for (int c = 0; c < opA.fiber_in; ++c)
          bump.at(q)[c] = amp * (c + 1.0) / opA.fiber_in;
      }
      fields.push_back(project_afree(opA, zero_mean(bump)));
      ks.push_back(std::sqrt(static_cast<double>(j)) *
                   std::pow(static_cast<double>(j), grid.dim / 2.0));
    } else {
      throw SpecError("decompose: unknown family '" + family + "'");
    }
  }
  const DecompositionResult res = decompose_sequence(opA, *opB, fields, ks, p);
  Artifacts art(spec);
  art.report["diagnostics"] = to_json(res.diagnostics);
  CsvWriter csv((art.dir / "rows.csv").string());
  std::vector<std::string> head{"j"};
  for (double T : res.diagnostics.thresholds_T) head.push_back("tail_mass@" + format_double(T));
  for (double d : res.diagnostics.thresholds_delta)
    head.push_back("measure_above@" + format_double(d));
  head.push_back("additivity_residual");
  csv.header(head);
  double worst_add = 0.0;
  for (std::size_t j = 0; j < fields.size(); ++j) {
    std::vector<double> row{static_cast<double>(j)};
    for (double v : res.diagnostics.tail_mass[j]) row.push_back(v);
    for (double v : res.diagnostics.measure_above[j]) row.push_back(v);
    row.push_back(res.diagnostics.additivity_residual[j]);
    worst_add = std::max(worst_add, res.diagnostics.additivity_residual[j]);
    csv.row(row);
  }
  art.summary.push_back("worst additivity residual: " + format_double(worst_add));
  const bool ok = worst_add <= 1e-9;
  art.finish(ok ? "pass" : "violation");
  return ok ? 0 : 2;
}

int run_garding(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp opA = parse_operator(doc.at("operator"));
  const Grid grid = parse_grid(doc.at("grid"));
  const EnergyDensity W = parse_density(doc.at("density"));
  const double p = doc.value("p", W.p);
  const int n_fields = doc.value("n_fields", 50);
  const int band = doc.value("band", 4);

  PeriodicField Ubar(grid, W.fiber);
  if (doc.contains("ubar")) {
    const json& u = doc.at("ubar");
    check_keys(u, {"kind", "value", "band", "amplitude"}, "ubar");
    const std::string kind = u.at("kind").get<std::string>();
    if (kind == "constant") {
      const Eigen::VectorXd val = parse_vector(u.at("value"), "ubar.value");
      if (val.size() != W.fiber) throw SpecError("ubar.value: wrong fiber");
      kernels::parallel_for(static_cast<std::size_t>(grid.points()), [&](std::size_t q) {
        for (int c = 0; c < W.fiber; ++c) Ubar.at(static_cast<long long>(q))[c] = val(c);
      });
    } else if (kind == "smooth") {
      Ubar = random_band_field(grid, W.fiber, u.value("band", 1), spec.seed + 999,
                               u.value("amplitude", 0.5));
    } else {
      throw SpecError("ubar.kind: must be constant or smooth");
    }
  }

  std::vector<PeriodicField> fields;
  for (int i = 0; i < n_fields; ++i) {
    // Amplitude sweep: geometric from small to O(1).
    const double amp = 1e-3 * std::pow(1e3, static_cast<double>(i) / std::max(1, n_fields - 1));
    fields.push_back(
        random_afree_field(opA, grid, band, spec.seed + static_cast<unsigned>(i), amp));
  }
  const GardingReport rep = garding_verify(W, Ubar, opA, fields, p);
  Artifacts art(spec);
  art.report["garding"] = to_json(rep);
  CsvWriter csv((art.dir / "rows.csv").string());
  csv.header({"field_id", "lhs", "excess", "penalty", "wneg_p"});
  for (const auto& row : rep.rows)
    csv.row({static_cast<double>(row.field_id), row.lhs, row.excess, row.penalty, row.wneg_p});
  art.summary.push_back("C0_fit: " + format_double(rep.C0_fit));
  art.summary.push_back("C1_fit: " + format_double(rep.C1_fit));
  art.summary.push_back("epsilon0_estimate: " + format_double(rep.epsilon0_estimate));
  art.finish(rep.excess_route_ok ? "pass" : "violation");
  return rep.excess_route_ok ? 0 : 2;
}

int run_aqc(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp opA = parse_operator(doc.at("operator"));
  const EnergyDensity W = parse_density(doc.at("density"));
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(W.fiber);
  if (doc.contains("lambda")) lambda = parse_vector(doc.at("lambda"), "lambda");
  AqcBudget budget;
  budget.seed = spec.seed;
  if (doc.contains("budget")) {
    const json& b = doc.at("budget");
    check_keys(b, {"n_random", "n_descent_steps", "band", "c0_probe", "grid_n"}, "budget");
    budget.n_random = b.value("n_random", budget.n_random);
    budget.n_descent_steps = b.value("n_descent_steps", budget.n_descent_steps);
    budget.band = b.value("band", budget.band);
    budget.c0_probe = b.value("c0_probe", budget.c0_probe);
    budget.grid_n = b.value("grid_n", budget.grid_n);
  }
  const AqcReport rep = aqc_test(W, lambda, opA, budget);
  Artifacts art(spec);
  art.report["aqc"] = to_json(rep);
  CsvWriter csv((art.dir / "rows.csv").string());
  csv.header({"min_gap", "violation"});
  csv.row({rep.min_gap, rep.violation ? 1.0 : 0.0});
  art.summary.push_back("min_gap: " + format_double(rep.min_gap));
  if (rep.certificate_field) {
    write_field((art.dir / "certificate.field").string(), *rep.certificate_field);
    art.summary.push_back("certificate field written to certificate.field");
  }
  art.finish(rep.violation ? "violation" : "pass");
  return rep.violation ? 2 : 0;
}

int run_dynamics(const RunSpec& spec) {
  const json& doc = spec.doc;
  const ConservationSystem sys = parse_system(doc.at("system"));
  const json& sc = doc.at("scenario");
  check_keys(sc, {"kind", "mode", "dt", "T", "n", "viscosity", "viscosity_weak", "band",
                  "amplitude", "perturb_amplitude", "record_stride", "snapshots"},
             "scenario");
  const std::string kind = sc.at("kind").get<std::string>();
  const double dt = sc.value("dt", 1e-3);
  const double T = sc.value("T", 1.0);
  Artifacts art(spec);

  if (kind == "wave_exact") {
    if (sys.name != "psystem1d") throw SpecError("wave_exact: requires the psystem1d system");
    const int n = sc.value("n", 65);
    const int mode = sc.value("mode", 1);
    const Grid grid(1, n);
    PeriodicField U0(grid, 2);
    for (long long q = 0; q < grid.points(); ++q) {
      const double x = static_cast<double>(q) / n;
      U0.at(q)[0] = 0.0;
      U0.at(q)[1] = std::cos(2.0 * std::numbers::pi * mode * x);
    }
    const Trajectory traj = evolve(sys, U0, dt, T, sc.value("viscosity", 0.0),
                                   sc.value("record_stride", 100));
    double max_err = 0.0;
    CsvWriter csv((art.dir / "rows.csv").string());
    csv.header({"t", "max_error"});
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double t = traj.times[i];
      double err = 0.0;
      for (long long q = 0; q < grid.points(); ++q) {
        const double x = static_cast<double>(q) / n;
        const double th = 2.0 * std::numbers::pi * mode;
        const double ue = std::cos(th * x) * std::cos(th * t);
        const double ve = -std::sin(th * x) * std::sin(th * t);
        err = std::max(err, std::abs(traj.states[i].at(q)[1] - ue));
        err = std::max(err, std::abs(traj.states[i].at(q)[0] - ve));
      }
      max_err = std::max(max_err, err);
      csv.row({t, err});
    }
    art.report["max_error"] = max_err;
    art.summary.push_back("max error vs exact wave: " + format_double(max_err));
    const bool ok = max_err <= 1e-6 && !traj.blown_up;
    art.finish(ok ? "pass" : "violation");
    return ok ? 0 : 2;
  }

  const int n = sc.value("n", 33);
  const Grid grid(sys.dim, n);
  const int band = sc.value("band", 2);
  const double amp = sc.value("amplitude", 0.2);

  if (kind == "involution") {
    const PeriodicField U0 = make_system_initial(sys, grid, band, amp, spec.seed);
    const Trajectory traj =
        evolve(sys, U0, dt, T, sc.value("viscosity", 0.0), sc.value("record_stride", 50));
    double max_drift = 0.0;
    for (double v : traj.involution_drift) max_drift = std::max(max_drift, v);
    CsvWriter csv((art.dir / "rows.csv").string());
    csv.header({"t", "drift"});
    for (std::size_t i = 0; i < traj.step_times.size(); ++i)
      csv.row({traj.step_times[i], traj.involution_drift[i]});
    art.report["max_involution_drift"] = max_drift;
    art.report["max_mean_drift"] = traj.max_mean_drift;
    art.summary.push_back("max involution drift: " + format_double(max_drift));
    if (sc.value("snapshots", false))
      write_field((art.dir / "final.field").string(), traj.states.back());
    const bool ok = max_drift <= 1e-8 && !traj.blown_up;
    art.finish(ok ? "pass" : "violation");
    return ok ? 0 : 2;
  }

  if (kind == "monitor") {
    const PeriodicField Ubar0 = make_system_initial(sys, grid, band, amp, spec.seed);
    PeriodicField U0 = Ubar0;
    const double pamp = sc.value("perturb_amplitude", 0.0);
    if (pamp > 0.0) {
      const PeriodicField pert = make_system_initial(sys, grid, band, pamp, spec.seed + 1000);
      for (std::size_t i = 0; i < U0.samples.size(); ++i) U0.samples[i] += pert.samples[i];
    }
    const StabilityReport rep = weak_strong_monitor(sys, U0, Ubar0, dt, T,
                                                    sc.value("viscosity_weak", 0.0),
                                                    sc.value("record_stride", 50));
    art.report["stability"] = to_json(rep);
    CsvWriter csv((art.dir / "rows.csv").string());
    csv.header({"t", "relent", "vdist", "drift", "bound_value"});
    bool rows_ok = true;
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
      csv.row({rep.times[i], rep.relative_entropy[i], rep.v_distance[i],
               rep.involution_drift[i], rep.bound_value[i]});
      if (!rep.degenerate && rep.v_distance[i] > rep.bound_value[i] * (1.0 + 1e-9))
        rows_ok = false;
    }
    art.summary.push_back("C1: " + format_double(rep.C1) + "  C2: " + format_double(rep.C2));
    const bool ok = rows_ok && !rep.blown_up;
    art.finish(ok ? "pass" : "violation");
    return ok ? 0 : 2;
  }
  throw SpecError("scenario.kind: unknown kind '" + kind + "'");
}

int run_statics(const RunSpec& spec) {
  const json& doc = spec.doc;
  const DiffOp opA = parse_operator(doc.at("operator"));
  const Grid grid = parse_grid(doc.at("grid"));
  const EnergyDensity W = parse_density(doc.at("density"));
  PeriodicField Ubar(grid, W.fiber);
  if (doc.contains("ubar")) {
    const json& u = doc.at("ubar");
    check_keys(u, {"kind", "value", "band", "amplitude"}, "ubar");
    const std::string kind = u.at("kind").get<std::string>();
    if (kind == "constant") {
      const Eigen::VectorXd val = parse_vector(u.at("value"), "ubar.value");
      if (val.size() != W.fiber) throw SpecError("ubar.value: wrong fiber");
      kernels::parallel_for(static_cast<std::size_t>(grid.points()), [&](std::size_t q) {
        for (int c = 0; c < W.fiber; ++c) Ubar.at(static_cast<long long>(q))[c] = val(c);
      });
    } else if (kind == "afree") {
      Ubar = random_afree_field(opA, grid, u.value("band", 1), spec.seed + 999,
                                u.value("amplitude", 0.5));
    } else {
      throw SpecError("ubar.kind: must be constant or afree");
    }
  }
  const double eps0 = doc.value("epsilon0", 0.0);
  const int n_samples = doc.value("n_samples", 16);
  const MinimalityReport rep = minimality_check(W, Ubar, opA, eps0, n_samples, spec.seed,
                                                doc.value("band", 0));
  Artifacts art(spec);
  art.report["minimality"] = to_json(rep);
  CsvWriter csv((art.dir / "rows.csv").string());
  csv.header({"wneg_p", "energy_gap", "v_distance"});
  for (const auto& row : rep.rows) csv.row({row.wneg_p, row.energy_gap, row.v_distance});
  art.summary.push_back("el_residual: " + format_double(rep.el_residual));
  art.summary.push_back("second_variation_min: " + format_double(rep.second_variation_min));
  art.summary.push_back("C_fit: " + format_double(rep.C_fit));
  art.finish(rep.pass ? "pass" : "violation");
  return rep.pass ? 0 : 2;
}

const std::set<std::string> kCommands = {"symbol", "wavecone", "project", "primitive",
                                         "decompose", "garding", "aqc", "dynamics", "statics"};

const std::set<std::string> kCommonKeys = {"command", "out", "seed", "quiet", "tolerances"};

std::set<std::string> allowed_keys_for(const std::string& cmd) {
  std::set<std::string> keys = kCommonKeys;
  if (cmd == "symbol") keys.insert({"operator", "n_samples", "xis"});
  if (cmd == "wavecone") keys.insert({"operator", "n_dirs"});
  if (cmd == "project") keys.insert({"operator", "grid", "n_fields", "band"});
  if (cmd == "primitive") keys.insert({"operator", "grid", "n_fields", "band", "p"});
  if (cmd == "decompose") keys.insert({"operator", "grid", "n_fields", "band", "p", "family"});
  if (cmd == "garding") keys.insert({"operator", "grid", "density", "p", "n_fields", "band", "ubar"});
  if (cmd == "aqc") keys.insert({"operator", "density", "lambda", "budget"});
  if (cmd == "dynamics") keys.insert({"system", "scenario"});
  if (cmd == "statics")
    keys.insert({"operator", "grid", "density", "ubar", "epsilon0", "n_samples", "band"});
  return keys;
}

void apply_override(json& doc, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw SpecError("--set expects KEY=VALUE, got '" + kv + "'");
  const std::string path = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (key.empty()) throw SpecError("--set: empty key component in '" + path + "'");
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (...) {
        parsed = value; // bare string
      }
      (*node)[key] = parsed;
      break;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

} // namespace

RunSpec load_runspec(const std::string& json_text, const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw SpecError(std::string("run-spec: invalid JSON: ") + e.what());
  }
  for (const auto& kv : overrides) apply_override(doc, kv);
  if (!doc.is_object()) throw SpecError("run-spec: expected a JSON object");
  if (!doc.contains("command")) throw SpecError("run-spec: missing 'command'");
  const std::string cmd = doc.at("command").get<std::string>();
  if (!kCommands.count(cmd)) throw SpecError("run-spec: unknown command '" + cmd + "'");
  check_keys(doc, allowed_keys_for(cmd), "run-spec");
  if (doc.contains("tolerances")) check_keys(doc.at("tolerances"), {"rank_tol"}, "tolerances");

  RunSpec spec;
  spec.doc = doc;
  spec.command = cmd;
  spec.out_dir = doc.value("out", "out");
  spec.seed = doc.value("seed", 12345ull);
  spec.quiet = doc.value("quiet", false);
  spec.canonical_text = doc.dump();
  return spec;
}

int run(const RunSpec& spec) {
  if (spec.command == "symbol") return run_symbol(spec);
  if (spec.command == "wavecone") return run_wavecone(spec);
  if (spec.command == "project") return run_project(spec);
  if (spec.command == "primitive") return run_primitive(spec);
  if (spec.command == "decompose") return run_decompose(spec);
  if (spec.command == "garding") return run_garding(spec);
  if (spec.command == "aqc") return run_aqc(spec);
  if (spec.command == "dynamics") return run_dynamics(spec);
  if (spec.command == "statics") return run_statics(spec);
  throw SpecError("run: unknown command");
}

} // namespace afree
