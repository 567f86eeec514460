#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "qflat/qflat.hpp"

namespace {

using namespace qflat;

int g_status = 0;

void report(const std::string& what, double value, double tolerance) {
  const bool ok = value <= tolerance;
  std::printf("  [%s] %-44s %e (tol %.1e)\n", ok ? "ok" : "FAIL", what.c_str(), value, tolerance);
  if (!ok) g_status = 1;
}

void claim(const std::string& what, bool ok) {
  std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) g_status = 1;
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(out);
    if (!f) throw std::invalid_argument("cannot open output file: " + out);
    f << text;
    std::printf("wrote %s\n", out.c_str());
  }
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open input file: " + path);
  json j;
  f >> j;
  return j;
}

void print_moduli(const ModuliSolution& ms) {
  std::printf("n = %d, residual = %e\n", ms.n, residual_max(ms));
  for (std::size_t k = 0; k < ms.r.size(); ++k)
    std::printf("  r[%zu] = %.17g  theta[%zu] = %.17g\n", k, ms.r[k], k,
                k == 0 ? 0.0 : ms.theta[k - 1]);
}

void check_entry(const CatalogEntry& e) {
  std::printf("%s: n=%d, N=%d, profile=%s\n", e.name.c_str(), e.n, e.N, e.label.c_str());
  if (!e.note.empty()) std::printf("  %s\n", e.note.c_str());
  const EntryChecks c = verify_entry(e);
  report("factor is unitary", c.unitarity, tol::numeric);
  report("curve has unit norm", c.unit_norm, tol::identity);
  report("quadric form vanishes", c.quadric, tol::identity);
  report("quadric form vanishes (coefficient route)", c.quadric_via_w, tol::identity);
  report("coefficient bookkeeping is consistent", c.ledger, tol::identity);
  report("projector satisfies the harmonic equation", c.harmonic, tol::identity);
  report("metric density is constant 4", c.metric_flatness, tol::identity);
  report("first-order frame identities hold", c.first_order, tol::identity);
  report("frame fields stay orthogonal", c.orthogonality, tol::identity);
  const Eigen::MatrixXcd U2 = takagi_factor(e.W);
  report("symmetric factorization round trip",
         (U2.transpose() * U2 - e.W).cwiseAbs().maxCoeff(), 1e-9);
  const GaugeReport g = so_gauge(e.U, U2);
  report("gauge between factorizations is real", g.realness, 1e-9);
  report("gauge between factorizations is orthogonal", g.orthogonality, 1e-9);
}

void check_external(const std::string& w_path, const std::string& m_path) {
  const Eigen::MatrixXcd W = matrix_from_json(load_json(w_path));
  const ModuliSolution ms = moduli_from_json(load_json(m_path));
  if (W.rows() != W.cols() || W.rows() <= ms.n)
    throw std::invalid_argument("external W must be square with more rows than moduli phases");
  std::printf("external W (%lldx%lld) against n=%d moduli\n",
              static_cast<long long>(W.rows()), static_cast<long long>(W.cols()), ms.n);
  report("W is symmetric", (W - W.transpose()).cwiseAbs().maxCoeff(), tol::numeric);
  report("W is unitary",
         (W * W.adjoint() - Eigen::MatrixXcd::Identity(W.rows(), W.cols()))
             .cwiseAbs()
             .maxCoeff(),
         tol::numeric);
  report("quadric form vanishes", quadric_residual(W, ms), tol::identity);
  report("moduli constraints hold", residual_max(ms), tol::numeric);
}

void run_q2(int seeds) {
  const Q2Result q2 = classify_q2(seeds);
  std::printf("ambient dimension 4\n");
  for (const Branch& b : q2.branches)
    std::printf("  %-44s %s: %s\n", b.name.c_str(), b.feasible ? "FEASIBLE" : "excluded",
                b.reason.c_str());
  claim("exactly one feasible configuration, pairing " + q2.feasible_pairing,
        q2.unique);
  report("forced moduli residual", q2.moduli_residual, 1e-12);
  report("multi-seed solver scatter around forced moduli", q2.moduli_spread, 1e-8);
  report("witness residual battery", q2.witness_checks.worst(), tol::identity);
  report("witness matches catalog curve after real gauge", q2.witness_alignment, 1e-9);
  report("alignment gauge realness", q2.gauge_realness, 1e-9);
}

void run_q3(int starts) {
  const Q3Result q3 = classify_q3();
  std::printf("ambient dimension 5\n");
  for (const Branch& b : q3.branches)
    std::printf("  %-44s %s: %s\n", b.name.c_str(), b.feasible ? "FEASIBLE" : "excluded",
                b.reason.c_str());
  claim("no configuration survives", q3.empty);
  if (starts > 0) {
    const SearchResult sr = q3_search(starts);
    std::printf("numerical search: %d starts, best residual %e (n=%d)\n", sr.starts,
                sr.best, sr.best_n);
    claim("search confirms emptiness (best residual >= 1e-6)", sr.best >= 1e-6);
  }
}

void run_q4() {
  const Q4Report q4 = q4_report();
  std::printf("ambient dimension 6: %zu column matchings, %zu families\n",
              q4.matchings_total, q4.families.size());
  for (const Q4Family& f : q4.families) {
    std::printf("  %-15s n=%d %-10s psi=%+.6f%+.6fi  matching %s\n", f.entry.name.c_str(),
                f.entry.n, f.entry.label.c_str(), f.psi.real(), f.psi.imag(),
                f.column_matching.c_str());
    report(f.entry.name + " residual battery", f.checks.worst(), tol::identity);
    report(f.entry.name + " cubic density constancy", f.psi_deviation, tol::identity);
  }
  claim("families separated by (n, profile, cubic density)", q4.families_distinct);
  std::printf("%s\n", q4.note.c_str());
}

void run_clifford(int n) {
  const CliffordReport cr = clifford_theorem(n);
  std::printf("equal-weight root-of-unity moduli, n = %d\n", cr.n);
  claim("pairing profile is " + cr.profile + " (mixed impossible)", !cr.mixed_possible);
  claim("nonzero frequency-sum classes are singletons", cr.singleton_lemma);
  std::printf("  zero class has %zu members\n", cr.zero_class);
  if (!cr.weights.empty()) {
    std::printf("  forced weights:");
    for (const cplx& w : cr.weights) std::printf(" %+.4f%+.4fi", w.real(), w.imag());
    std::printf("\n");
  }
  claim("minimal ambient dimension " + std::to_string(cr.minimal_ambient) +
            " matches the witness",
        cr.minimal_matches_witness);
  report("witness residual battery", cr.checks.worst(), tol::identity);
  claim("Gram-predicted ambient dimension " + std::to_string(cr.gram.ambient_predicted) +
            " matches the witness",
        cr.ambient_consistent);
  report("witness recovered from its W up to real gauge", cr.alignment, 1e-9);
  report("pairing facts: base", cr.gram.fact_base, 1e-10);
  report("pairing facts: odd entries vanish", cr.gram.fact_parity, 1e-10);
  report("pairing facts: shifted sums vanish", cr.gram.fact_shift, 1e-10);
  report("pairing facts: edge relation", cr.gram.fact_edge, 1e-10);
  report("Gram matrix is a real circulant", std::max(cr.gram.realness, cr.gram.circulant),
         1e-10);
  report("determinant equals its symbol product", cr.gram.det_gap, cr.gram.det_tol);
  claim("odd-power determinants exclude a mixed profile (min |det| = " +
            std::to_string(cr.obstruction_min) + ")",
        cr.obstruction_min > 1e-6);
  report("odd-power determinant, two routes", cr.obstruction_gap, 1e-9);
  report("power-table determinant, two routes", cr.power_table_gap, 1e-9);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Flat minimal tori in complex hyperquadrics: moduli solving, curve "
      "verification and classification"};
  app.require_subcommand(1);

  // moduli
  CLI::App* moduli = app.add_subcommand("moduli", "solve or evaluate weight/phase moduli");
  moduli->require_subcommand(1);
  struct {
    int n = 3;
    std::uint64_t seed = 1;
    int starts = 48;
    int iters = 150;
    bool antipodal = false;
    std::string out;
  } msol;
  CLI::App* solve_cmd = moduli->add_subcommand("solve", "solve the moment constraints numerically");
  solve_cmd->add_option("--n", msol.n, "number of phases minus one")->required()->check(CLI::Range(2, 12));
  solve_cmd->add_option("--seed", msol.seed, "random seed");
  solve_cmd->add_option("--starts", msol.starts, "maximum optimizer starts")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--iters", msol.iters, "iterations per start")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--antipodal", msol.antipodal, "restrict to fully antipodal phase layouts");
  solve_cmd->add_option("--out", msol.out, "write the moduli as JSON to this file");
  solve_cmd->callback([&] {
    SolveOptions opt;
    opt.max_starts = msol.starts;
    opt.max_iters = msol.iters;
    const ModuliSolution ms = msol.antipodal ? solve_antipodal(msol.n, msol.seed, opt)
                                             : solve(msol.n, msol.seed, opt);
    print_moduli(ms);
    if (!msol.out.empty()) emit(to_json(ms), msol.out);
  });
  struct {
    int n = 3;
    std::string out;
  } mcc;
  CLI::App* cliff_cmd = moduli->add_subcommand("clifford", "equal weights at roots of unity");
  cliff_cmd->add_option("--n", mcc.n, "number of phases minus one")->required()->check(CLI::Range(2, 32));
  cliff_cmd->add_option("--out", mcc.out, "write the moduli as JSON to this file");
  cliff_cmd->callback([&] {
    const ModuliSolution ms = clifford(mcc.n);
    print_moduli(ms);
    if (!mcc.out.empty()) emit(to_json(ms), mcc.out);
  });

  // quadric
  CLI::App* quadric = app.add_subcommand("quadric", "cataloged curves and W-matrix checks");
  quadric->require_subcommand(1);
  quadric->add_subcommand("catalog", "list the cataloged curves")->callback([] {
    for (const std::string& name : catalog_names()) {
      const CatalogEntry e = catalog(name);
      std::printf("%-15s n=%d N=%d %-10s %s\n", e.name.c_str(), e.n, e.N, e.label.c_str(),
                  e.note.c_str());
    }
  });
  struct {
    std::string name;
    std::string w_file, m_file;
  } qchk;
  CLI::App* check_cmd = quadric->add_subcommand("check", "verify a cataloged or external curve");
  check_cmd->add_option("--name", qchk.name, "catalog entry to verify (default: all)");
  check_cmd->add_option("--w", qchk.w_file, "JSON file with a W matrix to check externally");
  check_cmd->add_option("--moduli", qchk.m_file, "JSON file with moduli for --w")->needs("--w");
  check_cmd->callback([&] {
    if (!qchk.w_file.empty()) {
      if (qchk.m_file.empty()) throw std::invalid_argument("--w requires --moduli");
      check_external(qchk.w_file, qchk.m_file);
      return;
    }
    if (qchk.name.empty())
      for (const std::string& name : catalog_names()) check_entry(catalog(name));
    else
      check_entry(catalog(qchk.name));
  });

  // verify (full battery)
  app.add_subcommand("verify", "run the full residual battery over the catalog")->callback([] {
    for (const std::string& name : catalog_names()) check_entry(catalog(name));
  });

  // classify
  CLI::App* classify = app.add_subcommand("classify", "ambient-dimension classifications");
  classify->require_subcommand(1);
  struct {
    int seeds = 12;
    int starts = 60;
    int n = 3;
  } copt;
  CLI::App* q2c = classify->add_subcommand("q2", "ambient dimension 4: the unique curve");
  q2c->add_option("--seeds", copt.seeds, "independent solver seeds for the forced moduli")->check(CLI::PositiveNumber);
  q2c->callback([&] { run_q2(copt.seeds); });
  CLI::App* q3c = classify->add_subcommand("q3", "ambient dimension 5: emptiness");
  q3c->add_option("--starts", copt.starts, "numerical search starts (0 skips the search)");
  q3c->callback([&] { run_q3(copt.starts); });
  classify->add_subcommand("q4", "ambient dimension 6: the known families")->callback(run_q4);
  CLI::App* clc = classify->add_subcommand("clifford", "equal-weight root-of-unity moduli");
  clc->add_option("--n", copt.n, "number of phases minus one")->required()->check(CLI::Range(2, 9));
  clc->callback([&] { run_clifford(copt.n); });

  // export
  struct {
    std::string name = "paired-n3";
    std::string what = "curve";
    std::string format = "json";
    std::string out;
    int samples = 8;
    std::uint64_t seed = 17;
  } ex;
  CLI::App* exp_cmd = app.add_subcommand("export", "write cataloged data to files");
  exp_cmd->add_option("--name", ex.name, "catalog entry");
  exp_cmd->add_option("--what", ex.what, "curve | moduli | w | u")
      ->check(CLI::IsMember({"curve", "moduli", "w", "u"}));
  exp_cmd->add_option("--format", ex.format, "json | csv (csv samples the curve)")
      ->check(CLI::IsMember({"json", "csv"}));
  exp_cmd->add_option("--out", ex.out, "output file (default: stdout)");
  exp_cmd->add_option("--samples", ex.samples, "sample points for csv")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--seed", ex.seed, "sample seed for csv");
  exp_cmd->callback([&] {
    const CatalogEntry e = catalog(ex.name);
    if (ex.format == "csv") {
      if (ex.what != "curve")
        throw std::invalid_argument("csv export is only defined for --what curve");
      std::vector<cplx> zs{cplx(0.0, 0.0)};
      SamplePoints rng(ex.seed);
      for (int k = 1; k < ex.samples; ++k) zs.push_back(rng.next());
      const std::string csv = curve_samples_csv(e.f0, zs);
      if (ex.out.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        std::ofstream f(ex.out);
        if (!f) throw std::invalid_argument("cannot open output file: " + ex.out);
        f << csv;
        std::printf("wrote %s\n", ex.out.c_str());
      }
      return;
    }
    json j;
    if (ex.what == "curve")
      j = to_json(e.f0);
    else if (ex.what == "moduli")
      j = to_json(e.ms);
    else if (ex.what == "w")
      j = to_json(e.W);
    else
      j = to_json(e.U);
    emit(j, ex.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return 1;
  }
  return g_status;
}
