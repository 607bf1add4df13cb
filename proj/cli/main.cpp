#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diraclayer/geometry.hpp"
#include "diraclayer/kernels.hpp"
#include "diraclayer/linalg.hpp"
#include "diraclayer/ops2d.hpp"
#include "diraclayer/ops3d.hpp"
#include "diraclayer/verify.hpp"
#include "json.hpp"

namespace {

using namespace diraclayer;

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_summary(const Report& rep) {
  std::cout << "suite " << rep.suite << "  geometry " << rep.geometry << "\n";
  int passed = 0;
  for (const auto& c : rep.checks) {
    std::printf("  %-4s %-28s residual %-12.4g tolerance %-12.4g\n",
                c.pass() ? "PASS" : "FAIL", c.id.c_str(), c.residual, c.tolerance);
    passed += c.pass();
  }
  std::cout << "checks: " << passed << " passed, "
            << rep.checks.size() - passed << " failed\n";
}

int emit_report(const Report& rep, const RunConfig& cfg) {
  print_summary(rep);
  if (!cfg.out.empty()) rep.write_json(cfg.out);
  if (!cfg.csv_prefix.empty()) rep.write_csv(cfg.csv_prefix);
  if (!cfg.svg.empty()) rep.write_svg(cfg.svg);
  return rep.all_pass() ? 0 : 1;
}

int run_spectrum(const RunConfig& cfg) {
  Eigen::VectorXd mu;
  if (cfg.dim == 3) {
    const SphereGrid grid = build_sphere_grid(cfg.level);
    const GridGeom geom = pair_geometry(grid);
    const SpectralSplit split = spectral_split(
        assemble_R3(grid, geom, default_pv_scheme(cfg.level)));
    mu = split.mu;
  } else {
    const Panel2D p = make_panel(cfg.make_curve(), cfg.n, cfg.c_lambda);
    const Eigen::MatrixXcd R = assemble_R(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R + R.adjoint());
    mu = es.eigenvalues();
  }
  const std::string path = cfg.out.empty() ? "spectrum.csv" : cfg.out;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "index,mu,partner,pairing_residual\n";
  const int d = static_cast<int>(mu.size());
  for (int i = 0; i < d; ++i)
    f << i << "," << fmt_num(mu(i)) << "," << d - 1 - i << ","
      << fmt_num(std::abs(mu(i) + mu(d - 1 - i))) << "\n";
  std::cout << "wrote " << d << " eigenvalues to " << path << "\n";
  return 0;
}

nlohmann::ordered_json matrix_meta(const RunConfig& cfg, const std::string& name) {
  nlohmann::ordered_json meta;
  meta["operator"] = name;
  meta["dim"] = cfg.dim;
  meta["geometry"] = cfg.geometry_or_default();
  meta["z"] = cfg.z;
  meta["m"] = cfg.m;
  meta["c_lambda"] = cfg.c_lambda;
  if (cfg.dim == 2) {
    meta["n"] = cfg.n;
    meta["basis"] = "fourier modes -n..n per channel, arclength parameter";
  } else {
    meta["level"] = cfg.level;
    meta["basis"] = "grid nodes, interleaved spinor components, sqrt-weight scaled";
  }
  return meta;
}

void dump_matrix(const Eigen::MatrixXcd& A, const nlohmann::ordered_json& meta,
                 const std::string& path) {
  const auto rows = static_cast<std::uint64_t>(A.rows());
  const auto cols = static_cast<std::uint64_t>(A.cols());
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bin") {
    const std::string mjs = meta.dump();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write("DLOPMAT1", 8);
    const std::uint64_t mlen = mjs.size();
    f.write(reinterpret_cast<const char*>(&rows), 8);
    f.write(reinterpret_cast<const char*>(&cols), 8);
    f.write(reinterpret_cast<const char*>(&mlen), 8);
    f.write(mjs.data(), static_cast<std::streamsize>(mlen));
    f.write(reinterpret_cast<const char*>(A.data()),
            static_cast<std::streamsize>(sizeof(Complex) * rows * cols));
    return;
  }
  nlohmann::ordered_json j = meta;
  j["rows"] = rows;
  j["cols"] = cols;
  auto re = nlohmann::ordered_json::array(), im = nlohmann::ordered_json::array();
  for (std::uint64_t i = 0; i < rows; ++i) {
    auto rr = nlohmann::ordered_json::array(), ri = nlohmann::ordered_json::array();
    for (std::uint64_t c = 0; c < cols; ++c) {
      rr.push_back(A(static_cast<int>(i), static_cast<int>(c)).real());
      ri.push_back(A(static_cast<int>(i), static_cast<int>(c)).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  j["real"] = std::move(re);
  j["imag"] = std::move(im);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump() << "\n";
}

int run_assemble(const RunConfig& cfg, const std::string& name) {
  const SpectralPoint sp{cfg.z, cfg.m};
  Eigen::MatrixXcd A;
  if (cfg.dim == 2) {
    const Panel2D p = make_panel(cfg.make_curve(), cfg.n, cfg.c_lambda);
    if (name == "R")
      A = assemble_R(p);
    else if (name == "Rstar")
      A = assemble_Rstar(p);
    else if (name == "C")
      A = assemble_C(p, sp).C;
    else if (name == "S")
      A = assemble_C(p, sp).S;
    else if (name == "X")
      A = assemble_C(p, sp).X;
    else
      throw ConfigError("unknown 2D operator (R, Rstar, C, S, X): " + name);
  } else {
    const SphereGrid grid = build_sphere_grid(cfg.level);
    const GridGeom geom = pair_geometry(grid);
    const PvScheme pv = default_pv_scheme(cfg.level);
    if (name == "R")
      A = assemble_R3(grid, geom, pv);
    else if (name == "Rstar")
      A = assemble_R3star(grid, geom, pv);
    else if (name == "S")
      A = assemble_S3(grid, geom, sp.z * sp.z - sp.m * sp.m).cast<Complex>();
    else if (name == "Msn")
      A = mult_sigma_nu(grid);
    else if (name == "T")
      A = make_assembly_3d(grid, geom, sp, pv).T;
    else
      throw ConfigError("unknown 3D operator (R, Rstar, S, Msn, T): " + name);
  }
  const std::string path = cfg.out.empty() ? name + ".json" : cfg.out;
  dump_matrix(A, matrix_meta(cfg, name), path);
  std::cout << "wrote " << name << " (" << A.rows() << " x " << A.cols()
            << ") to " << path << "\n";
  return 0;
}

template <typename Mat>
nlohmann::ordered_json mat_entries(const Mat& M) {
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < M.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int j = 0; j < M.cols(); ++j)
      row.push_back({M(i, j).real(), M(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_kernel(const RunConfig& cfg, const std::string& kind,
               const std::vector<double>& x, int order) {
  const SpectralPoint sp{cfg.z, cfg.m};
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["z"] = cfg.z;
  j["m"] = cfg.m;
  j["x"] = x;
  if (kind == "bessel") {
    if (x.size() != 1 || x[0] <= 0.0)
      throw ConfigError("kernel bessel expects --x with one positive value");
    j["K0"] = bessel_k0(x[0]);
    j["K1"] = bessel_k1(x[0]);
    j["I0"] = bessel_i0(x[0]);
    j["I1"] = bessel_i1(x[0]);
  } else if (kind == "G2") {
    if (x.size() != 2) throw ConfigError("kernel G2 expects --x with two values");
    j["entries"] = mat_entries(eval_G2(sp, Vector2d(x[0], x[1])));
  } else if (kind == "G3") {
    if (x.size() != 3) throw ConfigError("kernel G3 expects --x with three values");
    j["entries"] = mat_entries(eval_G3(sp, Vector3d(x[0], x[1], x[2])));
  } else if (kind == "t3") {
    if (x.size() != 3) throw ConfigError("kernel t3 expects --x with three values");
    j["entries"] = mat_entries(eval_t3(sp, Vector3d(x[0], x[1], x[2])));
  } else if (kind == "split") {
    if (x.size() != 3)
      throw ConfigError("kernel split expects --x with three values");
    const KernelSplit ks = split_kernel_t(sp, order);
    const Vector3d v(x[0], x[1], x[2]);
    j["order"] = order;
    j["analytic"] = std::vector<double>(ks.analytic.data(),
                                        ks.analytic.data() + ks.analytic.size());
    j["pseudo"] = std::vector<double>(ks.pseudo.data(),
                                      ks.pseudo.data() + ks.pseudo.size());
    j["principal"] = mat_entries(ks.principal(v));
    j["reconstruct"] = mat_entries(ks.reconstruct(v));
    j["exact"] = mat_entries(eval_t3(sp, v));
  } else {
    throw ConfigError("unknown kernel kind (bessel, G2, G3, t3, split): " + kind);
  }
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + cfg.out);
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary layer operator calculus for the free Dirac equation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");

  RunConfig cfg;
  double geo_a = 0, geo_b = 0, geo_r = 0;
  app.add_option("--dim", cfg.dim, "problem dimension, 2 or 3");
  app.add_option("--geometry", cfg.geometry, "circle | ellipse | bean | sphere");
  app.add_option("--a", geo_a, "preset semi-axis a");
  app.add_option("--b", geo_b, "preset semi-axis b");
  app.add_option("--r", geo_r, "preset radius");
  app.add_option("--z", cfg.z, "spectral point in (-m, m)");
  app.add_option("--m", cfg.m, "mass, positive");
  app.add_option("--c-lambda,--c_lambda", cfg.c_lambda, "Lambda spectral shift");
  app.add_option("--n", cfg.n, "2D mode count");
  app.add_option("--level", cfg.level, "3D sphere grid level");
  app.add_option("--resolutions", cfg.resolutions, "sweep resolutions")
      ->delimiter(',');
  app.add_option("--suite", cfg.suite, "full | lean");
  app.add_option("--seed", cfg.seed, "seed for probe vectors");
  app.add_option("--out", cfg.out, "report / artifact output path");
  app.add_option("--csv-prefix,--csv_prefix", cfg.csv_prefix, "CSV table prefix");
  app.add_option("--svg", cfg.svg, "SVG plot output path");
  app.add_option("--threads", cfg.threads, "row-parallel worker count, 0 = serial")
      ->envname("DIRACLAYER_THREADS");

  auto* c_verify = app.add_subcommand("verify", "run the property suite");
  auto* c_conv = app.add_subcommand("convergence", "resolution sweep study");
  auto* c_spec = app.add_subcommand("spectrum", "eigenvalues of R + R*, CSV");
  auto* c_asm = app.add_subcommand("assemble", "dump an operator matrix");
  auto* c_ker = app.add_subcommand("kernel", "evaluate kernels at a point");
  std::string op_name = "R", ker_kind = "G3";
  std::vector<double> ker_x;
  int ker_order = 8;
  c_asm->add_option("--operator", op_name, "operator name");
  c_ker->add_option("--kind", ker_kind, "bessel | G2 | G3 | t3 | split");
  c_ker->add_option("--x", ker_x, "evaluation point")->delimiter(',');
  c_ker->add_option("--order", ker_order, "split expansion order");
  for (auto* sub : {c_verify, c_conv, c_spec, c_asm, c_ker})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.count("--a")) cfg.geo["a"] = geo_a;
    if (app.count("--b")) cfg.geo["b"] = geo_b;
    if (app.count("--r")) cfg.geo["r"] = geo_r;
    cfg.validate();
    set_num_threads(cfg.threads);
    if (c_verify->parsed()) {
      const Report rep = cfg.dim == 2 ? run_suite_2d(cfg) : run_suite_3d(cfg);
      return emit_report(rep, cfg);
    }
    if (c_conv->parsed())
      return emit_report(convergence_sweep(cfg, cfg.sweep_points()), cfg);
    if (c_spec->parsed()) return run_spectrum(cfg);
    if (c_asm->parsed()) return run_assemble(cfg, op_name);
    if (c_ker->parsed()) return run_kernel(cfg, ker_kind, ker_x, ker_order);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
