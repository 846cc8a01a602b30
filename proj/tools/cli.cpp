#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "flagdyn/io.hpp"
#include "flagdyn/morse.hpp"
#include "flagdyn/skeleton.hpp"
#include "flagdyn/tree.hpp"

namespace flagdyn::cli {

namespace {

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, std::string("cannot parse ") + what + " entry '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      fail(ErrorCode::InvalidArgument, std::string("cannot parse ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::InvalidArgument, std::string(what) + " list is empty");
  return out;
}

void require_sizes(const RunConfig& cfg) {
  if (cfg.n < 1 || cfg.k < 1 || cfg.k > cfg.n) fail(ErrorCode::BadSizes, "need 1 <= k <= n");
}

Weights weights_for(const RunConfig& cfg) {
  if (cfg.weights) {
    if (static_cast<int>(cfg.weights->size()) != cfg.k) fail(ErrorCode::ShapeMismatch, "need k weights");
    return Weights(*cfg.weights);
  }
  std::vector<double> b(cfg.k);
  for (int i = 0; i < cfg.k; ++i) b[i] = cfg.k - i;
  return Weights(b);
}

Frame start_frame(const RunConfig& cfg, std::mt19937_64& rng) {
  return sample_point(Tree::maximal(cfg.n, cfg.k, cfg.symplectic), rng);
}

void require_format(const RunConfig& cfg, std::initializer_list<Format> allowed) {
  for (Format f : allowed)
    if (f == cfg.format) return;
  fail(ErrorCode::InvalidArgument, cfg.command + ": unsupported output format");
}

std::string frame_header(const Frame& x) {
  std::string h = "t";
  for (Eigen::Index r = 1; r <= x.n(); ++r)
    for (Eigen::Index c = 1; c <= x.k(); ++c) h += ",x_" + std::to_string(r) + "_" + std::to_string(c);
  return h + '\n';
}

std::string frame_row(double t, const Frame& x) {
  std::string row = format_double(t);
  for (Eigen::Index r = 0; r < x.n(); ++r)
    for (Eigen::Index c = 0; c < x.k(); ++c) row += "," + format_double(x.mat()(r, c));
  return row + '\n';
}

long step_count(const RunConfig& cfg) {
  FlowConfig fc{cfg.step, cfg.horizon};
  fc.validate();
  return static_cast<long>(std::ceil(cfg.horizon / cfg.step - 1e-9));
}

// e^{tA} must be symplectic, so isotropic flags flow along log A, whose
// spectrum is ±log λ_i and which is symmetric and Hamiltonian.
SpectralData flow_generator(const RunConfig& cfg) {
  const SpectralData a = generate_matrix(cfg);
  if (!cfg.symplectic) return a;
  return SpectralData(a.evals().array().log().matrix(), a.evecs());
}

void run_flow(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {Format::csv, Format::json});
  std::mt19937_64 rng(cfg.seed);
  const SpectralData a = flow_generator(cfg);
  Frame x = start_frame(cfg, rng);
  const long m = step_count(cfg);
  const double dt = cfg.horizon / m;
  if (cfg.format == Format::csv) out << frame_header(x) << frame_row(0, x);
  for (long s = 1; s <= m; ++s) {
    x = flow(a, x, dt);
    if (cfg.format == Format::csv) out << frame_row(dt * s, x);
  }
  if (cfg.format == Format::json) out << to_json(x).dump(2) << '\n';
}

void run_gradient_flow(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {Format::csv, Format::json});
  std::mt19937_64 rng(cfg.seed);
  const SpectralData a = generate_matrix(cfg);
  const Weights b = weights_for(cfg);
  const Frame x0 = start_frame(cfg, rng);
  const long m = step_count(cfg);
  FlowConfig fc{cfg.horizon / m, cfg.horizon, Integrator::rk4_projected};
  std::ostringstream rows;
  const FrameObserver<double> record = [&](double t, const Frame& y) {
    rows << format_double(t) << ',' << format_double(quad(a, b, y)) << frame_row(0, y).substr(1);
  };
  const Frame x = gradient_flow(a, b, x0, cfg.horizon, fc, !cfg.descent,
                                cfg.format == Format::csv ? record : FrameObserver<double>{});
  if (cfg.format == Format::csv) {
    const std::string h = frame_header(x);
    out << "t,Q" << h.substr(1) << rows.str();
  } else {
    out << to_json(x).dump(2) << '\n';
  }
}

void run_lyapunov(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {Format::csv, Format::json});
  if (cfg.symplectic) fail(ErrorCode::InvalidArgument, "lyapunov: only the general diagonal family is audited");
  std::mt19937_64 rng(cfg.seed);
  const SpectralData a = generate_matrix(cfg);
  const Weights b = weights_for(cfg);
  const Frame x = start_frame(cfg, rng);
  AuditOptions opt;
  opt.field_tolerance = cfg.tolerance;
  const LyapunovReport rep = lyapunov_audit(a, a, b, x, FlowConfig{cfg.step, cfg.horizon}, opt);
  if (cfg.format == Format::csv)
    out << audit_csv(rep);
  else
    out << audit_summary_json(rep).dump(2) << '\n';
}

void run_strata(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {Format::csv, Format::json});
  require_sizes(cfg);
  EnumerationLimits lim;
  lim.max_trees = cfg.max_vertices;
  const auto trees = enumerate_irreducible(cfg.n, cfg.k, cfg.symplectic, lim);
  if (cfg.format == Format::csv) {
    out << "tree_id,dim,n_nodes,is_zero_dim\n";
    for (std::size_t i = 0; i < trees.size(); ++i) {
      std::vector<Subset> distinct = trees[i].nodes();
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      const int d = dimension(trees[i]);
      out << i << ',' << d << ',' << distinct.size() << ',' << (d == 0 ? 1 : 0) << '\n';
    }
    return;
  }
  Json arr = Json::array();
  for (const Tree& t : trees) arr.push_back(to_json(t));
  out << arr.dump(2) << '\n';
}

void run_skeleton(const RunConfig& cfg, std::ostream& out) {
  require_sizes(cfg);
  const SkeletonGraph g = build_graph(cfg.n, cfg.k, cfg.symplectic, cfg.max_vertices);
  switch (cfg.format) {
    case Format::dot:
      out << to_dot(g);
      break;
    case Format::json:
      out << to_json(g).dump(2) << '\n';
      break;
    case Format::csv:
      out << "tail,head,tail_H,head_H\n";
      for (auto [t, h] : g.edges)
        out << g.vertices[t].to_string() << ',' << g.vertices[h].to_string() << ',' << g.index[t] << ','
            << g.index[h] << '\n';
      break;
  }
}

Certificate certificate_for(const RunConfig& cfg, bool numeric) {
  require_sizes(cfg);
  CertificateOptions opt;
  if (cfg.eigenvalues || cfg.random_eigenvalues) opt.spectrum = generate_matrix(cfg);
  opt.weights = weights_for(cfg);
  opt.numeric = numeric;
  opt.rel_tol = cfg.tolerance;
  opt.budget = cfg.max_vertices;
  return perfectness_certificate(cfg.n, cfg.k, cfg.symplectic, opt);
}

void run_morse(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {Format::csv, Format::json});
  const Certificate c = certificate_for(cfg, false);
  if (cfg.format == Format::csv) {
    out << certificate_csv(c);
    return;
  }
  Json pts = Json::array();
  for (const CriticalReport& r : c.per_point)
    pts.push_back(Json{{"perm", to_json(r.perm)}, {"H", r.h}, {"morse_index", r.morse_index}});
  out << Json{{"n", c.n}, {"k", c.k}, {"symplectic", c.symplectic}, {"morse_coeffs", c.morse.coeffs()},
              {"points", pts}}
             .dump(2)
      << '\n';
}

void run_certify(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg, {Format::csv, Format::json});
  const Certificate c = certificate_for(cfg, true);
  if (cfg.format == Format::csv)
    out << certificate_csv(c);
  else
    out << to_json(c).dump(2) << '\n';
}

}  // namespace

SpectralData generate_matrix(const RunConfig& cfg) {
  require_sizes(cfg);
  if (cfg.eigenvalues) {
    if (static_cast<int>(cfg.eigenvalues->size()) != cfg.n)
      fail(ErrorCode::ShapeMismatch, "need n eigenvalues (one per conjugate pair when symplectic)");
    return normalized_spectrum(*cfg.eigenvalues, cfg.symplectic);
  }
  if (cfg.random_eigenvalues) {
    // log-uniform in [1/8, 8]; an independent stream so the frame draws do not shift
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(-std::log(8.0), std::log(8.0));
    std::vector<double> ev(cfg.n);
    for (double& v : ev) v = std::exp(u(rng));
    return normalized_spectrum(ev, cfg.symplectic);
  }
  return geometric_spectrum(cfg.n, cfg.symplectic);
}

void run(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "flow") return run_flow(cfg, out);
  if (cfg.command == "gradient-flow") return run_gradient_flow(cfg, out);
  if (cfg.command == "lyapunov") return run_lyapunov(cfg, out);
  if (cfg.command == "strata") return run_strata(cfg, out);
  if (cfg.command == "skeleton") return run_skeleton(cfg, out);
  if (cfg.command == "morse") return run_morse(cfg, out);
  if (cfg.command == "certify") return run_certify(cfg, out);
  fail(ErrorCode::InvalidArgument, "unknown command '" + cfg.command + "'");
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Divergence:
    case ErrorCode::NotSimpleSpectrum:
    case ErrorCode::Singular:
    case ErrorCode::RankDeficient:
      return 2;
    case ErrorCode::SizeLimit:
      return 3;
    default:
      return 1;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Flows, strata, skeleton graphs and Morse certificates on flag manifolds", "flagdyn"};
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::string eigenvalues, weights, format = "csv";
  app.add_option("--n", cfg.n, "ambient dimension (half dimension when symplectic)");
  app.add_option("--k", cfg.k, "flag length");
  app.add_option("--symplectic", cfg.symplectic, "isotropic flags in R^2n");
  app.add_option("--seed", cfg.seed, "seed for every random draw");
  app.add_option("--eigenvalues", eigenvalues, "comma list of positive eigenvalues, or 'random'");
  app.add_option("--weights", weights, "comma list b_1 >= ... >= b_k > 0");
  app.add_option("--step", cfg.step, "integration step");
  app.add_option("--horizon", cfg.horizon, "integration horizon");
  app.add_option("--output", cfg.output, "output path, '-' for stdout");
  CLI::Option* format_opt = app.add_option("--format", format, "csv, json or dot (certify defaults to json)")
                               ->check(CLI::IsMember({"csv", "json", "dot"}));
  app.add_option("--max-vertices", cfg.max_vertices, "budget for enumerations");
  app.add_option("--tolerance", cfg.tolerance, "audit field tolerance / certificate relative tolerance");
  app.add_flag("--descent", cfg.descent, "gradient-flow: integrate -grad Q");

  const std::pair<const char*, const char*> commands[] = {
      {"flow", "integrate phi_A^t from a random frame"},
      {"gradient-flow", "integrate the gradient flow of Q_{A,b}"},
      {"lyapunov", "audit Q_{A,b} along phi_H^t"},
      {"strata", "enumerate consistent irreducible trees"},
      {"skeleton", "oriented skeleton graph of fixed points"},
      {"morse", "critical points and the Morse polynomial"},
      {"certify", "perfectness certificate with numerical Hessians"},
  };
  for (auto [name, what] : commands) app.add_subcommand(name, what)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (format_opt->count() == 0 && cfg.command == "certify") format = "json";
    cfg.format = format == "json" ? Format::json : format == "dot" ? Format::dot : Format::csv;
    if (eigenvalues == "random")
      cfg.random_eigenvalues = true;
    else if (!eigenvalues.empty())
      cfg.eigenvalues = parse_list(eigenvalues, "eigenvalue");
    if (!weights.empty()) cfg.weights = parse_list(weights, "weight");

    std::ostringstream buf;
    run(cfg, buf);
    if (cfg.output == "-") {
      std::cout << buf.str();
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) fail(ErrorCode::InvalidArgument, "cannot open output file " + cfg.output);
      f << buf.str();
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "flagdyn: " << e.what() << '\n';
    return exit_code(e.code());
  }
}

}  // namespace flagdyn::cli
