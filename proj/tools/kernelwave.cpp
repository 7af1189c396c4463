// kernelwave: evaluation, expansion, coefficient, trace and verification front end.

#include <fstream>
#include <iostream>
#include <memory>
#include <random>

#include <CLI11.hpp>

#include "kernelwave/io.hpp"
#include "kernelwave/phase.hpp"
#include "kernelwave/verify.hpp"

namespace kw = kernelwave;
using kw::io::fmt;

namespace {

enum Exit { ok = 0, failure = 1, accuracy_warning = 2 };

struct Global {
  std::string output;
  std::string format = "csv";
  std::string backend = "direct";
  std::uint64_t seed = 1;
  kw::QuadOptions quad;
};

/// Output stream: the file named by --output, or stdout.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw kw::UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

/// "x" or "lo:hi:n".
std::vector<double> parse_grid(const std::string& s) {
  const auto parts = kw::io::split(s, ':');
  if (parts.size() == 1)
    return {kw::io::parse_double(parts[0])};
  if (parts.size() != 3)
    throw kw::UsageError("grid must be 'x' or 'lo:hi:n': '" + s + "'");
  const double lo = kw::io::parse_double(parts[0]), hi = kw::io::parse_double(parts[1]);
  const int n = std::stoi(parts[2]);
  if (n < 1)
    throw kw::UsageError("grid size must be positive");
  std::vector<double> g;
  for (int i = 0; i < n; ++i)
    g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return g;
}

std::vector<kw::Point> parse_points(const std::string& s) {
  std::vector<kw::Point> pts;
  for (const auto& p : kw::io::split(s, ';'))
    pts.push_back(kw::io::parse_point(p));
  return pts;
}

int write_kernel_rows(const Global& g, const std::vector<kw::KernelQuery>& queries) {
  std::vector<kw::KernelValue> values(queries.size());
  kw::parallel_for(queries.size(), [&](std::size_t i) { values[i] = kw::eval_kernel(queries[i]); });
  Sink sink(g.output);
  auto& out = sink.out();
  bool warned = false;
  if (g.format == "json") {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto& q = queries[i];
      const auto& v = values[i];
      nlohmann::json j{{"kernel", kw::to_string(q.kernel)}, {"tau1", q.tau1}, {"tau2", q.tau2}, {"u", q.u},
                       {"v", q.v},  {"re", v.value.real()},   {"im", v.value.imag()},
                       {"err", v.error_estimate}, {"imag_residual", v.imag_residual},
                       {"backend", kw::to_string(v.backend_used)}, {"converged", v.converged}};
      if (q.a_param)
        j["a"] = *q.a_param;
      out << j.dump() << '\n';
    }
  } else {
    out << kw::io::kernel_csv_header << '\n';
    for (std::size_t i = 0; i < queries.size(); ++i)
      out << kw::io::kernel_csv_row(queries[i], values[i]) << '\n';
  }
  for (std::size_t i = 0; i < queries.size(); ++i)
    if (!values[i].converged) {
      warned = true;
      std::cerr << "warning: quadrature did not converge for row " << i + 1 << " (error estimate "
                << values[i].error_estimate << ")\n";
    }
  return warned ? accuracy_warning : ok;
}

kw::KernelQuery base_query(const Global& g) {
  kw::KernelQuery q;
  q.backend = kw::parse_backend(g.backend);
  q.opts = g.quad;
  return q;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended Airy, Pearcey and sine kernels: evaluation, expansions and rate checks"};
  app.set_config("--config", "", "key=value file mirroring the flags (flags take precedence)");
  app.require_subcommand(1);
  Global g;
  app.add_option("-o,--output", g.output, "Output file (default stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--backend", g.backend, "direct or saddle")->check(CLI::IsMember({"direct", "saddle"}));
  app.add_option("--seed", g.seed, "Seed for randomized sweeps");
  app.add_option("--rel-tol", g.quad.rel_tol, "Quadrature relative tolerance");
  app.add_option("--abs-tol", g.quad.abs_tol, "Quadrature absolute tolerance");
  app.add_option("--nodes", g.quad.nodes_per_panel, "Gauss-Legendre nodes per panel");
  app.add_option("--max-depth", g.quad.max_refine_depth, "Maximum dyadic refinement level");
  app.add_option("--budget", g.quad.ray_truncation_budget, "Exponent drop at which rays are cut");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate kernels at points given by flags or a file");
  std::string kernel, input;
  double tau1 = 0, tau2 = 0, u = 0, v = 0;
  std::optional<double> a_param;
  eval->add_option("--kernel", kernel, "airy-ext, pearcey-ext, sine-ext, s1, s2, transition-a");
  eval->add_option("--tau1", tau1);
  eval->add_option("--tau2", tau2);
  eval->add_option("--u", u);
  eval->add_option("--v", v);
  eval->add_option("--a", a_param, "Parameter of the transition kernel");
  eval->add_option("--input", input, "JSON lines or CSV file of queries")->check(CLI::ExistingFile);

  // expand
  auto* expand = app.add_subcommand("expand", "Partial sums of the complete expansion against the rescaled kernel");
  std::string transition = "airy-to-s1", point = "0,0,0,0", a_list = "4,6,8,10,12,14";
  int N = 1;
  expand->add_option("--transition", transition, "airy-to-s1 or pearcey-to-s2");
  expand->add_option("--point", point, "u,v,tau1,tau2");
  expand->add_option("--a", a_list, "Comma separated values of a");
  expand->add_option("--N", N, "Number of expansion terms")->check(CLI::NonNegativeNumber);

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "Dump amplitude coefficients b and c as JSON");
  int order = 6;
  coeffs->add_option("--transition", transition, "airy-to-s1 or pearcey-to-s2");
  coeffs->add_option("--point", point, "u,v,tau1,tau2");
  coeffs->add_option("--order", order, "Total degree")->check(CLI::NonNegativeNumber);

  // trace
  auto* trace = app.add_subcommand("trace", "Level curve and steepest paths through a saddle, as x y lines");
  std::string phase_name = "airy", level = "upper", window = "-3,3,-3,3";
  int resolution = 241;
  trace->add_option("--phase", phase_name, "airy or pearcey")->check(CLI::IsMember({"airy", "pearcey"}));
  trace->add_option("--level", level, "Saddle: upper, lower, or real (pearcey only)")
      ->check(CLI::IsMember({"upper", "lower", "real"}));
  trace->add_option("--window", window, "x0,x1,y0,y1");
  trace->add_option("--resolution", resolution, "Grid size for the level curve");

  // verify
  auto* verify = app.add_subcommand("verify", "Residual decay study with fitted log-log slopes");
  std::string points_arg, a_grid, fit = "auto", summary;
  int N_max = -1;
  bool check = false;
  verify->add_option("--transition", transition, "airy-to-s1 or pearcey-to-s2 (airy, pearcey accepted)");
  verify->add_option("--points", points_arg, "Points u,v,tau1,tau2 separated by ';'");
  verify->add_option("--a-grid", a_grid, "Comma separated increasing values of a");
  verify->add_option("--N-max", N_max, "Highest number of expansion terms");
  verify->add_option("--fit", fit, "auto, plain, rms-phase, max-phase");
  verify->add_option("--summary", summary, "Write the JSON slope summary to this file");
  verify->add_flag("--check", check, "Exit 1 if a slope leaves its acceptance window");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate a kernel on a grid or on random points");
  std::string ug = "0", vg = "0", t1g = "0", t2g = "0", box = "-2,2";
  int random_n = 0;
  sweep->add_option("--kernel", kernel)->required();
  sweep->add_option("--a", a_param);
  sweep->add_option("--u", ug, "x or lo:hi:n");
  sweep->add_option("--v", vg, "x or lo:hi:n");
  sweep->add_option("--tau1", t1g, "x or lo:hi:n");
  sweep->add_option("--tau2", t2g, "x or lo:hi:n");
  sweep->add_option("--random", random_n, "Number of uniform random points instead of a grid");
  sweep->add_option("--box", box, "lo,hi for random coordinates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : failure;
  }

  try {
    g.quad.validate();
    if (*eval) {
      std::vector<kw::KernelQuery> queries;
      if (!input.empty()) {
        std::ifstream in(input);
        queries = kw::io::read_queries(in, base_query(g));
      } else {
        if (kernel.empty())
          throw kw::UsageError("eval: --kernel or --input is required");
        kw::KernelQuery q = base_query(g);
        q.kernel = kw::parse_kernel(kernel);
        q.tau1 = tau1;
        q.tau2 = tau2;
        q.u = u;
        q.v = v;
        q.a_param = a_param;
        q.validate();
        queries.push_back(q);
      }
      return write_kernel_rows(g, queries);
    }

    if (*expand) {
      const kw::Transition t = kw::parse_transition(transition);
      const kw::Point p = kw::io::parse_point(point);
      const auto as = kw::io::parse_list(a_list);
      const auto ec = kw::build_amplitudes(t, p, kw::required_order(N));
      const auto backend = kw::parse_backend(g.backend);
      std::vector<kw::KernelValue> lhs(as.size());
      kw::parallel_for(as.size(), [&](std::size_t i) { lhs[i] = kw::rescaled_lhs(t, as[i], p, backend, g.quad); });
      Sink sink(g.output);
      auto& out = sink.out();
      out << "transition,u,v,tau1,tau2,N,a,lhs,partial_sum,residual,err\n";
      bool warned = false;
      for (std::size_t i = 0; i < as.size(); ++i) {
        const double s = kw::expansion_partial_sum(ec, N, as[i], g.quad);
        out << kw::to_string(t) << ',' << fmt(p.u) << ',' << fmt(p.v) << ',' << fmt(p.tau1) << ',' << fmt(p.tau2)
            << ',' << N << ',' << fmt(as[i]) << ',' << fmt(lhs[i].value.real()) << ',' << fmt(s) << ','
            << fmt(std::abs(lhs[i].value.real() - s)) << ',' << fmt(lhs[i].error_estimate) << '\n';
        warned = warned || !lhs[i].converged;
      }
      return warned ? accuracy_warning : ok;
    }

    if (*coeffs) {
      const auto ec = kw::build_amplitudes(kw::parse_transition(transition), kw::io::parse_point(point), order);
      Sink sink(g.output);
      sink.out() << kw::io::coefficients_json(ec).dump(2) << '\n';
      return ok;
    }

    if (*trace) {
      const bool airy = phase_name == "airy";
      const kw::PhaseSpec ph = kw::make_phase(airy ? kw::PhaseKind::airy_cubic : kw::PhaseKind::pearcey_quartic);
      if (airy && level == "real")
        throw kw::UsageError("trace: the Airy phase has no real saddle");
      const int idx = level == "upper" ? 0 : level == "lower" ? 1 : 2;
      const auto w = kw::io::parse_list(window);
      if (w.size() != 4 || !(w[1] > w[0]) || !(w[3] > w[2]))
        throw kw::UsageError("trace: window must be x0,x1,y0,y1 with x0 < x1 and y0 < y1");
      Sink sink(g.output);
      auto& out = sink.out();
      const kw::cplx s = ph.saddles[idx];
      out << "# saddle\n" << fmt(s.real()) << ' ' << fmt(s.imag()) << '\n';
      out << "# level curve Im f = " << fmt(ph.levels[idx].imag()) << '\n';
      for (kw::cplx z : kw::export_level_curve(ph, ph.levels[idx], {w[0], w[1], w[2], w[3]}, resolution))
        out << fmt(z.real()) << ' ' << fmt(z.imag()) << '\n';
      for (auto which : {kw::DescentOf::f, kw::DescentOf::minus_f})
        for (int ray : {0, 1}) {
          out << "# steepest descent of " << (which == kw::DescentOf::f ? "f" : "-f") << ", ray " << ray << '\n';
          for (kw::cplx z : kw::trace_steepest(ph, idx, which, ray).points)
            if (z.real() >= w[0] && z.real() <= w[1] && z.imag() >= w[2] && z.imag() <= w[3])
              out << fmt(z.real()) << ' ' << fmt(z.imag()) << '\n';
        }
      return ok;
    }

    if (*verify) {
      const kw::Transition t = kw::parse_transition(transition);
      const auto pts = points_arg.empty() ? kw::default_points() : parse_points(points_arg);
      const auto as = a_grid.empty() ? kw::default_a_grid() : kw::io::parse_list(a_grid);
      const int nmax = N_max >= 0 ? N_max : (t == kw::Transition::airy_to_s1 ? 2 : 1);
      kw::StudyOptions so;
      so.fit = kw::parse_fit_mode(fit);
      const auto backend = kw::parse_backend(g.backend);
      nlohmann::json js{{"transition", kw::to_string(t)}, {"a_values", as}, {"studies", nlohmann::json::array()}};
      bool violated = false;
      Sink sink(g.output);
      auto& out = sink.out();
      if (g.format == "csv")
        out << "transition,u,v,tau1,tau2,N,a,residual\n";
      for (const auto& p : pts) {
        const auto tab = kw::residual_study(t, p, as, nmax, backend, g.quad, so);
        nlohmann::json st{{"point", {p.u, p.v, p.tau1, p.tau2}}, {"fits", nlohmann::json::array()}};
        for (int n = 0; n <= nmax; ++n) {
          if (g.format == "csv")
            for (std::size_t i = 0; i < as.size(); ++i)
              out << kw::to_string(t) << ',' << fmt(p.u) << ',' << fmt(p.v) << ',' << fmt(p.tau1) << ','
                  << fmt(p.tau2) << ',' << n << ',' << fmt(as[i]) << ',' << fmt(tab.residuals[n][i]) << '\n';
          nlohmann::json f{{"N", n},
                           {"slope", tab.slopes[n]},
                           {"stderr", tab.slope_ci[n]},
                           {"fit", kw::to_string(tab.fit_used[n])},
                           {"residuals", tab.residuals[n]}};
          if (const auto win = kw::slope_window(t, n)) {
            const bool inside = tab.slopes[n] >= win->first && tab.slopes[n] <= win->second;
            f["window"] = {win->first, win->second};
            f["inside"] = inside;
            violated = violated || !inside;
          }
          st["fits"].push_back(f);
        }
        js["studies"].push_back(st);
      }
      js["all_inside"] = !violated;
      if (g.format == "json")
        out << js.dump(2) << '\n';
      if (!summary.empty()) {
        std::ofstream s(summary);
        if (!s)
          throw kw::UsageError("cannot open summary file '" + summary + "'");
        s << js.dump(2) << '\n';
      }
      return check && violated ? failure : ok;
    }

    if (*sweep) {
      const kw::KernelQuery base = base_query(g);
      std::vector<kw::KernelQuery> queries;
      auto push = [&](double t1, double t2, double x, double y) {
        kw::KernelQuery q = base;
        q.kernel = kw::parse_kernel(kernel);
        q.tau1 = t1;
        q.tau2 = t2;
        q.u = x;
        q.v = y;
        q.a_param = a_param;
        q.validate();
        queries.push_back(q);
      };
      if (random_n > 0) {
        const auto b = kw::io::parse_list(box);
        if (b.size() != 2 || !(b[1] > b[0]))
          throw kw::UsageError("sweep: --box must be lo,hi with lo < hi");
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> dist(b[0], b[1]);
        for (int i = 0; i < random_n; ++i) {
          const double t1 = dist(rng), t2 = dist(rng), x = dist(rng), y = dist(rng);
          push(t1, t2, x, y);
        }
      } else {
        for (double t1 : parse_grid(t1g))
          for (double t2 : parse_grid(t2g))
            for (double x : parse_grid(ug))
              for (double y : parse_grid(vg))
                push(t1, t2, x, y);
      }
      return write_kernel_rows(g, queries);
    }
  } catch (const kw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return ok;
}
