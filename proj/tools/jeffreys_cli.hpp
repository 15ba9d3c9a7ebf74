#pragma once

// Command-line front end. `run` is the whole program minus main(), so the
// test suite can drive it in-process.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <jeffreys/jeffreys.hpp>

namespace jeffreys::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_validation = 1,
  exit_nonconvergence = 2,
  exit_divergence = 3,
};

using json = nlohmann::json;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline json vector_json(const VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

struct FitOptions {
  std::string link = "logit";
  double a = 0.5;
  double level = 0.95;
  double tol = 1e-8;
  int max_iter = 100;
  std::string start_file;
  std::string inner = "step";
  std::string out = "json";
  bool no_intercept = false;

  FitConfig config() const {
    FitConfig c;
    c.grad_tol = tol;
    c.max_iter = max_iter;
    c.inner = inner == "full" ? InnerPolicy::full_inner_ml : InnerPolicy::single_irls_step;
    return c;
  }
};

inline void add_fit_flags(CLI::App* cmd, FitOptions& o) {
  cmd->add_option("--link", o.link, "Link function")
      ->check(CLI::IsMember({"logit", "probit", "cloglog", "loglog", "cauchit"}))
      ->capture_default_str();
  cmd->add_option("--a", o.a, "Penalty exponent; 0 gives plain maximum likelihood")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--level", o.level, "Wald interval level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--tol", o.tol, "Convergence tolerance on the max-abs score")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "Iteration limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--start-file", o.start_file,
                  "File of starting coefficients (comma or whitespace separated)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--inner", o.inner, "Inner update of the repeated fits")
      ->check(CLI::IsMember({"full", "step"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

inline VectorXd read_start_file(const std::string& path, Eigen::Index p) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open start file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& ch : text) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  std::istringstream tokens(text);
  std::vector<double> values;
  std::string token;
  while (tokens >> token) {
    double v = 0.0;
    if (!detail::parse_double(token, v)) {
      throw ValidationError("start file: cannot parse '" + token + "' as a number");
    }
    values.push_back(v);
  }
  if (static_cast<Eigen::Index>(values.size()) != p) {
    throw ValidationError("start file has " + std::to_string(values.size()) +
                          " values but the model has " + std::to_string(p) + " coefficients");
  }
  return Eigen::Map<VectorXd>(values.data(), p);
}

inline json separation_json(const SeparationReport& r) {
  json out;
  out["status"] = std::string(to_string(r.status));
  out["gamma"] = r.gamma ? vector_json(*r.gamma) : json(nullptr);
  json rows = json::array();
  for (auto i : r.separated_observations) rows.push_back(i + 1);
  out["separated_observations"] = rows;
  return out;
}

inline std::string row_list(const std::vector<Eigen::Index>& rows) {
  std::string s;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(rows[k] + 1);
  }
  return s;
}

inline int fit_and_report(const Dataset& data, const FitOptions& o, std::ostream& out,
                          std::ostream& err) {
  const Link link = Link::from_name(o.link);
  const FitConfig config = o.config();
  std::optional<VectorXd> start;
  if (!o.start_file.empty()) start = read_start_file(o.start_file, data.p());

  const bool ml = o.a == 0.0;
  const FitResult fit = ml ? fit_ml(data, link, config, start) : fit_mpl(data, link, o.a, config, start);

  std::optional<WaldSummary> summary;
  if (fit.converged) summary = wald(fit, o.level);

  std::optional<SeparationReport> separation;
  if (ml && fit.diverged) separation = detect_separation(data);

  if (o.out == "csv") {
    out << "name,estimate,std_error,lower,upper\n";
    for (Eigen::Index t = 0; t < data.p(); ++t) {
      out << csv_quote(data.coef_names()[static_cast<std::size_t>(t)]) << ','
          << format_number(fit.beta[t]) << ','
          << format_number(summary ? summary->std_errors[t] : NAN) << ','
          << format_number(summary ? summary->lower[t] : NAN) << ','
          << format_number(summary ? summary->upper[t] : NAN) << '\n';
    }
  } else {
    json j;
    j["method"] = ml ? "ml" : "mpl";
    j["link"] = o.link;
    j["a"] = o.a;
    j["n"] = data.n();
    j["p"] = data.p();
    j["converged"] = fit.converged;
    j["diverged"] = fit.diverged;
    j["iterations"] = fit.iterations;
    j["final_grad_norm"] = fit.final_grad_norm;
    j["loglik"] = fit.loglik;
    j["penalized_loglik"] = fit.penalized_loglik;
    j["logdet"] = fit.logdet;
    j["generalized_variance"] = summary ? json(summary->gen_variance) : json(nullptr);
    j["level"] = o.level;
    json coefs = json::array();
    for (Eigen::Index t = 0; t < data.p(); ++t) {
      json c;
      c["name"] = data.coef_names()[static_cast<std::size_t>(t)];
      c["estimate"] = fit.beta[t];
      c["std_error"] = summary ? json(summary->std_errors[t]) : json(nullptr);
      c["lower"] = summary ? json(summary->lower[t]) : json(nullptr);
      c["upper"] = summary ? json(summary->upper[t]) : json(nullptr);
      coefs.push_back(c);
    }
    j["coefficients"] = coefs;
    if (!fit.message.empty()) j["message"] = fit.message;
    if (separation) j["separation"] = separation_json(*separation);
    out << j.dump(2) << '\n';
  }

  if (fit.diverged) {
    err << "error: maximum likelihood estimates are infinite (" << fit.message << "). ";
    if (separation && separation->status != SeparationStatus::overlap) {
      err << "The data are " << to_string(separation->status) << " separated (rows "
          << row_list(separation->separated_observations) << "). ";
    } else {
      err << "This indicates data separation. ";
    }
    err << "Use --a > 0 for finite penalized estimates.\n";
    return exit_divergence;
  }
  if (!fit.converged) {
    err << "error: fit did not converge after " << fit.iterations << " iterations (max |score| = "
        << format_number(fit.final_grad_norm) << ")\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

inline std::vector<double> parse_grid_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!detail::parse_double(detail::trim(item), v)) {
      throw ValidationError("--grid: cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> parse_grid_log(const std::string& text) {
  std::stringstream ss(text);
  std::string lo, hi, k;
  if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, k)) {
    throw ValidationError("--grid-log expects lo:hi:k");
  }
  double l = 0.0, h = 0.0, count = 0.0;
  if (!detail::parse_double(lo, l) || !detail::parse_double(hi, h) ||
      !detail::parse_double(k, count) || count != std::floor(count)) {
    throw ValidationError("--grid-log expects lo:hi:k with numeric lo, hi and integer k");
  }
  return log_grid(l, h, static_cast<int>(count));
}

inline int path_and_report(const Dataset& data, const FitOptions& o, const std::vector<double>& grid,
                           std::ostream& out, std::ostream& err) {
  const Link link = Link::from_name(o.link);
  const PathResult path = fit_path(data, link, grid, o.config());
  if (o.out == "csv") {
    out << "a,converged,iterations,logdet";
    for (const auto& name : data.coef_names()) out << ',' << csv_quote(name);
    out << '\n';
    for (std::size_t j = 0; j < grid.size(); ++j) {
      out << format_number(grid[j]) << ',' << (path.converged[j] ? "true" : "false") << ','
          << path.iterations[j] << ',' << format_number(path.logdets[j]);
      for (double b : path.betas[j]) out << ',' << format_number(b);
      out << '\n';
    }
  } else {
    json j;
    j["link"] = o.link;
    j["coef_names"] = data.coef_names();
    json points = json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      points.push_back({{"a", grid[k]},
                        {"converged", static_cast<bool>(path.converged[k])},
                        {"iterations", path.iterations[k]},
                        {"logdet", path.logdets[k]},
                        {"beta", vector_json(path.betas[k])}});
    }
    j["points"] = points;
    out << j.dump(2) << '\n';
  }
  const auto failed = std::count(path.converged.begin(), path.converged.end(), false);
  if (failed > 0) {
    err << "error: " << failed << " of " << grid.size() << " grid points did not converge\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

inline const char* boundary_name(MlBoundary b) {
  switch (b) {
    case MlBoundary::interior: return "interior";
    case MlBoundary::zero: return "zero";
    case MlBoundary::one: return "one";
  }
  return "";
}

inline int enumerate_and_report(const std::string& link_name, int m1, int m2, double a,
                                const std::string& format, const std::string& contours,
                                std::ostream& out, std::ostream& err) {
  const Link link = Link::from_name(link_name);
  const EnumerationTable table = enumerate_saturated(link, m1, m2, a);
  if (format == "csv") {
    out << "y1,y2,pi1_ml,pi2_ml,ml_boundary1,ml_boundary2,pi1_mpl,pi2_mpl,logdet_ml,logdet_mpl,"
           "converged\n";
    for (const auto& c : table.cells) {
      out << c.y1 << ',' << c.y2 << ',' << format_number(c.pi_ml[0]) << ','
          << format_number(c.pi_ml[1]) << ',' << boundary_name(c.ml_boundary[0]) << ','
          << boundary_name(c.ml_boundary[1]) << ',' << format_number(c.pi_mpl[0]) << ','
          << format_number(c.pi_mpl[1]) << ',' << (c.logdet_ml ? format_number(*c.logdet_ml) : "NA")
          << ',' << format_number(c.logdet_mpl) << ',' << (c.mpl_converged ? "true" : "false")
          << '\n';
    }
  } else {
    json j;
    j["link"] = link_name;
    j["m1"] = m1;
    j["m2"] = m2;
    j["a"] = a;
    j["x1"] = table.x1;
    j["x2"] = table.x2;
    j["z0"] = find_z0(link);
    json cells = json::array();
    for (const auto& c : table.cells) {
      cells.push_back({{"y1", c.y1},
                       {"y2", c.y2},
                       {"pi_ml", {c.pi_ml[0], c.pi_ml[1]}},
                       {"ml_boundary", {boundary_name(c.ml_boundary[0]), boundary_name(c.ml_boundary[1])}},
                       {"pi_mpl", {c.pi_mpl[0], c.pi_mpl[1]}},
                       {"logdet_ml", c.logdet_ml ? json(*c.logdet_ml) : json(nullptr)},
                       {"logdet_mpl", c.logdet_mpl},
                       {"converged", c.mpl_converged}});
    }
    j["cells"] = cells;
    json rows = json::array();
    for (Eigen::Index r = 0; r < table.contour.values.rows(); ++r) {
      rows.push_back(vector_json(table.contour.values.row(r).transpose()));
    }
    j["contour"] = {{"axis", table.contour.axis}, {"values", rows}};
    out << j.dump(2) << '\n';
  }
  if (!contours.empty()) {
    std::ofstream file(contours);
    if (!file) throw ValidationError("cannot write contour file '" + contours + "'");
    file << "pi1,pi2,logdet\n";
    for (std::size_t r = 0; r < table.contour.axis.size(); ++r) {
      for (std::size_t c = 0; c < table.contour.axis.size(); ++c) {
        file << format_number(table.contour.axis[r]) << ',' << format_number(table.contour.axis[c])
             << ','
             << format_number(table.contour.values(static_cast<Eigen::Index>(r),
                                                   static_cast<Eigen::Index>(c)))
             << '\n';
      }
    }
  }
  for (const auto& c : table.cells) {
    if (!c.mpl_converged) {
      err << "error: penalized fit did not converge for cell (" << c.y1 << ", " << c.y2 << ")\n";
      return exit_nonconvergence;
    }
  }
  return exit_ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Binomial GLMs by maximum likelihood and Jeffreys-prior penalized likelihood"};
  app.require_subcommand(1);

  FitOptions fit_opts;
  std::string data_path;
  auto* fit = app.add_subcommand("fit", "Fit a binomial GLM to a CSV file");
  fit->add_option("--data", data_path, "CSV with columns y, m (optional) and covariates")
      ->required()
      ->check(CLI::ExistingFile);
  add_fit_flags(fit, fit_opts);
  fit->add_flag("--no-intercept", fit_opts.no_intercept, "Do not prepend an intercept column");

  FitOptions path_opts;
  std::string path_data, grid_list, grid_log;
  auto* path = app.add_subcommand("path", "Penalized fits over a grid of penalty exponents");
  path->add_option("--data", path_data, "CSV with columns y, m (optional) and covariates")
      ->required()
      ->check(CLI::ExistingFile);
  add_fit_flags(path, path_opts);
  path->remove_option(path->get_option("--a"));
  path->remove_option(path->get_option("--level"));
  path->remove_option(path->get_option("--start-file"));
  path->add_flag("--no-intercept", path_opts.no_intercept, "Do not prepend an intercept column");
  auto* grid_opt = path->add_option("--grid", grid_list, "Comma-separated ascending exponents");
  auto* grid_log_opt = path->add_option("--grid-log", grid_log, "lo:hi:k log-spaced exponents");
  grid_opt->excludes(grid_log_opt);

  std::string sep_data, sep_out = "json";
  bool sep_no_intercept = false;
  auto* sep = app.add_subcommand("detect-separation", "Classify data separation");
  sep->add_option("--data", sep_data, "CSV with columns y, m (optional) and covariates")
      ->required()
      ->check(CLI::ExistingFile);
  sep->add_flag("--no-intercept", sep_no_intercept, "Do not prepend an intercept column");
  sep->add_option("--out", sep_out, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  std::string en_link = "logit", en_out = "json", en_contours;
  int m1 = 9, m2 = 9;
  double en_a = 0.5;
  auto* en = app.add_subcommand("enumerate", "Enumerate the two-observation saturated model");
  en->add_option("--link", en_link, "Link function")
      ->check(CLI::IsMember({"logit", "probit", "cloglog", "loglog", "cauchit"}))
      ->capture_default_str();
  en->add_option("--m1", m1, "First binomial total")->check(CLI::PositiveNumber)->capture_default_str();
  en->add_option("--m2", m2, "Second binomial total")->check(CLI::PositiveNumber)->capture_default_str();
  en->add_option("--a", en_a, "Penalty exponent")->check(CLI::PositiveNumber)->capture_default_str();
  en->add_option("--out", en_out, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  en->add_option("--contours", en_contours, "Write the contour grid as long-format CSV to this file");

  FitOptions bt_opts;
  std::string contests, reference;
  auto* bt = app.add_subcommand("bt-fit", "Fit a Bradley-Terry model to contest outcomes");
  bt->add_option("--contests", contests, "CSV with columns winner, loser")
      ->required()
      ->check(CLI::ExistingFile);
  bt->add_option("--reference", reference, "Team whose ability is fixed at zero")->required();
  add_fit_flags(bt, bt_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    auto load = [](const std::string& file, bool no_intercept) {
      CsvColumns columns;
      columns.intercept = !no_intercept;
      return load_csv(file, columns);
    };
    if (*fit) return fit_and_report(load(data_path, fit_opts.no_intercept), fit_opts, out, err);
    if (*path) {
      std::vector<double> grid = default_path_grid();
      if (!grid_list.empty()) grid = parse_grid_list(grid_list);
      if (!grid_log.empty()) grid = parse_grid_log(grid_log);
      return path_and_report(load(path_data, path_opts.no_intercept), path_opts, grid, out, err);
    }
    if (*sep) {
      const Dataset data = load(sep_data, sep_no_intercept);
      const SeparationReport report = detect_separation(data);
      if (sep_out == "csv") {
        out << "status,separated_observations";
        for (const auto& name : data.coef_names()) out << ",gamma_" << csv_quote(name);
        out << '\n' << to_string(report.status) << ",\""
            << row_list(report.separated_observations) << '"';
        for (Eigen::Index t = 0; t < data.p(); ++t) {
          out << ',' << (report.gamma ? format_number((*report.gamma)[t]) : "NA");
        }
        out << '\n';
      } else {
        json j = separation_json(report);
        j["coef_names"] = data.coef_names();
        out << j.dump(2) << '\n';
      }
      return exit_ok;
    }
    if (*en) return enumerate_and_report(en_link, m1, m2, en_a, en_out, en_contours, out, err);
    if (*bt) {
      const auto records = load_contests(contests);
      return fit_and_report(bt_design(records, reference), bt_opts, out, err);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const InferenceError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_nonconvergence;
  }
  return exit_validation;
}

}  // namespace jeffreys::cli
