#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jeffreys/detail/csv.hpp"
#include "jeffreys/error.hpp"

namespace jeffreys {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Numerical rank by column-pivoted QR, threshold max(n, p) * eps * |R_11|.
inline Eigen::Index rank_check(const MatrixXd& X) {
  if (X.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  const double r11 = std::abs(qr.matrixQR()(0, 0));
  if (r11 == 0.0) return 0;
  const double tol = static_cast<double>(std::max(X.rows(), X.cols())) *
                     std::numeric_limits<double>::epsilon() * r11;
  qr.setThreshold(tol / r11);  // Eigen compares |R_ii| against threshold * |R_11|
  return qr.rank();
}

/// Binomial responses with their model matrix.
///
/// Counts may be fractional (adjusted responses reuse this type), but
/// 0 <= y_i <= m_i, m_i > 0 and full column rank of X are checked on
/// construction and cannot be bypassed. The model matrix is shared between
/// copies and between datasets derived with `with_responses`.
class Dataset {
 public:
  Dataset(VectorXd y, VectorXd m, MatrixXd X, std::vector<std::string> coef_names = {},
          std::vector<std::string> labels = {})
      : y_(std::move(y)),
        m_(std::move(m)),
        X_(std::make_shared<const MatrixXd>(std::move(X))),
        coef_names_(std::move(coef_names)),
        labels_(std::move(labels)) {
    const auto n = X_->rows();
    const auto p = X_->cols();
    if (p < 1) throw ValidationError("model matrix has no columns");
    if (n < p) {
      throw ValidationError("need at least as many observations as coefficients (n = " +
                            std::to_string(n) + ", p = " + std::to_string(p) + ")");
    }
    if (y_.size() != n || m_.size() != n) {
      throw ValidationError("response, totals and model matrix disagree on the number of rows");
    }
    if (!X_->allFinite()) throw ValidationError("model matrix contains non-finite values");
    check_counts(y_, m_);
    if (coef_names_.empty()) {
      for (Eigen::Index t = 0; t < p; ++t) coef_names_.push_back("x" + std::to_string(t + 1));
    }
    if (static_cast<Eigen::Index>(coef_names_.size()) != p) {
      throw ValidationError("coefficient names do not match the number of columns");
    }
    if (!labels_.empty() && static_cast<Eigen::Index>(labels_.size()) != n) {
      throw ValidationError("observation labels do not match the number of rows");
    }
    check_rank(*X_, coef_names_);
  }

  const VectorXd& y() const noexcept { return y_; }
  const VectorXd& m() const noexcept { return m_; }
  const MatrixXd& X() const noexcept { return *X_; }
  Eigen::Index n() const noexcept { return X_->rows(); }
  Eigen::Index p() const noexcept { return X_->cols(); }
  const std::vector<std::string>& coef_names() const noexcept { return coef_names_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// True when some column of X is identically one.
  bool has_intercept() const {
    for (Eigen::Index t = 0; t < p(); ++t) {
      if ((X_->col(t).array() == 1.0).all()) return true;
    }
    return false;
  }

  /// Same model matrix with different responses and totals.
  Dataset with_responses(VectorXd y, VectorXd m) const {
    if (y.size() != n() || m.size() != n()) {
      throw ValidationError("replacement responses have the wrong length");
    }
    check_counts(y, m);
    Dataset out(*this);
    out.y_ = std::move(y);
    out.m_ = std::move(m);
    return out;
  }

 private:
  static void check_counts(const VectorXd& y, const VectorXd& m) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const auto row = std::to_string(i + 1);
      if (!std::isfinite(y[i]) || !std::isfinite(m[i])) {
        throw ValidationError("row " + row + ": non-finite response or total");
      }
      if (!(m[i] > 0.0)) throw ValidationError("row " + row + ": total must be positive");
      if (y[i] < 0.0 || y[i] > m[i]) {
        throw ValidationError("row " + row + ": response must satisfy 0 <= y <= m");
      }
    }
  }

  static void check_rank(const MatrixXd& X, const std::vector<std::string>& names) {
    const auto rank = rank_check(X);
    if (rank == X.cols()) return;
    // The first column (in original order) that is spanned by the ones before it.
    for (Eigen::Index t = 1; t <= X.cols(); ++t) {
      if (rank_check(X.leftCols(t)) < t) {
        throw ValidationError("model matrix is rank deficient (rank " + std::to_string(rank) +
                              " < " + std::to_string(X.cols()) + "): column '" + names[t - 1] +
                              "' is linearly dependent on earlier columns");
      }
    }
    throw ValidationError("model matrix is rank deficient");
  }

  VectorXd y_;
  VectorXd m_;
  std::shared_ptr<const MatrixXd> X_;
  std::vector<std::string> coef_names_;
  std::vector<std::string> labels_;
};

/// Column selection for `load_csv`.
struct CsvColumns {
  std::string response = "y";
  /// Totals column; when absent from the file every total is 1.
  std::string totals = "m";
  /// Covariate columns; empty means every column other than response,
  /// totals and label.
  std::vector<std::string> covariates;
  /// Optional column of observation labels.
  std::string label;
  bool intercept = true;
};

inline Dataset load_csv_stream(std::istream& in, const CsvColumns& columns = {}) {
  const auto table = detail::parse_csv(in);
  const auto response = table.column(columns.response);
  if (response < 0) throw ValidationError("missing response column '" + columns.response + "'");
  const auto totals = table.column(columns.totals);
  const auto label = columns.label.empty() ? -1 : table.column(columns.label);
  if (!columns.label.empty() && label < 0) {
    throw ValidationError("missing label column '" + columns.label + "'");
  }

  std::vector<std::ptrdiff_t> covariates;
  std::vector<std::string> names;
  if (columns.intercept) names.emplace_back("(Intercept)");
  if (columns.covariates.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      const auto jj = static_cast<std::ptrdiff_t>(j);
      if (jj == response || jj == totals || jj == label) continue;
      covariates.push_back(jj);
      names.push_back(table.header[j]);
    }
  } else {
    for (const auto& name : columns.covariates) {
      const auto j = table.column(name);
      if (j < 0) throw ValidationError("missing covariate column '" + name + "'");
      covariates.push_back(j);
      names.push_back(name);
    }
  }

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto offset = columns.intercept ? 1 : 0;
  VectorXd y(n), m(n);
  MatrixXd X(n, static_cast<Eigen::Index>(covariates.size()) + offset);
  std::vector<std::string> labels;
  auto number = [&](std::size_t r, std::ptrdiff_t j) {
    double v = 0.0;
    if (!detail::parse_double(table.rows[r][static_cast<std::size_t>(j)], v)) {
      throw ValidationError("row " + std::to_string(r + 1) + ", column '" +
                            table.header[static_cast<std::size_t>(j)] + "': cannot parse '" +
                            table.rows[r][static_cast<std::size_t>(j)] + "' as a number");
    }
    return v;
  };
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    y[i] = number(r, response);
    m[i] = totals >= 0 ? number(r, totals) : 1.0;
    if (!(m[i] > 0.0)) {
      throw ValidationError("row " + std::to_string(r + 1) + ": total must be positive");
    }
    if (y[i] < 0.0 || y[i] > m[i]) {
      throw ValidationError("row " + std::to_string(r + 1) +
                            ": response must satisfy 0 <= y <= m");
    }
    if (columns.intercept) X(i, 0) = 1.0;
    for (std::size_t k = 0; k < covariates.size(); ++k) {
      X(i, static_cast<Eigen::Index>(k) + offset) = number(r, covariates[k]);
    }
    if (label >= 0) labels.push_back(table.rows[r][static_cast<std::size_t>(label)]);
  }
  return Dataset(std::move(y), std::move(m), std::move(X), std::move(names), std::move(labels));
}

inline Dataset load_csv(const std::string& path, const CsvColumns& columns = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return load_csv_stream(in, columns);
}

/// One decided paired comparison.
struct ContestRecord {
  std::string winner;
  std::string loser;
};

inline std::vector<ContestRecord> load_contests_stream(std::istream& in) {
  const auto table = detail::parse_csv(in);
  const auto w = table.column("winner");
  const auto l = table.column("loser");
  if (w < 0 || l < 0) throw ValidationError("contest file needs 'winner' and 'loser' columns");
  std::vector<ContestRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back({row[static_cast<std::size_t>(w)], row[static_cast<std::size_t>(l)]});
  }
  return out;
}

inline std::vector<ContestRecord> load_contests(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return load_contests_stream(in);
}

/// Bradley-Terry design: one Bernoulli row per contest with x_t = +1 for the
/// winner's column and -1 for the loser's, the reference team's column
/// dropped. Teams are ordered by first appearance. Labels read "winner vs loser".
inline Dataset bt_design(std::span<const ContestRecord> contests, std::string_view reference) {
  std::vector<std::string> teams;
  std::map<std::string, Eigen::Index, std::less<>> index;
  auto intern = [&](const std::string& team) {
    if (team.empty()) throw ValidationError("empty team name in contest list");
    if (index.try_emplace(team, static_cast<Eigen::Index>(teams.size())).second) {
      teams.push_back(team);
    }
  };
  for (std::size_t k = 0; k < contests.size(); ++k) {
    const auto& c = contests[k];
    if (c.winner == c.loser) {
      throw ValidationError("contest " + std::to_string(k + 1) + ": team '" + c.winner +
                            "' cannot play itself");
    }
    intern(c.winner);
    intern(c.loser);
  }
  if (teams.size() < 2) throw ValidationError("Bradley-Terry model needs at least two teams");
  const auto ref = index.find(reference);
  if (ref == index.end()) {
    throw ValidationError("reference team '" + std::string(reference) +
                          "' does not appear in any contest");
  }

  // Column of each team after dropping the reference.
  std::vector<Eigen::Index> column(teams.size(), -1);
  std::vector<std::string> names;
  for (std::size_t t = 0; t < teams.size(); ++t) {
    if (static_cast<Eigen::Index>(t) == ref->second) continue;
    column[t] = static_cast<Eigen::Index>(names.size());
    names.push_back(teams[t]);
  }

  const auto n = static_cast<Eigen::Index>(contests.size());
  MatrixXd X = MatrixXd::Zero(n, static_cast<Eigen::Index>(names.size()));
  std::vector<std::string> labels;
  labels.reserve(contests.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = contests[static_cast<std::size_t>(i)];
    const auto cw = column[static_cast<std::size_t>(index.find(c.winner)->second)];
    const auto cl = column[static_cast<std::size_t>(index.find(c.loser)->second)];
    if (cw >= 0) X(i, cw) = 1.0;
    if (cl >= 0) X(i, cl) = -1.0;
    labels.push_back(c.winner + " vs " + c.loser);
  }
  return Dataset(VectorXd::Ones(n), VectorXd::Ones(n), std::move(X), std::move(names),
                 std::move(labels));
}

}  // namespace jeffreys
