#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fsel/estimators.hpp"

namespace fsel {

namespace {

constexpr double kRidgeJitter = 1e-10;

double column_mean(const Matrix& X, std::size_t c) {
    double s = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) s += X(r, c);
    return s / static_cast<double>(X.rows());
}

// log(1 + exp(m)) without overflow.
double log1pexp(double m) { return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Least squares via Householder QR on [A | y]; A is destroyed. Returns the
// solution of min ||A x - y||. Requires rows >= cols and full column rank for
// a meaningful answer; callers handle rank deficiency by ridge augmentation.
std::vector<double> householder_solve(Matrix& A, std::vector<double>& y, bool& rank_deficient) {
    const std::size_t m = A.rows(), k = A.cols();
    std::vector<double> v(m);
    double max_diag = 0.0, min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < m; ++i) norm += A(i, j) * A(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            rank_deficient = true;
            continue;
        }
        const double alpha = A(j, j) >= 0.0 ? -norm : norm;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < m; ++i) {
            v[i] = A(i, j) - (i == j ? alpha : 0.0);
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;
        for (std::size_t c = j; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < m; ++i) dot += v[i] * A(i, c);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < m; ++i) A(i, c) -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += v[i] * y[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < m; ++i) y[i] -= f * v[i];
        max_diag = std::max(max_diag, std::abs(A(j, j)));
        min_diag = std::min(min_diag, std::abs(A(j, j)));
    }
    if (min_diag <= 1e-10 * std::max(max_diag, 1.0)) rank_deficient = true;

    std::vector<double> x(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;) {
        double s = y[jj];
        for (std::size_t c = jj + 1; c < k; ++c) s -= A(jj, c) * x[c];
        x[jj] = A(jj, jj) != 0.0 ? s / A(jj, jj) : 0.0;
    }
    return x;
}

std::vector<double> solve_least_squares(const Matrix& X, std::span<const double> y) {
    const std::size_t n = X.rows(), d = X.cols();
    const std::size_t k = d + 1;  // + intercept column

    auto build = [&](bool ridge) {
        const std::size_t rows = ridge ? n + k : n;
        Matrix A(rows, k, 0.0);
        std::vector<double> rhs(rows, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) A(i, j) = X(i, j);
            A(i, d) = 1.0;
            rhs[i] = y[i];
        }
        if (ridge)
            for (std::size_t j = 0; j < k; ++j) A(n + j, j) = std::sqrt(kRidgeJitter);
        return std::pair{std::move(A), std::move(rhs)};
    };

    bool rank_deficient = n < k;
    if (!rank_deficient) {
        auto [A, rhs] = build(false);
        auto sol = householder_solve(A, rhs, rank_deficient);
        if (!rank_deficient) return sol;
    }
    auto [A, rhs] = build(true);
    bool ignored = false;
    return householder_solve(A, rhs, ignored);
}

struct GdProblem {
    std::function<double(std::span<const double>, double, std::vector<double>*, double*)> objective;
    std::size_t dim;
};

// Full-batch gradient descent with Armijo backtracking. Deterministic.
LinearWeights gradient_descent(const GdProblem& problem, std::size_t max_iter, double tol,
                               std::vector<double>* trace) {
    std::vector<double> w(problem.dim, 0.0);
    double b = 0.0;
    std::vector<double> grad_w(problem.dim, 0.0);
    double grad_b = 0.0;
    double step = 1.0;
    double value = problem.objective(w, b, &grad_w, &grad_b);
    if (trace) trace->push_back(value);

    std::vector<double> w_next(problem.dim);
    for (std::size_t it = 0; it < max_iter; ++it) {
        double grad_norm2 = grad_b * grad_b;
        for (double g : grad_w) grad_norm2 += g * g;
        if (std::sqrt(grad_norm2) < tol) break;

        step = std::min(step * 2.0, 1e6);
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            for (std::size_t j = 0; j < problem.dim; ++j) w_next[j] = w[j] - step * grad_w[j];
            const double b_next = b - step * grad_b;
            const double candidate = problem.objective(w_next, b_next, nullptr, nullptr);
            if (candidate <= value - 1e-4 * step * grad_norm2) {
                w.swap(w_next);
                b = b_next;
                value = problem.objective(w, b, &grad_w, &grad_b);
                if (trace) trace->push_back(value);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent direction at machine precision
    }
    return {std::move(w), b};
}

std::vector<int> distinct_codes(std::span<const double> y) {
    std::vector<int> codes;
    for (double v : y) {
        const int c = static_cast<int>(v);
        if (std::find(codes.begin(), codes.end(), c) == codes.end()) codes.push_back(c);
    }
    std::sort(codes.begin(), codes.end());
    return codes;
}

std::vector<double> pm_labels(std::span<const double> y, int positive) {
    std::vector<double> pm(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) pm[i] = static_cast<int>(y[i]) == positive ? 1.0 : -1.0;
    return pm;
}

}  // namespace

double logistic_objective(const Matrix& X, std::span<const double> y_pm, std::span<const double> w,
                          double intercept, double l2_lambda, std::vector<double>* grad_w,
                          double* grad_intercept) {
    const std::size_t n = X.rows(), d = X.cols();
    if (grad_w) grad_w->assign(d, 0.0);
    if (grad_intercept) *grad_intercept = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = intercept;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < d; ++j) f += row[j] * w[j];
        const double margin = y_pm[i] * f;
        loss += log1pexp(-margin);
        if (grad_w) {
            const double coeff = -y_pm[i] * sigmoid(-margin);
            for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += coeff * row[j];
            if (grad_intercept) *grad_intercept += coeff;
        }
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    loss += 0.5 * l2_lambda * reg;
    if (grad_w) {
        for (std::size_t j = 0; j < d; ++j)
            (*grad_w)[j] = (*grad_w)[j] / static_cast<double>(n) + l2_lambda * w[j];
        if (grad_intercept) *grad_intercept /= static_cast<double>(n);
    }
    return loss;
}

double squared_hinge_objective(const Matrix& X, std::span<const double> y_pm, std::span<const double> w,
                               double intercept, double l2_lambda, std::vector<double>* grad_w,
                               double* grad_intercept) {
    const std::size_t n = X.rows(), d = X.cols();
    if (grad_w) grad_w->assign(d, 0.0);
    if (grad_intercept) *grad_intercept = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = intercept;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < d; ++j) f += row[j] * w[j];
        const double slack = std::max(0.0, 1.0 - y_pm[i] * f);
        loss += slack * slack;
        if (grad_w && slack > 0.0) {
            const double coeff = -2.0 * y_pm[i] * slack;
            for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += coeff * row[j];
            if (grad_intercept) *grad_intercept += coeff;
        }
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    loss += 0.5 * l2_lambda * reg;
    if (grad_w) {
        for (std::size_t j = 0; j < d; ++j)
            (*grad_w)[j] = (*grad_w)[j] / static_cast<double>(n) + l2_lambda * w[j];
        if (grad_intercept) *grad_intercept /= static_cast<double>(n);
    }
    return loss;
}

double elastic_net_objective(const Matrix& X, std::span<const double> y, std::span<const double> beta,
                             double intercept, double lambda, double l1_ratio) {
    const std::size_t n = X.rows(), d = X.cols();
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = intercept;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < d; ++j) f += row[j] * beta[j];
        const double err = y[i] - f;
        ss += err * err;
    }
    double l1 = 0.0, l2 = 0.0;
    for (double b : beta) {
        l1 += std::abs(b);
        l2 += b * b;
    }
    return ss / (2.0 * static_cast<double>(n)) + lambda * (l1_ratio * l1 + 0.5 * (1.0 - l1_ratio) * l2);
}

FittedModel fit_ols(const Matrix& X, std::span<const double> y) {
    if (X.rows() == 0 || X.rows() != y.size()) throw std::invalid_argument("fit_ols: empty or mismatched input");
    auto sol = solve_least_squares(X, y);
    FittedModel m;
    m.spec = EstimatorSpec::of(Algorithm::ols);
    m.task = Task::regression;
    m.train_feature_count = X.cols();
    LinearWeights w;
    w.intercept = sol.back();
    sol.pop_back();
    w.coef = std::move(sol);
    m.linear.push_back(std::move(w));
    return m;
}

FittedModel fit_elastic_net(const Matrix& X, std::span<const double> y, const ElasticNetParams& params) {
    const std::size_t n = X.rows(), d = X.cols();
    if (n == 0 || n != y.size()) throw std::invalid_argument("fit_elastic_net: empty or mismatched input");
    if (params.lambda < 0.0) throw std::invalid_argument("fit_elastic_net: lambda must be >= 0");
    if (params.l1_ratio < 0.0 || params.l1_ratio > 1.0)
        throw std::invalid_argument("fit_elastic_net: l1_ratio outside [0,1]");
    for (std::size_t c = 0; c < d; ++c)
        if (std::abs(column_mean(X, c)) > 1e-6)
            throw std::invalid_argument("fit_elastic_net: column " + std::to_string(c) +
                                        " is not centered; standardize the data first");

    double intercept = 0.0;
    for (double v : y) intercept += v;
    intercept /= static_cast<double>(n);

    std::vector<double> beta(d, 0.0);
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - intercept;

    std::vector<double> z(d, 0.0);  // x_j . x_j
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += X(i, c) * X(i, c);
        z[c] = s;
    }

    const double nf = static_cast<double>(n);
    const double l1_penalty = params.lambda * params.l1_ratio;
    const double l2_penalty = params.lambda * (1.0 - params.l1_ratio);

    for (std::size_t sweep = 0; sweep < params.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += X(i, j) * residual[i];
            rho += z[j] * beta[j];  // rho_j = x_j . (r + x_j beta_j)
            const double denom = z[j] / nf + l2_penalty;
            double next = 0.0;
            if (denom > 0.0) {
                const double a = rho / nf;
                const double soft = std::max(std::abs(a) - l1_penalty, 0.0);
                next = std::copysign(soft, a) / denom;
            }
            const double delta = next - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= delta * X(i, j);
                beta[j] = next;
            }
            max_delta = std::max(max_delta, std::abs(delta));
        }
        if (max_delta < params.tol) break;
    }

    FittedModel m;
    m.spec = EstimatorSpec::of(Algorithm::elastic_net);
    m.spec.elastic_net = params;
    m.task = Task::regression;
    m.train_feature_count = d;
    m.linear.push_back({std::move(beta), intercept});
    return m;
}

namespace {

FittedModel fit_margin_classifier(const Matrix& X, std::span<const double> y, Algorithm algorithm,
                                  std::size_t max_iter, double tol,
                                  const std::function<double(std::span<const double> y_pm,
                                                             std::span<const double> w, double b,
                                                             std::vector<double>*, double*)>& objective,
                                  std::vector<double>* trace) {
    const std::size_t d = X.cols();
    if (X.rows() == 0 || X.rows() != y.size())
        throw std::invalid_argument("classifier fit: empty or mismatched input");
    const auto codes = distinct_codes(y);
    if (codes.size() < 2) throw std::invalid_argument("classifier fit: single-class target");

    FittedModel m;
    m.spec = EstimatorSpec::of(algorithm);
    m.task = codes.size() == 2 ? Task::binary : Task::multiclass;
    m.classes = codes;
    m.train_feature_count = d;

    // Binary: one machine for the positive class. Multiclass: one per class.
    std::vector<int> positives = codes.size() == 2 ? std::vector<int>{codes[1]} : codes;
    for (int pos : positives) {
        const auto pm = pm_labels(y, pos);
        GdProblem problem;
        problem.dim = d;
        problem.objective = [&](std::span<const double> w, double b, std::vector<double>* gw, double* gb) {
            return objective(pm, w, b, gw, gb);
        };
        m.linear.push_back(gradient_descent(problem, max_iter, tol, trace));
    }
    return m;
}

}  // namespace

FittedModel fit_logistic(const Matrix& X, std::span<const double> y, const LogisticParams& params,
                         std::vector<double>* objective_trace) {
    auto m = fit_margin_classifier(
        X, y, Algorithm::logistic, params.max_iter, params.tol,
        [&](std::span<const double> pm, std::span<const double> w, double b, std::vector<double>* gw,
            double* gb) { return logistic_objective(X, pm, w, b, params.l2_lambda, gw, gb); },
        objective_trace);
    m.spec.logistic = params;
    return m;
}

FittedModel fit_linear_svm(const Matrix& X, std::span<const double> y, const LinearSvmParams& params,
                           std::vector<double>* objective_trace) {
    constexpr double kGradTol = 1e-6;
    auto m = fit_margin_classifier(
        X, y, Algorithm::linear_svm, params.max_iter, kGradTol,
        [&](std::span<const double> pm, std::span<const double> w, double b, std::vector<double>* gw,
            double* gb) { return squared_hinge_objective(X, pm, w, b, params.l2_lambda, gw, gb); },
        objective_trace);
    m.spec.svm = params;
    return m;
}

}  // namespace fsel
