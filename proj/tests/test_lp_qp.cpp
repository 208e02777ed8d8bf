#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "daecbf/lp.hpp"
#include "daecbf/qp.hpp"
#include "oracles.hpp"

using namespace daecbf;

namespace {

Matrix col_matrix(const std::vector<double>& entries) {
  Matrix a(entries.size(), 1);
  for (std::size_t i = 0; i < entries.size(); ++i) a(i, 0) = entries[i];
  return a;
}

void check_certificate(const FarkasCertificate& cert, const Matrix& a, const Vector& r) {
  for (double l : cert.lambda) CHECK(l >= 0.0);
  Vector lta(a.cols(), 0.0);
  double ltr = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    ltr += cert.lambda[i] * r[i];
    for (std::size_t j = 0; j < a.cols(); ++j) lta[j] += cert.lambda[i] * a(i, j);
  }
  CHECK(norm_inf(lta) <= 1e-8);
  CHECK(ltr == doctest::Approx(-1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("lp_feasible: hand examples") {
  // u <= 1 and u >= 2: infeasible with lambda = (1, 1)
  {
    const auto out = lp_feasible(col_matrix({1.0, -1.0}), {1.0, -2.0});
    REQUIRE_FALSE(out.feasible);
    REQUIRE(out.certificate.has_value());
    CHECK(out.certificate->lambda[0] == doctest::Approx(1.0));
    CHECK(out.certificate->lambda[1] == doctest::Approx(1.0));
    check_certificate(*out.certificate, col_matrix({1.0, -1.0}), {1.0, -2.0});
  }
  // u <= 1 and u >= 0: feasible with witness in [0, 1]
  {
    const auto out = lp_feasible(col_matrix({1.0, -1.0}), {1.0, 0.0});
    REQUIRE(out.feasible);
    CHECK(out.witness[0] >= -1e-9);
    CHECK(out.witness[0] <= 1.0 + 1e-9);
  }
  // empty system is trivially feasible
  CHECK(lp_feasible(Matrix(0, 3), {}).feasible);
}

TEST_CASE("lp_feasible matches vertex enumeration on 10000 random systems") {
  std::mt19937_64 rng(123456u);
  std::uniform_int_distribution<std::size_t> nvars(1, 4), nrows(1, 12);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::size_t mismatches = 0, infeasible_count = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = nvars(rng), m = nrows(rng);
    Matrix a(m, n);
    Vector r(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = entry(rng);
      r[i] = entry(rng);
    }
    const auto fast = lp_feasible(a, r);
    const bool slow = oracles::lp_feasible_bruteforce(a, r);
    if (fast.feasible != slow) ++mismatches;
    if (fast.feasible) {
      // witness soundness
      for (std::size_t i = 0; i < m; ++i) {
        double v = -r[i];
        for (std::size_t j = 0; j < n; ++j) v += a(i, j) * fast.witness[j];
        CHECK(v <= 1e-8);
      }
    } else {
      ++infeasible_count;
      REQUIRE(fast.certificate.has_value());
      check_certificate(*fast.certificate, a, r);
    }
  }
  CHECK(mismatches == 0);
  CHECK(infeasible_count > 100);  // the sample actually exercises both branches
}

TEST_CASE("solve_qp matches exhaustive active-set enumeration") {
  std::mt19937_64 rng(777u);
  std::uniform_int_distribution<std::size_t> nvars(1, 3), nrows(0, 6);
  std::uniform_real_distribution<double> entry(-1.5, 1.5);
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = nvars(rng), m = nrows(rng);
    QpProblem qp;
    qp.hessian = Matrix::identity(n);
    qp.linear.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) qp.linear[j] = entry(rng);
    qp.eq_a = Matrix(0, n);
    qp.ineq_a = Matrix(m, n);
    qp.ineq_r.assign(m, 0.0);
    // build rows around a known interior point so most instances are feasible
    Vector u0(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) u0[j] = entry(rng);
    for (std::size_t i = 0; i < m; ++i) {
      double au = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        qp.ineq_a(i, j) = entry(rng);
        au += qp.ineq_a(i, j) * u0[j];
      }
      qp.ineq_r[i] = au + std::abs(entry(rng));
    }
    const FilterResult fast = solve_qp(qp);
    const auto slow = oracles::qp_enumerate(qp.hessian, qp.linear, qp.eq_a, {},
                                            qp.ineq_a, qp.ineq_r);
    REQUIRE(fast.status == FilterStatus::Feasible);
    REQUIRE(slow.has_value());
    for (std::size_t j = 0; j < n; ++j)
      CHECK(fast.u[j] == doctest::Approx((*slow)[j]).epsilon(1e-6));
    ++compared;
  }
  CHECK(compared == 500);
}

TEST_CASE("solve_qp honors equality rows") {
  // min ||u - (1,1)||^2 s.t. u1 + u2 = 1: optimum (0.5, 0.5)
  QpProblem qp;
  qp.hessian = Matrix::identity(2);
  qp.linear = {-1.0, -1.0};
  qp.eq_a = Matrix(1, 2);
  qp.eq_a(0, 0) = 1.0;
  qp.eq_a(0, 1) = 1.0;
  qp.eq_r = {1.0};
  qp.ineq_a = Matrix(0, 2);
  const FilterResult r = solve_qp(qp);
  REQUIRE(r.status == FilterStatus::Feasible);
  CHECK(r.u[0] == doctest::Approx(0.5));
  CHECK(r.u[1] == doctest::Approx(0.5));
}

TEST_CASE("solve_qp returns a certificate on infeasible problems") {
  QpProblem qp;
  qp.hessian = Matrix::identity(1);
  qp.linear = {0.0};
  qp.eq_a = Matrix(0, 1);
  qp.ineq_a = col_matrix({1.0, -1.0});
  qp.ineq_r = {-3.0, 2.0};  // u <= -3 and u >= -2
  const FilterResult r = solve_qp(qp);
  REQUIRE(r.status == FilterStatus::Infeasible);
  REQUIRE(r.certificate.has_value());
  check_certificate(*r.certificate, qp.ineq_a, qp.ineq_r);
}

TEST_CASE("solve_qp leaves a feasible nominal input untouched") {
  std::mt19937_64 rng(4242u);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2;
    QpProblem qp;
    qp.hessian = Matrix::identity(n);
    Vector u_nom(n, 0.0);
    for (auto& v : u_nom) v = entry(rng);
    qp.linear = {-u_nom[0], -u_nom[1]};
    qp.eq_a = Matrix(0, n);
    qp.ineq_a = Matrix(4, n);
    qp.ineq_r.assign(4, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
      double au = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        qp.ineq_a(i, j) = entry(rng);
        au += qp.ineq_a(i, j) * u_nom[j];
      }
      qp.ineq_r[i] = au + 0.1 + std::abs(entry(rng));  // strictly feasible nominal
    }
    const FilterResult r = solve_qp(qp);
    REQUIRE(r.status == FilterStatus::Feasible);
    CHECK(std::abs(r.u[0] - u_nom[0]) <= 1e-9);
    CHECK(std::abs(r.u[1] - u_nom[1]) <= 1e-9);
  }
}
