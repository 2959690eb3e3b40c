// Generates the example data files: sample sets whose sample mean and
// unbiased covariance match the intended values exactly (to rounding),
// so the estimate -> transform -> solve pipeline reproduces the reference
// solutions from raw data.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ccp/elliptical.hpp"

namespace {

// Affinely recombines a generic draw so the sample has the exact target
// mean and scatter (N-1) * cov: X = 1 mean' + Zc (Lz')^{-1} Lt'.
Eigen::MatrixXd exact_moment_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                    int count, ccp::Rng& rng) {
  const int d = static_cast<int>(mean.size());
  Eigen::MatrixXd z(count, d);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = rng.normal();
  const Eigen::MatrixXd zc = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd sz = zc.transpose() * zc;
  const Eigen::MatrixXd lz = Eigen::LLT<Eigen::MatrixXd>(sz).matrixL();
  const Eigen::MatrixXd lt =
      Eigen::LLT<Eigen::MatrixXd>(((count - 1.0) * cov).eval()).matrixL();
  const Eigen::MatrixXd c = lz.triangularView<Eigen::Lower>().transpose().solve<Eigen::OnTheRight>(zc);
  Eigen::MatrixXd x = c * lt.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

void write_sample(const std::filesystem::path& dir, const std::string& id,
                  const std::vector<std::string>& cols, const Eigen::MatrixXd& data) {
  std::ofstream out(dir / (id + ".dat"));
  out << "# id: " << id << "\n";
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? " " : "") << cols[j];
  out << "\n";
  char buf[64];
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data(i, j));
      out << (j ? " " : "") << buf;
    }
    out << "\n";
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data/examples";
  std::filesystem::create_directories(dir);
  ccp::Rng rng(20240817);

  const Eigen::Vector3d c_mean(50, 70, 70);
  const Eigen::Vector3d c_var(450, 2600, 850);
  write_sample(dir, "c", {"c1", "c2", "c3"},
               exact_moment_sample(c_mean, c_var.asDiagonal(), 12, rng));

  const std::vector<Eigen::Vector3d> a_means = {
      {12, 2, 4}, {7, 5, 12}, {2, 4, 3.5}};
  const std::vector<Eigen::Vector3d> a_vars = {
      {30, 10, 12}, {22, 32, 15}, {15, 14, 9}};
  for (int i = 0; i < 3; ++i) {
    const std::string id = "a" + std::to_string(i + 1);
    write_sample(dir, id, {id + "_1", id + "_2", id + "_3"},
                 exact_moment_sample(a_means[i], a_vars[i].asDiagonal(), 25, rng));
  }

  const Eigen::Vector3d b_mean(1000, 1500, 750);
  const Eigen::Vector3d b_var(5000, 4000, 500);
  write_sample(dir, "b", {"b1", "b2", "b3"},
               exact_moment_sample(b_mean, b_var.asDiagonal(), 25, rng));

  for (int i = 0; i < 3; ++i) {
    const std::string id = "g" + std::to_string(i + 1);
    Eigen::Vector4d mean, var;
    mean << a_means[i], b_mean(i);
    var << a_vars[i], b_var(i);
    write_sample(dir, id, {id + "_1", id + "_2", id + "_3", id + "_b"},
                 exact_moment_sample(mean, var.asDiagonal(), 25, rng));
  }

  write_text(dir / "example1.spec",
             "# production planning, random objective coefficients\n"
             "sense = maximize\n"
             "n_vars = 3\n"
             "k1 = 1\n"
             "k2 = 0\n"
             "samples = c.dat\n"
             "objective = random c\n"
             "constraint = row fixed 12 2 4 ; rhs fixed 1000 ; alpha 0.01\n"
             "constraint = row fixed 7 5 12 ; rhs fixed 1500 ; alpha 0.01\n"
             "constraint = row fixed 2 4 3.5 ; rhs fixed 750 ; alpha 0.01\n");

  write_text(dir / "example2.spec",
             "# random technology rows, 99% reliability\n"
             "sense = maximize\n"
             "n_vars = 3\n"
             "samples = a1.dat a2.dat a3.dat\n"
             "objective = fixed 50 70 70\n"
             "constraint = row random a1 ; rhs fixed 1000 ; alpha 0.01\n"
             "constraint = row random a2 ; rhs fixed 1500 ; alpha 0.01\n"
             "constraint = row random a3 ; rhs fixed 750 ; alpha 0.01\n");

  write_text(dir / "example3.spec",
             "# random resource limits, 99% reliability\n"
             "sense = maximize\n"
             "n_vars = 3\n"
             "samples = b.dat\n"
             "objective = fixed 50 70 70\n"
             "constraint = row fixed 12 2 4 ; rhs random b 0 ; alpha 0.01\n"
             "constraint = row fixed 7 5 12 ; rhs random b 1 ; alpha 0.01\n"
             "constraint = row fixed 2 4 3.5 ; rhs random b 2 ; alpha 0.01\n");

  write_text(dir / "example4.spec",
             "# jointly random rows and limits plus random objective\n"
             "sense = maximize\n"
             "n_vars = 3\n"
             "k1 = 0.5\n"
             "k2 = 0.5\n"
             "samples = c.dat g1.dat g2.dat g3.dat\n"
             "objective = random c\n"
             "constraint = row none ; rhs joint g1 ; alpha 0.01\n"
             "constraint = row none ; rhs joint g2 ; alpha 0.01\n"
             "constraint = row none ; rhs joint g3 ; alpha 0.01\n");

  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
