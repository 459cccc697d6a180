// Shared test helpers: state comparisons, reference linear algebra kept
// independent of the library's apply/matmul paths, and CLI invocation.

#pragma once

#include <gtest/gtest.h>

#include <array>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "qsdc/qudit.hpp"

namespace qsdc::test {

inline void expect_state_near(const StateVec& psi, const std::vector<cx>& ref,
                              double tol = 1e-12) {
  ASSERT_EQ(static_cast<std::size_t>(psi.dim()), ref.size());
  for (int i = 0; i < psi.dim(); ++i) {
    EXPECT_NEAR(psi[i].real(), ref[i].real(), tol) << "i=" << i << " (real)";
    EXPECT_NEAR(psi[i].imag(), ref[i].imag(), tol) << "i=" << i << " (imag)";
  }
}

inline void expect_states_near(const StateVec& psi, const StateVec& phi,
                               double tol = 1e-12) {
  expect_state_near(psi, phi.amps(), tol);
}

// Reference matrix-vector product over plain nested loops; deliberately not
// the library path.
inline std::vector<cx> ref_matvec(const std::vector<std::vector<cx>>& m,
                                  const std::vector<cx>& v) {
  std::vector<cx> out(m.size(), cx{0.0, 0.0});
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
  return out;
}

inline std::vector<std::vector<cx>> ref_matmul(const std::vector<std::vector<cx>>& a,
                                               const std::vector<std::vector<cx>>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<cx>> out(n, std::vector<cx>(n, cx{0.0, 0.0}));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < n; ++c) out[r][c] += a[r][k] * b[k][c];
  return out;
}

inline std::vector<std::vector<cx>> ref_oracle(int w) {
  std::vector<std::vector<cx>> m(4, std::vector<cx>(4, cx{0.0, 0.0}));
  for (int i = 0; i < 4; ++i) m[i][i] = i == w ? cx{-1.0, 0.0} : cx{1.0, 0.0};
  return m;
}

inline std::vector<std::vector<cx>> ref_diffusion(const std::vector<cx>& s) {
  std::vector<std::vector<cx>> m(4, std::vector<cx>(4));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      m[r][c] = 2.0 * s[r] * std::conj(s[c]);
      if (r == c) m[r][c] -= 1.0;
    }
  return m;
}

// Random normalized state via Gaussian amplitudes.
inline StateVec random_state(int dim, RandomStream& rng) {
  std::vector<cx> amps(dim);
  double n = 0.0;
  for (cx& a : amps) {
    a = cx{qsdc::detail::gaussian(rng), qsdc::detail::gaussian(rng)};
    n += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(n);
  for (cx& a : amps) a *= inv;
  return StateVec(dim, std::move(amps));
}

// CLI ----------------------------------------------------------------------

struct CliResult {
  int exit_code;
  std::string out;
};

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("qsdc_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef QSDC_CLI_PATH
// Runs the CLI with the given arguments; stdout is captured via a temp file.
inline CliResult run_cli(const std::string& args) {
  const auto dir = fresh_temp_dir("cli");
  const auto out_file = dir / "stdout.txt";
  const std::string cmd =
      std::string(QSDC_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_file);
  std::filesystem::remove_all(dir);
  return result;
}
#endif

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

}  // namespace qsdc::test
