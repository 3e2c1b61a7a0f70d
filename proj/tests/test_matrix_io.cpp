#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "arnagg/matrix_io.hpp"
#include "arnagg/models.hpp"

using namespace arnagg;

TEST_CASE("Matrix Market round trip is bit-identical") {
  const auto [P, p0] = counterexample(0.1);
  std::stringstream buffer;
  write_matrix_market(P.storage(), buffer);
  const MatrixStorage back = read_matrix_market(buffer);
  CHECK(back.to_dense() == P.to_dense());

  const StochasticMatrix R = random_chain(40, 0.3, 8);
  std::stringstream dense_buffer;
  write_dense_csv(R.storage(), dense_buffer);
  CHECK(read_dense_csv(dense_buffer).to_dense() == R.to_dense());
}

TEST_CASE("files round trip through the path-based API") {
  const auto dir = std::filesystem::temp_directory_path() / "arnagg_io_test";
  std::filesystem::create_directories(dir);
  const StochasticMatrix P = random_ncd(2, 4, 0.01, 3);
  save_matrix(P.storage(), dir / "p.mtx");
  save_matrix(P.storage(), dir / "p.csv");
  CHECK(load_stochastic(dir / "p.mtx").to_dense() == P.to_dense());
  CHECK(load_stochastic(dir / "p.csv").to_dense() == P.to_dense());

  const Vector v = random_distribution(9, 1).values();
  save_vector(v, dir / "v.csv");
  CHECK(load_vector(dir / "v.csv") == v);
  std::filesystem::remove_all(dir);
}

TEST_CASE("Matrix Market errors") {
  std::istringstream bad_header("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n");
  try {
    read_matrix_market(bad_header);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }

  std::istringstream out_of_range(
      "%%MatrixMarket matrix coordinate real general\n3 3 1\n3 4 1.0\n");
  CHECK_THROWS_AS(read_matrix_market(out_of_range), ShapeError);

  std::istringstream short_body("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(short_body), ParseError);

  std::istringstream bad_number("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 x\n");
  try {
    read_matrix_market(bad_number);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("Matrix Market accepts comments and sums duplicates") {
  std::istringstream in(
      "%%MatrixMarket Matrix Coordinate Real General\n% a comment\n\n2 2 3\n1 1 0.25\n1 1 0.75\n"
      "2 2 1\n");
  const DenseMatrix M = read_matrix_market(in).to_dense();
  CHECK(M == DenseMatrix::Identity(2, 2));
}

TEST_CASE("dense CSV errors") {
  std::istringstream ragged("1,0\n0\n");
  CHECK_THROWS_AS(read_dense_csv(ragged), ShapeError);
  std::istringstream junk("1,0\n0,abc\n");
  CHECK_THROWS_AS(read_dense_csv(junk), ParseError);
}

TEST_CASE("format_real keeps 17 significant digits") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}
