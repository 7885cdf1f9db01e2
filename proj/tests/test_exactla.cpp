#include <catch2/catch_amalgamated.hpp>

#include "dglhom/exactla.hpp"
#include "dglhom/prng.hpp"

using namespace dglhom;

namespace {

// Independent dense row-reduction oracle: plain rational Gaussian
// elimination, no sparsity, no fraction-free tricks. Returns rank.
int dense_rank(std::vector<QVec> rows, int cols) {
  int rank = 0;
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[static_cast<size_t>(r)][static_cast<size_t>(c)] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[static_cast<size_t>(rank)], rows[static_cast<size_t>(piv)]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || rows[static_cast<size_t>(r)][static_cast<size_t>(c)] == 0) continue;
      Rat f = rows[static_cast<size_t>(r)][static_cast<size_t>(c)] / rows[static_cast<size_t>(rank)][static_cast<size_t>(c)];
      for (int j = 0; j < cols; ++j)
        rows[static_cast<size_t>(r)][static_cast<size_t>(j)] -= f * rows[static_cast<size_t>(rank)][static_cast<size_t>(j)];
    }
    ++rank;
  }
  return rank;
}

std::vector<QVec> dense_rows(const SparseMatrix& m) {
  std::vector<QVec> rows(static_cast<size_t>(m.rows()), qvec_zero(m.cols()));
  for (const Triple& t : m.entries()) rows[static_cast<size_t>(t.row)][static_cast<size_t>(t.col)] = t.val;
  return rows;
}

SparseMatrix random_matrix(Prng& rng, int rows, int cols, int density_pct = 40) {
  std::vector<Triple> ts;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (rng.chance(static_cast<unsigned>(density_pct), 100))
        ts.push_back({i, j, rat(rng.range(-4, 4), rng.range(1, 3))});
  return SparseMatrix::from_triples(rows, cols, std::move(ts));
}

}  // namespace

TEST_CASE("kernel_image on the zero and identity matrices") {
  auto z = exactla::kernel_image(SparseMatrix::zero(2, 2));
  CHECK(z.kernel.size() == 2);
  CHECK(z.image.empty());

  auto id = exactla::kernel_image(SparseMatrix::identity(3));
  CHECK(id.kernel.empty());
  CHECK(id.image.size() == 3);
}

TEST_CASE("kernel of a rank-one 2x2 matrix, frozen oracle value") {
  // [[1,2],[2,4]]: dense oracle gives rank 1, kernel spanned by (2,-1).
  auto m = SparseMatrix::from_triples(2, 2, {{0, 0, Rat(1)}, {0, 1, Rat(2)}, {1, 0, Rat(2)}, {1, 1, Rat(4)}});
  CHECK(dense_rank(dense_rows(m), 2) == 1);
  auto ki = exactla::kernel_image(m);
  REQUIRE(ki.kernel.size() == 1);
  CHECK(ki.kernel[0] == QVec{Rat(2), Rat(-1)});
  CHECK(ki.image.size() == 1);
}

TEST_CASE("rank-nullity and oracle agreement on random matrices") {
  Prng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    int r = static_cast<int>(rng.range(0, 6)), c = static_cast<int>(rng.range(0, 6));
    SparseMatrix m = random_matrix(rng, r, c);
    auto ki = exactla::kernel_image(m);
    int rank = dense_rank(dense_rows(m), c);
    CHECK(static_cast<int>(ki.image.size()) == rank);
    CHECK(static_cast<int>(ki.kernel.size()) == c - rank);
    for (const QVec& v : ki.kernel) CHECK(is_zero(m.apply(v)));
    // image vectors are hit: each is a combination of columns
    exactla::Rref colspan = exactla::column_space(m);
    for (const QVec& v : ki.image) CHECK(colspan.contains(v));
  }
}

TEST_CASE("permuting rows and columns preserves dimensions") {
  Prng rng(11);
  SparseMatrix m = random_matrix(rng, 5, 4);
  std::vector<int> rp{3, 0, 4, 1, 2}, cp{2, 0, 3, 1};
  std::vector<Triple> ts;
  for (const Triple& t : m.entries())
    ts.push_back({rp[static_cast<size_t>(t.row)], cp[static_cast<size_t>(t.col)], t.val});
  SparseMatrix pm = SparseMatrix::from_triples(5, 4, std::move(ts));
  auto a = exactla::kernel_image(m), b = exactla::kernel_image(pm);
  CHECK(a.kernel.size() == b.kernel.size());
  CHECK(a.image.size() == b.image.size());
}

TEST_CASE("subquotient homology of zero differentials and of the identity") {
  auto z2 = exactla::subquotient_homology(SparseMatrix::zero(2, 1), SparseMatrix::zero(1, 2));
  CHECK(z2.dim() == 2);

  auto ex = exactla::subquotient_homology(SparseMatrix::identity(3), SparseMatrix::zero(1, 3));
  CHECK(ex.dim() == 0);
}

TEST_CASE("Koszul segment Q -> Q^2 -> Q is exact in the middle") {
  auto d_in = SparseMatrix::from_triples(2, 1, {{0, 0, Rat(1)}, {1, 0, Rat(1)}});
  auto d_out = SparseMatrix::from_triples(1, 2, {{0, 0, Rat(1)}, {0, 1, Rat(-1)}});
  auto h = exactla::subquotient_homology(d_in, d_out);
  CHECK(h.dim() == 0);
}

TEST_CASE("subquotient rejects non-composable data") {
  auto d_in = SparseMatrix::identity(2);
  auto d_out = SparseMatrix::identity(2);
  CHECK_THROWS_AS(exactla::subquotient_homology(d_in, d_out), CompositionNonzero);
}

TEST_CASE("subquotient representatives are kernel vectors independent mod image") {
  Prng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    int n = static_cast<int>(rng.range(1, 5));
    SparseMatrix d_out = random_matrix(rng, static_cast<int>(rng.range(0, 4)), n);
    // choose d_in with image inside ker(d_out): columns = random combos of kernel basis
    auto ker = exactla::kernel_basis(d_out);
    std::vector<QVec> cols;
    for (int j = 0; j < 3; ++j) {
      QVec v = qvec_zero(n);
      for (const QVec& k : ker)
        if (rng.chance(1, 2)) {
          Rat c(rng.range(-2, 2));
          for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] += c * k[static_cast<size_t>(i)];
        }
      cols.push_back(v);
    }
    SparseMatrix d_in = SparseMatrix::from_dense_columns(n, cols);
    auto h = exactla::subquotient_homology(d_in, d_out);
    exactla::Rref img = exactla::span_of(h.image, n);
    exactla::Rref all = img;
    for (const QVec& rep : h.reps) {
      CHECK(is_zero(d_out.apply(rep)));
      CHECK(!img.contains(rep));
      CHECK(all.add_row(rep));
    }
    CHECK(h.dim() == static_cast<int>(h.kernel.size() - h.image.size()));
  }
}

TEST_CASE("solve returns a verified particular solution or reports infeasibility") {
  Prng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    int r = static_cast<int>(rng.range(1, 5)), c = static_cast<int>(rng.range(1, 5));
    SparseMatrix a = random_matrix(rng, r, c);
    // feasible case: b = A x0
    QVec x0 = qvec_zero(c);
    for (int j = 0; j < c; ++j) x0[static_cast<size_t>(j)] = Rat(rng.range(-3, 3));
    auto sol = exactla::solve(a, a.apply(x0));
    REQUIRE(sol.has_value());
    CHECK(a.apply(*sol) == a.apply(x0));
  }
  // infeasible: 0 x = 1
  auto none = exactla::solve(SparseMatrix::zero(1, 2), QVec{Rat(1)});
  CHECK(!none.has_value());
}

TEST_CASE("reduction certificate reproduces the original rows exactly") {
  Prng rng(41);
  SparseMatrix m = random_matrix(rng, 5, 5, 60);
  exactla::Rref rr = exactla::row_space(m);
  // every original row must lie in the canonical row space, exactly
  for (const QVec& row : dense_rows(m)) CHECK(rr.contains(row));
  // and coordinates reassemble the row with exact arithmetic
  std::vector<QVec> basis = rr.q_rows();
  for (const QVec& row : dense_rows(m)) {
    auto coords = rr.coordinates(row);
    REQUIRE(coords.has_value());
    QVec back = qvec_zero(5);
    for (size_t k = 0; k < basis.size(); ++k)
      for (size_t j = 0; j < 5; ++j) back[j] += (*coords)[k] * basis[k][j];
    CHECK(back == row);
  }
}
