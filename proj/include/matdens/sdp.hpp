#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matdens/flag.hpp"
#include "matdens/fraction.hpp"
#include "matdens/symbol_matrix.hpp"

namespace matdens {

/// Shape of the flag-algebra program bounding f(Hstar) through r x c hosts.
struct SdpConfig {
  std::size_t r = 3;
  std::size_t c = 4;
  std::size_t flag_rows = 2;
  std::size_t flag_cols = 3;
  std::vector<SymbolMatrix> types = {SymbolMatrix::parse_inline("0 0"), SymbolMatrix::parse_inline("0 1"),
                                     SymbolMatrix::parse_inline("1 1"), SymbolMatrix::parse_inline("1 0")};
  /// Integer scales for densities (M) and joint densities (N); 0 picks the
  /// natural denominators C(r,h) C(c,h) and markings x subflag pairs.
  std::int64_t scale_M = 0;
  std::int64_t scale_N = 0;
  unsigned workers = 0;
};

/// How a problem was generated; stored as a comment line of the SDPA file.
struct SdpMetadata {
  SymbolMatrix hstar;
  std::size_t r = 0, c = 0, flag_rows = 0, flag_cols = 0;
  std::vector<SymbolMatrix> types;
  std::int64_t scale_M = 0, scale_N = 0;

  friend bool operator==(const SdpMetadata&, const SdpMetadata&) = default;
};

/// One upper-triangle nonzero. matrix 0 is C, matrix j is A_j; indices are 1-based.
struct SdpEntry {
  std::uint32_t matrix = 0;
  std::uint32_t block = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::int64_t value = 0;

  friend bool operator==(const SdpEntry&, const SdpEntry&) = default;
};

/// max tr(C X) subject to tr(A_j X) = a_j, X positive semidefinite, with
/// integer data. Negative block sizes denote diagonal blocks.
struct SdpProblem {
  std::vector<std::int64_t> block_sizes;
  std::vector<std::int64_t> a;
  std::vector<SdpEntry> entries;  // sorted by (matrix, block, i, j)
  std::optional<SdpMetadata> metadata;

  std::size_t m() const { return a.size(); }
  /// Scalar unknowns: n(n+1)/2 per full block, n per diagonal block.
  std::uint64_t variable_count() const;
  /// Scale M used in f_upper; 18 when the file carries no metadata.
  std::int64_t scale_M() const;

  friend bool operator==(const SdpProblem&, const SdpProblem&) = default;
};

/// One block per flag type plus a diagonal slack block of order m + 1.
/// Constraint j is host H_j (enumerate_matrices order): a_j = M (1 - d(Hstar, H_j)),
/// block i of A_j holds N * expected_joint over the type-i flags, and the
/// slack block has ones at [1,1] and [j+1,j+1]. C is the slack [1,1] unit.
SdpProblem assemble_sdp(const SymbolMatrix& Hstar, const SdpConfig& config = {});

/// SDPA sparse text: optional metadata comment, m, block count, block sizes,
/// the a vector, then "matrix block i j value" lines. Output is deterministic.
std::string to_sdpa(const SdpProblem& problem);
/// Accepts comment lines starting with '"' or '*' and the usual punctuation
/// "{}(),=". Coefficients must be integers.
SdpProblem parse_sdpa(const std::string& text);
void write_sdpa(const SdpProblem& problem, const std::string& path);
SdpProblem read_sdpa(const std::string& path);

/// Floating primal matrix X of a solver run, block by block.
struct FloatBlock {
  std::int64_t size = 0;        // negative for diagonal blocks
  std::vector<double> values;   // row-major n x n, or the n diagonal values
};

struct FloatSolution {
  std::vector<FloatBlock> blocks;
  std::vector<double> y;
  double objective = 0;          // tr(C X) recomputed from X
};

/// Parses the primal/dual solution layout: the y vector on the first line,
/// then "matrix block i j value" lines where matrix 1 is Z and 2 is X.
FloatSolution parse_solution(const std::string& text, const SdpProblem& problem);

struct SolverOptions {
  /// Executable invoked as `solver problem.dat-s solution.sol`. Empty falls
  /// back to the MATDENS_SOLVER environment variable.
  std::string solver_path;
  /// Directory for the problem, solution and log files; empty makes a temporary
  /// one that is removed after a successful run.
  std::string work_dir;
  /// Exit code 3 (partial success in CSDP) still yields a usable X.
  bool accept_partial = true;
};

std::string resolve_solver(const SolverOptions& options);

FloatSolution run_solver(const SdpProblem& problem, const SolverOptions& options);

struct CertificateEntry {
  std::uint32_t block = 0;
  std::uint32_t i = 0;  // 1-based, i >= j
  std::uint32_t j = 0;
  BigInt value;

  friend bool operator==(const CertificateEntry&, const CertificateEntry&) = default;
};

/// Integer lower-triangular L, block by block; the certified matrix is L L^T / D^2.
struct Certificate {
  BigInt D;
  std::vector<std::int64_t> block_sizes;
  std::vector<CertificateEntry> entries;  // sorted by (block, i, j)
  std::vector<std::uint32_t> ridged_blocks;   // blocks factored after adding the ridge
  std::uint64_t clamped_diagonals = 0;        // diagonal entries raised from <= 0 to 1

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

constexpr double kCholeskyRidge = 1e-10;

/// Floating Cholesky of every block, scaled by D and rounded to nearest.
/// A block that fails to factor is retried once with kCholeskyRidge * I.
Certificate round_certificate(const FloatSolution& solution, const BigInt& D = 1'000'000);

/// L = D * I on every block.
Certificate identity_certificate(const std::vector<std::int64_t>& block_sizes, const BigInt& D);

/// Text format: "D", then "nblocks s_1 ... s_k", then "block i j value"
/// lines for the nonzero entries with i >= j. Lines starting with '#' are comments.
std::string to_text(const Certificate& cert);
Certificate parse_certificate(const std::string& text);
void write_certificate(const Certificate& cert, const std::string& path);
Certificate read_certificate(const std::string& path);

struct VerificationReport {
  BigInt D;
  BigInt trCM;                          // tr(C L L^T)
  std::vector<ExactFraction> residuals; // b_j = tr(A_j L L^T) / D^2 - a_j
  ExactFraction epsilon;                // max |b_j|
  ExactFraction f_upper;                // (M - trCM / D^2 + epsilon) / M
  BigInt min_diagonal;
  std::int64_t scale_M = 0;
};

struct VerifyOptions {
  /// Accumulate every sum in the opposite order; the report must not change.
  bool reverse_order = false;
  unsigned workers = 0;
};

/// Exact check of a certificate: positive diagonal of L, then residuals and
/// the bound in integer arithmetic with one division by D^2 at the end.
/// Throws VerificationError on a nonpositive diagonal or shape mismatch.
VerificationReport verify_certificate(const SdpProblem& problem, const Certificate& cert,
                                      const VerifyOptions& options = {});

/// Bound with all multipliers zero: max_j d(Hstar, H_j), certified by the
/// exact slack solution t = min_j a_j (no solver, D = 1).
VerificationReport zero_multiplier_report(const SdpProblem& problem);

/// The flag blocks of L L^T scaled to the multipliers of the bound,
/// Q_i = (N / M) * block_i / D^2. Requires problem metadata.
std::vector<FlagQuadruple> certificate_multipliers(const SdpProblem& problem, const Certificate& cert);

struct PipelineOptions {
  SolverOptions solver;
  BigInt D = 1'000'000;
  /// Skip the solver and certify the zero-multiplier bound.
  bool zero_multipliers = false;
  /// Written when nonempty.
  std::string problem_out;
  std::string certificate_out;
};

struct PipelineResult {
  VerificationReport report;
  std::optional<Certificate> certificate;  // empty for the zero-multiplier bound
  double solver_objective = 0;
};

/// assemble -> write -> solve -> round -> verify.
PipelineResult pipeline(const SymbolMatrix& Hstar, const SdpConfig& config = {}, const PipelineOptions& options = {});

}  // namespace matdens
