#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/flag.hpp"
#include "matdens/sdp.hpp"
#include "matdens/search.hpp"
#include "oracles.hpp"

using namespace matdens;
namespace fs = std::filesystem;

namespace {
SymbolMatrix M(const char* s) { return SymbolMatrix::parse_inline(s); }

const SdpProblem& default_problem() {
  static const SdpProblem p = assemble_sdp(M("0 0;0 1"));
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "matdens-test-sdp";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_script(const std::string& name, const std::string& body) {
  const auto path = scratch(name);
  std::ofstream(path) << "#!/bin/sh\n" << body << "\n";
  fs::permissions(path, fs::perms::owner_all);
  return path.string();
}

// max tr(C X) s.t. tr(A_1 X) = 3 over one 2x2 block and a diagonal block of order 2.
SdpProblem tiny_problem() {
  SdpProblem p;
  p.block_sizes = {2, -2};
  p.a = {3};
  p.entries = {{0, 2, 1, 1, 1}, {1, 1, 1, 1, 1}, {1, 1, 1, 2, 1}, {1, 1, 2, 2, 2}, {1, 2, 1, 1, 1}, {1, 2, 2, 2, 1}};
  return p;
}
}  // namespace

TEST_CASE("default program shape") {
  const auto& p = default_problem();
  CHECK(p.m() == 4096);
  CHECK(p.block_sizes == std::vector<std::int64_t>{96, 96, 96, 96, -4097});
  CHECK(p.variable_count() == 22721);
  REQUIRE(p.metadata);
  CHECK(p.metadata->scale_M == 18);
  CHECK(p.metadata->scale_N == 72);
  CHECK(p.scale_M() == 18);

  // C is the slack [1,1] unit
  std::size_t c_entries = 0;
  for (const auto& e : p.entries)
    if (e.matrix == 0) {
      ++c_entries;
      CHECK(e == SdpEntry{0, 5, 1, 1, 1});
    }
  CHECK(c_entries == 1);

  // slack block of A_j: exactly [1,1] and [j+1,j+1], both 1
  std::vector<int> slack_hits(p.m() + 1, 0);
  for (const auto& e : p.entries) {
    CHECK(e.value != 0);
    CHECK(e.i <= e.j);
    if (e.matrix == 0 || e.block != 5) continue;
    CHECK(e.value == 1);
    CHECK(e.i == e.j);
    CHECK((e.i == 1 || e.i == e.matrix + 1));
    ++slack_hits[e.matrix];
  }
  for (std::size_t j = 1; j <= p.m(); ++j) CHECK(slack_hits[j] == 2);
}

TEST_CASE("default program coefficients") {
  const auto& p = default_problem();
  const auto hosts = enumerate_matrices(3, 4, 2);
  const auto H = M("0 0;0 1");
  for (std::size_t j = 0; j < p.m(); ++j) {
    const auto d = density(H, hosts[j]);
    CHECK(ExactFraction(static_cast<long>(p.a[j])) == ExactFraction(18) * (ExactFraction(1) - d));
    CHECK(p.a[j] >= 0);
    CHECK(p.a[j] <= 18);
  }
  CHECK(p.a[0] == 18);  // the all-zero host has no copy of (0 0;0 1)

  // block entries against direct averages of joint densities over markings
  const std::vector<FlagList> lists = {enumerate_flags(FlagType{M("0 0")}, 2, 3), enumerate_flags(FlagType{M("0 1")}, 2, 3),
                                       enumerate_flags(FlagType{M("1 1")}, 2, 3), enumerate_flags(FlagType{M("1 0")}, 2, 3)};
  oracle::Rng rng(17);
  std::size_t checked = 0;
  for (const auto& e : p.entries) {
    if (e.matrix == 0 || e.block == 5 || rng.below(800) != 0) continue;
    const auto& fl = lists[e.block - 1];
    const auto direct = expected_joint(fl[e.i - 1], fl[e.j - 1], hosts[e.matrix - 1]);
    CHECK(ExactFraction(static_cast<long>(e.value)) == ExactFraction(72) * direct);
    ++checked;
  }
  CHECK(checked > 100);
  // a zero entry stays zero: a host with no flags of type (0 0) in any marking
  const std::size_t all_ones = p.m();
  for (const auto& e : p.entries)
    if (e.matrix == all_ones) CHECK(e.block != 1);
}

TEST_CASE("dimension conditions") {
  SdpConfig small;
  small.r = 2;
  CHECK_THROWS_AS(assemble_sdp(M("0 0;0 1"), small), DimensionError);
  CHECK_THROWS_AS(assemble_sdp(M("0 0 0;0 1 1;0 0 0;1 1 1"), SdpConfig{}), DimensionError);
}

TEST_CASE("SDPA round trip") {
  const auto& p = default_problem();
  const std::string text = to_sdpa(p);
  const auto back = parse_sdpa(text);
  CHECK(back == p);
  CHECK(to_sdpa(back) == text);
  CHECK(text.rfind("\"matdens hstar=0 0;0 1 r=3 c=4 flags=2x3 types=0 0,0 1,1 1,1 0 M=18 N=72\n4096\n5\n96 96 96 96 -4097\n", 0) == 0);

  const auto path = scratch("default.dat-s").string();
  write_sdpa(p, path);
  CHECK(read_sdpa(path) == p);
  CHECK_THROWS_AS(read_sdpa(scratch("missing.dat-s").string()), IoError);
}

TEST_CASE("SDPA parser") {
  const std::string decorated =
      "\"a comment\n* another\n1 = mDIM\n2 = nBLOCK\n(2, -2) = bLOCKsTRUCT\n{3}\n"
      "0 2 1 1 1.0\n1 1 2 1 1\n1 1 1 1 1\n1 1 2 2 2\n1 2 1 1 1\n1 2 2 2 1\n1 1 1 2 0\n";
  const auto p = parse_sdpa(decorated);
  CHECK(p == tiny_problem());
  CHECK_FALSE(p.metadata);
  CHECK(p.scale_M() == 18);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n3\n1 1 1 1 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n3\n1 1 1 3 1\n"), ParseError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n-2\n3\n1 1 1 2 1\n"), ParseError);
  CHECK_THROWS_AS(parse_sdpa("1\n2\n2\n3\n"), ParseError);
  CHECK_THROWS_AS(parse_sdpa("garbage"), ParseError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n3\n1 1 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_sdpa("1\n1\n2\n3\n1 1 1 1 1\n1 1 1 1 2\n"), ParseError);
}

TEST_CASE("identity certificate") {
  const auto& p = default_problem();
  const BigInt D = 1000;
  const auto cert = identity_certificate(p.block_sizes, D);
  const auto rep = verify_certificate(p, cert);

  // X = L L^T / D^2 = I: tr(C X) = 1 and b_j = tr(A_j) - a_j
  CHECK(rep.trCM == D * D);
  CHECK(rep.min_diagonal == D);
  const auto hosts = enumerate_matrices(3, 4, 2);
  const std::vector<FlagList> lists = {enumerate_flags(FlagType{M("0 0")}, 2, 3), enumerate_flags(FlagType{M("0 1")}, 2, 3),
                                       enumerate_flags(FlagType{M("1 1")}, 2, 3), enumerate_flags(FlagType{M("1 0")}, 2, 3)};
  oracle::Rng rng(5);
  for (int t = 0; t < 6; ++t) {
    const std::size_t j = rng.below(p.m());
    ExactFraction trace(2);  // slack [1,1] and [j+1,j+1]
    for (const auto& fl : lists)
      for (std::size_t u = 0; u < fl.size(); ++u) trace += ExactFraction(72) * expected_joint(fl[u], fl[u], hosts[j]);
    CHECK(rep.residuals[j] == trace - ExactFraction(static_cast<long>(p.a[j])));
  }
  ExactFraction eps;
  for (const auto& b : rep.residuals) eps = std::max(eps, b.abs());
  CHECK(rep.epsilon == eps);
  CHECK(rep.f_upper == (ExactFraction(18) - ExactFraction(1) + eps) / ExactFraction(18));
}

TEST_CASE("verification is exact and order independent") {
  const auto& p = default_problem();
  oracle::Rng rng(23);
  Certificate cert = identity_certificate(p.block_sizes, BigInt(1'000'000));
  // perturb the flag blocks with integer lower-triangular noise
  for (std::uint32_t b = 1; b <= 4; ++b)
    for (std::uint32_t i = 2; i <= 96; ++i)
      for (std::uint32_t j = 1; j < i; ++j)
        if (rng.below(30) == 0) cert.entries.push_back({b, i, j, BigInt(static_cast<long>(rng.below(2001)) - 1000)});
  const auto text = to_text(cert);
  const auto parsed = parse_certificate(text);  // sorts and rejects duplicates
  VerifyOptions fwd, rev;
  rev.reverse_order = true;
  fwd.workers = 1;
  rev.workers = 3;
  const auto a = verify_certificate(p, parsed, fwd);
  const auto b = verify_certificate(p, parsed, rev);
  CHECK(a.trCM == b.trCM);
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.f_upper == b.f_upper);
  CHECK(a.residuals == b.residuals);
}

TEST_CASE("certificate rejection") {
  const auto& p = default_problem();
  auto cert = identity_certificate(p.block_sizes, BigInt(10));
  auto bad = cert;
  bad.entries[5].value = 0;
  CHECK_THROWS_AS(verify_certificate(p, bad), VerificationError);
  bad.entries[5].value = -3;
  CHECK_THROWS_AS(verify_certificate(p, bad), VerificationError);
  bad = cert;
  bad.entries.erase(bad.entries.begin() + 7);
  CHECK_THROWS_AS(verify_certificate(p, bad), VerificationError);
  bad = cert;
  bad.block_sizes[0] = 95;
  CHECK_THROWS_AS(verify_certificate(p, bad), VerificationError);
  bad = cert;
  bad.entries.push_back({1, 1, 2, BigInt(1)});
  CHECK_THROWS_AS(verify_certificate(p, bad), VerificationError);
  bad = cert;
  bad.entries.push_back({5, 3, 2, BigInt(1)});
  CHECK_THROWS_AS(verify_certificate(p, bad), VerificationError);
}

TEST_CASE("certificate text format") {
  Certificate cert = identity_certificate({2, -3}, BigInt(7));
  cert.entries.insert(cert.entries.begin() + 1, {1, 2, 1, BigInt(-4)});
  cert.ridged_blocks = {1};
  cert.clamped_diagonals = 2;
  const auto text = to_text(cert);
  CHECK(text == "# ridge 1e-10 added to blocks 1\n# diagonal entries raised to 1: 2\n7\n2 2 -3\n1 1 1 7\n1 2 1 -4\n1 2 2 7\n2 1 1 7\n2 2 2 7\n2 3 3 7\n");
  CHECK(parse_certificate(text) == cert);
  const auto path = scratch("c.cert").string();
  write_certificate(cert, path);
  CHECK(read_certificate(path) == cert);
  CHECK_THROWS_AS(parse_certificate("7\n"), ParseError);
  CHECK_THROWS_AS(parse_certificate("7\n1 2\n1 1 1 x\n"), ParseError);
  CHECK_THROWS_AS(parse_certificate("7\n1 2\n1 1 1 1\n1 1 1 2\n"), ParseError);
}

TEST_CASE("rounding") {
  FloatSolution sol;
  sol.blocks = {{2, {1, 0, 0, 1}}, {-3, {1, 4, 0}}};
  auto cert = round_certificate(sol, BigInt(1000));
  CHECK(cert.D == 1000);
  CHECK(cert.block_sizes == std::vector<std::int64_t>{2, -3});
  CHECK(cert.entries == std::vector<CertificateEntry>{{1, 1, 1, BigInt(1000)}, {1, 2, 2, BigInt(1000)}, {2, 1, 1, BigInt(1000)},
                                                       {2, 2, 2, BigInt(2000)}, {2, 3, 3, BigInt(1)}});
  CHECK(cert.ridged_blocks == std::vector<std::uint32_t>{2});
  CHECK(cert.clamped_diagonals == 1);

  // the Cholesky factor of (4 2;2 2) is (2 0;1 1)
  sol.blocks = {{2, {4, 2, 2, 2}}};
  cert = round_certificate(sol, BigInt(10));
  CHECK(cert.entries == std::vector<CertificateEntry>{{1, 1, 1, BigInt(20)}, {1, 2, 1, BigInt(10)}, {1, 2, 2, BigInt(10)}});
  CHECK(cert.ridged_blocks.empty());

  // singular PSD: factorable only with the ridge; the tiny pivot rounds to zero and is raised to 1
  sol.blocks = {{2, {1, 1, 1, 1}}};
  cert = round_certificate(sol, BigInt(100));
  CHECK(cert.ridged_blocks == std::vector<std::uint32_t>{1});
  CHECK(cert.clamped_diagonals == 1);

  sol.blocks = {{2, {1, 2, 2, 1}}};
  CHECK_THROWS_AS(round_certificate(sol, BigInt(100)), VerificationError);
  sol.blocks = {{-1, {-1}}};
  CHECK_THROWS_AS(round_certificate(sol, BigInt(100)), VerificationError);
}

TEST_CASE("solution parsing") {
  const auto p = tiny_problem();
  const auto sol = parse_solution("0.5\n1 1 1 1 9.0\n2 1 1 1 1.0\n2 1 1 2 0.5\n2 1 2 2 0.25\n2 2 1 1 0.75\n2 2 2 2 2\n", p);
  CHECK(sol.y == std::vector<double>{0.5});
  CHECK(sol.blocks[0].values == std::vector<double>{1.0, 0.5, 0.5, 0.25});
  CHECK(sol.blocks[1].values == std::vector<double>{0.75, 2});
  CHECK(sol.objective == 0.75);
  CHECK_THROWS_AS(parse_solution("", p), ParseError);
  CHECK_THROWS_AS(parse_solution("0.5 0.2\n", p), ParseError);
  CHECK_THROWS_AS(parse_solution("0.5\n2 1 1 1 nan\n", p), ParseError);
  CHECK_THROWS_AS(parse_solution("0.5\n2 3 1 1 1\n", p), ParseError);
  CHECK_THROWS_AS(parse_solution("0.5\n2 2 1 2 1\n", p), ParseError);
  CHECK_THROWS_AS(parse_solution("0.5\n2 1 1 1\n", p), ParseError);
}

TEST_CASE("solver adapter errors") {
  const auto p = tiny_problem();
  SolverOptions o;
  o.work_dir = scratch("run").string();
  o.solver_path = scratch("no-such-solver").string();
  try {
    run_solver(p, o);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::kMissingBinary);
  }

  o.solver_path = write_script("fails.sh", "exit 1");
  try {
    run_solver(p, o);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::kNonzeroExit);
  }

  o.solver_path = write_script("garbage.sh", "echo 'not a solution' > \"$2\"");
  try {
    run_solver(p, o);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::kUnparseableOutput);
  }

  o.solver_path = write_script("silent.sh", "exit 0");
  try {
    run_solver(p, o);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::kUnparseableOutput);
  }

  // a stub that writes a fixed solution, with CSDP's partial-success status
  o.solver_path = write_script("stub.sh",
                               "printf '0.5\\n2 1 1 1 1\\n2 1 2 2 1\\n2 2 1 1 2\\n2 2 2 2 1\\n' > \"$2\"; exit 3");
  const auto sol = run_solver(p, o);
  CHECK(sol.objective == 2);
  o.accept_partial = false;
  CHECK_THROWS_AS(run_solver(p, o), SolverError);

  SolverOptions none;
  const char* saved = std::getenv("MATDENS_SOLVER");
  const std::string keep = saved ? saved : "";
  ::unsetenv("MATDENS_SOLVER");
  CHECK_THROWS_WITH_AS(resolve_solver(none), doctest::Contains("MATDENS_SOLVER"), SolverError);
  if (saved) ::setenv("MATDENS_SOLVER", keep.c_str(), 1);
}

TEST_CASE("zero-multiplier bound") {
  const auto& p = default_problem();
  const auto H = M("0 0;0 1");
  const auto rep = zero_multiplier_report(p);
  const auto direct = flag_bound(H, 3, 4, {});
  CHECK(rep.f_upper == direct.value);
  CHECK(rep.epsilon == ExactFraction(0));
  // double counting gives d(H, M) <= f_upper for every host of order >= 4; smaller hosts escape it
  for (std::size_t n = 4; n <= 5; ++n) CHECK(rep.f_upper >= f_exact(H, n).best_value);
  CHECK(f_exact(H, 3).best_value > rep.f_upper);
  CHECK(rep.f_upper.to_double() > 2 * std::exp(-2.0));

  PipelineOptions po;
  po.zero_multipliers = true;
  const auto res = pipeline(H, SdpConfig{}, po);
  CHECK(res.report.f_upper == rep.f_upper);
  CHECK_FALSE(res.certificate);
}

TEST_CASE("certified multipliers bound the flag objective") {
  // For any certificate: d_j + c_H(Q) = 1 - (t + s_j - b_j) / M <= f_upper since s_j >= 0.
  const auto& p = default_problem();
  oracle::Rng rng(8);
  Certificate cert = identity_certificate(p.block_sizes, BigInt(1000));
  for (auto& e : cert.entries) {
    if (e.block == 5) e.value = BigInt(e.i == 1 ? 3000 : 100);
    if (e.block <= 4) e.value = BigInt(static_cast<long>(1 + rng.below(40)));
  }
  const auto rep = verify_certificate(p, cert);
  const auto quads = certificate_multipliers(p, cert);
  REQUIRE(quads.size() == 4);
  CHECK(quads[0].Q.size() == 96);
  const auto bound = flag_bound(M("0 0;0 1"), 3, 4, quads);
  CHECK(bound.value <= rep.f_upper);
}
