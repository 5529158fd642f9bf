#include "matdens/sdp.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/parallel.hpp"

extern char** environ;

namespace matdens {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path);
}

std::int64_t checked_int(const ExactFraction& value, const char* what) {
  if (value.denominator() != 1 || !value.numerator().fits_slong_p())
    throw DomainError(std::string("assemble_sdp: ") + what + " is not an integer: " + value.to_string());
  return value.numerator().get_si();
}

bool is_blank_or_comment(const std::string& line, const char* comment_chars) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || std::strchr(comment_chars, line[p]) != nullptr;
}

std::vector<std::string> tokens_of(std::string line) {
  for (char& ch : line)
    if (std::strchr("{}(),=", ch)) ch = ' ';
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

bool parse_int(const std::string& token, std::int64_t& out) {
  const char* end = token.data() + token.size();
  auto [p, ec] = std::from_chars(token.data(), end, out);
  if (ec == std::errc() && p == end) return true;
  // integral values written in floating notation, e.g. "18.0" or "1e+00"
  char* stop = nullptr;
  const double d = std::strtod(token.c_str(), &stop);
  if (stop != token.c_str() + token.size() || !std::isfinite(d) || std::floor(d) != d || std::fabs(d) > 9e15)
    return false;
  out = static_cast<std::int64_t>(d);
  return true;
}

std::int64_t require_int(const std::string& token, const char* what) {
  std::int64_t v = 0;
  if (!parse_int(token, v)) throw ParseError(std::string(what) + ": expected an integer, got '" + token + "'");
  return v;
}

double require_double(const std::string& token, const char* what) {
  char* stop = nullptr;
  const double d = std::strtod(token.c_str(), &stop);
  if (token.empty() || stop != token.c_str() + token.size() || !std::isfinite(d))
    throw ParseError(std::string(what) + ": expected a finite number, got '" + token + "'");
  return d;
}

std::string metadata_line(const SdpMetadata& md) {
  std::string types;
  for (std::size_t i = 0; i < md.types.size(); ++i) types += (i ? "," : "") + md.types[i].to_inline();
  return "\"matdens hstar=" + md.hstar.to_inline() + " r=" + std::to_string(md.r) + " c=" + std::to_string(md.c) +
         " flags=" + std::to_string(md.flag_rows) + "x" + std::to_string(md.flag_cols) + " types=" + types +
         " M=" + std::to_string(md.scale_M) + " N=" + std::to_string(md.scale_N);
}

std::optional<SdpMetadata> parse_metadata(const std::string& line) {
  static const std::regex re(
      R"(^\s*"matdens hstar=([0-9 ;]+) r=(\d+) c=(\d+) flags=(\d+)x(\d+) types=([0-9 ;,]+) M=(\d+) N=(\d+)\s*$)");
  std::smatch mt;
  if (!std::regex_match(line, mt, re)) return std::nullopt;
  SdpMetadata md;
  md.hstar = SymbolMatrix::parse_inline(mt[1]);
  md.r = std::stoul(mt[2]);
  md.c = std::stoul(mt[3]);
  md.flag_rows = std::stoul(mt[4]);
  md.flag_cols = std::stoul(mt[5]);
  std::istringstream ts(mt[6]);
  for (std::string t; std::getline(ts, t, ',');) md.types.push_back(SymbolMatrix::parse_inline(t));
  md.scale_M = std::stoll(mt[7]);
  md.scale_N = std::stoll(mt[8]);
  return md;
}

std::size_t block_order(std::int64_t size) { return static_cast<std::size_t>(size < 0 ? -size : size); }

// Offsets of each matrix's entries in the sorted entry list.
std::vector<std::size_t> matrix_offsets(const SdpProblem& p) {
  std::vector<std::size_t> off(p.m() + 2, 0);
  for (const auto& e : p.entries) ++off[e.matrix + 1];
  std::partial_sum(off.begin(), off.end(), off.begin());
  return off;
}

// Dense symmetric block of L L^T (full for diagonal blocks too, only the diagonal is filled).
struct ExactBlock {
  std::size_t n = 0;
  bool diagonal = false;
  std::vector<BigInt> values;

  const BigInt& at(std::size_t i, std::size_t j) const { return diagonal ? values[i] : values[i * n + j]; }
};

std::vector<ExactBlock> gram_blocks(const Certificate& cert, bool reverse) {
  std::vector<ExactBlock> out(cert.block_sizes.size());
  std::vector<std::vector<BigInt>> L(cert.block_sizes.size());
  for (std::size_t b = 0; b < cert.block_sizes.size(); ++b) {
    out[b].n = block_order(cert.block_sizes[b]);
    out[b].diagonal = cert.block_sizes[b] < 0;
    L[b].assign(out[b].diagonal ? out[b].n : out[b].n * out[b].n, BigInt(0));
  }
  for (const auto& e : cert.entries) {
    auto& blk = out[e.block - 1];
    L[e.block - 1][blk.diagonal ? e.i - 1 : (e.i - 1) * blk.n + (e.j - 1)] = e.value;
  }
  for (std::size_t b = 0; b < out.size(); ++b) {
    auto& blk = out[b];
    const auto& l = L[b];
    const std::size_t n = blk.n;
    if (blk.diagonal) {
      blk.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) blk.values[i] = l[i] * l[i];
      continue;
    }
    blk.values.assign(n * n, BigInt(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        BigInt s = 0;
        if (reverse) {
          for (std::size_t k = j + 1; k-- > 0;) s += l[i * n + k] * l[j * n + k];
        } else {
          for (std::size_t k = 0; k <= j; ++k) s += l[i * n + k] * l[j * n + k];
        }
        blk.values[i * n + j] = s;
        blk.values[j * n + i] = s;
      }
  }
  return out;
}

BigInt trace_product(const SdpProblem& p, const std::vector<std::size_t>& off, std::size_t matrix,
                     const std::vector<ExactBlock>& G, bool reverse) {
  BigInt s = 0;
  auto add = [&](const SdpEntry& e) {
    const BigInt& g = G[e.block - 1].at(e.i - 1, e.j - 1);
    s += BigInt(static_cast<long>(e.value)) * g * (e.i == e.j ? 1 : 2);
  };
  if (reverse) {
    for (std::size_t k = off[matrix + 1]; k-- > off[matrix];) add(p.entries[k]);
  } else {
    for (std::size_t k = off[matrix]; k < off[matrix + 1]; ++k) add(p.entries[k]);
  }
  return s;
}

void check_shape(const SdpProblem& p, const Certificate& cert) {
  if (cert.block_sizes != p.block_sizes) throw VerificationError("certificate block sizes do not match the problem");
  if (cert.D <= 0) throw VerificationError("certificate scale D must be positive");
  for (const auto& e : cert.entries) {
    if (e.block < 1 || e.block > cert.block_sizes.size())
      throw VerificationError("certificate entry in block " + std::to_string(e.block) + " out of range");
    const auto sz = cert.block_sizes[e.block - 1];
    if (e.j < 1 || e.i < e.j || e.i > block_order(sz))
      throw VerificationError("certificate entry (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                              ") not lower-triangular within block " + std::to_string(e.block));
    if (sz < 0 && e.i != e.j)
      throw VerificationError("off-diagonal certificate entry in diagonal block " + std::to_string(e.block));
  }
}

}  // namespace

std::uint64_t SdpProblem::variable_count() const {
  std::uint64_t total = 0;
  for (auto s : block_sizes) {
    const std::uint64_t n = block_order(s);
    total += s < 0 ? n : n * (n + 1) / 2;
  }
  return total;
}

std::int64_t SdpProblem::scale_M() const { return metadata ? metadata->scale_M : 18; }

SdpProblem assemble_sdp(const SymbolMatrix& Hstar, const SdpConfig& config) {
  if (Hstar.empty() || Hstar.rows() > config.r || Hstar.cols() > config.c)
    throw DimensionError("assemble_sdp: pattern does not fit in the host size");
  if (config.types.empty()) throw DimensionError("assemble_sdp: no flag types");
  std::vector<FlagList> lists;
  for (const auto& sigma : config.types) {
    const FlagType type{sigma};
    if (config.flag_rows < type.a() || config.flag_cols < type.b() ||
        config.r < 2 * config.flag_rows - type.a() || config.c < 2 * config.flag_cols - type.b())
      throw DimensionError("assemble_sdp: host " + std::to_string(config.r) + "x" + std::to_string(config.c) +
                           " cannot hold two disjoint flags of type (" + sigma.to_inline() + ")");
    lists.emplace_back(type, config.flag_rows, config.flag_cols, 2);
  }

  const BigInt natural_M = binomial(config.r, Hstar.rows()) * binomial(config.c, Hstar.cols());
  const std::int64_t M = config.scale_M ? config.scale_M : natural_M.get_si();
  std::int64_t N = config.scale_N;
  if (!N) {
    N = 1;
    for (const auto& fl : lists) {
      const auto& t = fl.type();
      const std::uint64_t den = binomial_u64(config.r, t.a()) * binomial_u64(config.c, t.b()) *
                                subflag_pair_count(config.r, config.c, fl.r(), fl.c(), t.a(), t.b());
      N = std::lcm(N, static_cast<std::int64_t>(den));
    }
  }
  if (M <= 0 || N <= 0) throw DomainError("assemble_sdp: scales must be positive");

  const auto hosts = enumerate_matrices(config.r, config.c, 2);
  const std::size_t m = hosts.size();
  const auto slack = static_cast<std::uint32_t>(lists.size() + 1);

  SdpProblem p;
  for (const auto& fl : lists) p.block_sizes.push_back(static_cast<std::int64_t>(fl.size()));
  p.block_sizes.push_back(-static_cast<std::int64_t>(m + 1));
  p.a.resize(m);
  p.metadata = SdpMetadata{Hstar, config.r, config.c, config.flag_rows, config.flag_cols, config.types, M, N};

  std::vector<std::vector<SdpEntry>> rows(m);
  parallel_for(m, config.workers, [&](std::size_t j) {
    const auto mj = static_cast<std::uint32_t>(j + 1);
    p.a[j] = checked_int(ExactFraction(M) * (ExactFraction(1) - density(Hstar, hosts[j])), "a_j");
    auto& out = rows[j];
    for (std::size_t b = 0; b < lists.size(); ++b) {
      const auto table = expected_joint_table(lists[b], hosts[j]);
      for (const auto& [uv, count] : table.counts) {
        const auto [u, v] = uv;
        if (u > v) continue;
        const auto mirror = table.counts.find({v, u});
        if (mirror == table.counts.end() || mirror->second != count)
          throw DomainError("assemble_sdp: joint table is not symmetric");
        const ExactFraction value = ExactFraction(N) * ExactFraction(BigInt(static_cast<unsigned long>(count)),
                                                                     BigInt(static_cast<unsigned long>(table.denominator)));
        out.push_back({mj, static_cast<std::uint32_t>(b + 1), static_cast<std::uint32_t>(u + 1),
                       static_cast<std::uint32_t>(v + 1), checked_int(value, "scaled joint density")});
      }
    }
    out.push_back({mj, slack, 1, 1, 1});
    out.push_back({mj, slack, mj + 1, mj + 1, 1});
  });

  p.entries.push_back({0, slack, 1, 1, 1});
  for (auto& r : rows) p.entries.insert(p.entries.end(), r.begin(), r.end());
  return p;
}

std::string to_sdpa(const SdpProblem& p) {
  std::string s;
  s.reserve(p.entries.size() * 20 + p.a.size() * 4);
  if (p.metadata) s += metadata_line(*p.metadata) + "\n";
  s += std::to_string(p.m()) + "\n" + std::to_string(p.block_sizes.size()) + "\n";
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) s += (b ? " " : "") + std::to_string(p.block_sizes[b]);
  s += "\n";
  for (std::size_t j = 0; j < p.a.size(); ++j) s += (j ? " " : "") + std::to_string(p.a[j]);
  s += "\n";
  for (const auto& e : p.entries) {
    s += std::to_string(e.matrix);
    s += ' ';
    s += std::to_string(e.block);
    s += ' ';
    s += std::to_string(e.i);
    s += ' ';
    s += std::to_string(e.j);
    s += ' ';
    s += std::to_string(e.value);
    s += '\n';
  }
  return s;
}

SdpProblem parse_sdpa(const std::string& text) {
  SdpProblem p;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;  // first token of the m and block-count lines, then the block line
  std::vector<std::string> rest;
  int stage = 0;
  while (std::getline(in, line)) {
    if (stage == 0 && is_blank_or_comment(line, "\"*")) {
      if (!p.metadata) p.metadata = parse_metadata(line);
      continue;
    }
    if (is_blank_or_comment(line, "\"*")) continue;
    auto t = tokens_of(line);
    if (stage < 2) {
      header.push_back(t.at(0));
      ++stage;
    } else if (stage == 2) {
      for (const auto& tok : t) {
        std::int64_t v = 0;
        if (!parse_int(tok, v)) break;
        p.block_sizes.push_back(v);
      }
      ++stage;
    } else {
      rest.insert(rest.end(), t.begin(), t.end());
    }
  }
  if (stage < 3) throw ParseError("SDPA: missing header lines");
  const std::int64_t m = require_int(header[0], "SDPA constraint count");
  const std::int64_t nblocks = require_int(header[1], "SDPA block count");
  if (m < 0 || nblocks <= 0 || static_cast<std::int64_t>(p.block_sizes.size()) != nblocks)
    throw ParseError("SDPA: block structure does not match the declared block count");
  for (auto b : p.block_sizes)
    if (b == 0) throw ParseError("SDPA: zero block size");
  if (static_cast<std::int64_t>(rest.size()) < m) throw ParseError("SDPA: objective vector too short");
  p.a.resize(static_cast<std::size_t>(m));
  for (std::int64_t j = 0; j < m; ++j) p.a[j] = require_int(rest[j], "SDPA objective vector");
  if ((rest.size() - m) % 5 != 0) throw ParseError("SDPA: entry lines must have five fields");
  for (std::size_t k = m; k < rest.size(); k += 5) {
    SdpEntry e;
    const auto mat = require_int(rest[k], "SDPA matrix number");
    const auto blk = require_int(rest[k + 1], "SDPA block number");
    auto i = require_int(rest[k + 2], "SDPA row index");
    auto j = require_int(rest[k + 3], "SDPA column index");
    e.value = require_int(rest[k + 4], "SDPA coefficient");
    if (mat < 0 || mat > m || blk < 1 || blk > nblocks) throw ParseError("SDPA: entry refers to a missing matrix or block");
    if (i > j) std::swap(i, j);
    const auto order = static_cast<std::int64_t>(block_order(p.block_sizes[blk - 1]));
    if (i < 1 || j > order) throw ParseError("SDPA: entry index outside its block");
    if (p.block_sizes[blk - 1] < 0 && i != j) throw ParseError("SDPA: off-diagonal entry in a diagonal block");
    e.matrix = static_cast<std::uint32_t>(mat);
    e.block = static_cast<std::uint32_t>(blk);
    e.i = static_cast<std::uint32_t>(i);
    e.j = static_cast<std::uint32_t>(j);
    if (e.value != 0) p.entries.push_back(e);
  }
  auto key = [](const SdpEntry& e) { return std::tie(e.matrix, e.block, e.i, e.j); };
  std::stable_sort(p.entries.begin(), p.entries.end(), [&](const SdpEntry& x, const SdpEntry& y) { return key(x) < key(y); });
  for (std::size_t k = 1; k < p.entries.size(); ++k)
    if (key(p.entries[k]) == key(p.entries[k - 1])) throw ParseError("SDPA: duplicate entry");
  return p;
}

void write_sdpa(const SdpProblem& problem, const std::string& path) { write_file(path, to_sdpa(problem)); }

SdpProblem read_sdpa(const std::string& path) { return parse_sdpa(read_file(path)); }

FloatSolution parse_solution(const std::string& text, const SdpProblem& problem) {
  FloatSolution sol;
  for (auto s : problem.block_sizes) {
    const std::size_t n = block_order(s);
    sol.blocks.push_back({s, std::vector<double>(s < 0 ? n : n * n, 0.0)});
  }
  std::istringstream in(text);
  std::string line;
  bool have_y = false;
  while (std::getline(in, line)) {
    const auto t = tokens_of(line);
    if (t.empty()) continue;
    if (!have_y) {
      for (const auto& tok : t) sol.y.push_back(require_double(tok, "solution y vector"));
      if (sol.y.size() != problem.m())
        throw ParseError("solution: y has " + std::to_string(sol.y.size()) + " entries, expected " +
                         std::to_string(problem.m()));
      have_y = true;
      continue;
    }
    if (t.size() != 5) throw ParseError("solution: expected 'matrix block i j value', got '" + line + "'");
    const auto mat = require_int(t[0], "solution matrix number");
    const auto blk = require_int(t[1], "solution block number");
    auto i = require_int(t[2], "solution row index");
    auto j = require_int(t[3], "solution column index");
    const double v = require_double(t[4], "solution value");
    if (mat != 1 && mat != 2) throw ParseError("solution: matrix number must be 1 (Z) or 2 (X)");
    if (blk < 1 || blk > static_cast<std::int64_t>(sol.blocks.size())) throw ParseError("solution: block out of range");
    auto& B = sol.blocks[blk - 1];
    const auto n = static_cast<std::int64_t>(block_order(B.size));
    if (i < 1 || j < 1 || i > n || j > n) throw ParseError("solution: index outside its block");
    if (mat != 2) continue;
    if (B.size < 0) {
      if (i != j) throw ParseError("solution: off-diagonal entry in a diagonal block");
      B.values[i - 1] = v;
    } else {
      B.values[(i - 1) * n + (j - 1)] = v;
      B.values[(j - 1) * n + (i - 1)] = v;
    }
  }
  if (!have_y) throw ParseError("solution: empty file");
  for (const auto& e : problem.entries) {
    if (e.matrix != 0) break;
    const auto& B = sol.blocks[e.block - 1];
    const std::size_t n = block_order(B.size);
    const double x = B.size < 0 ? B.values[e.i - 1] : B.values[(e.i - 1) * n + (e.j - 1)];
    sol.objective += static_cast<double>(e.value) * x * (e.i == e.j ? 1 : 2);
  }
  return sol;
}

std::string resolve_solver(const SolverOptions& options) {
  std::string path = options.solver_path;
  if (path.empty()) {
    const char* env = std::getenv("MATDENS_SOLVER");
    if (env) path = env;
  }
  if (path.empty())
    throw SolverError(SolverError::Kind::kMissingBinary,
                      "no SDP solver configured: pass --solver or set MATDENS_SOLVER to an executable "
                      "invoked as `solver problem.dat-s solution.sol`");
  if (path.find('/') == std::string::npos) {
    const char* env_path = std::getenv("PATH");
    std::istringstream dirs(env_path ? env_path : "");
    for (std::string dir; std::getline(dirs, dir, ':');) {
      const fs::path candidate = fs::path(dir.empty() ? "." : dir) / path;
      if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
    }
  } else if (::access(path.c_str(), X_OK) == 0) {
    return path;
  }
  throw SolverError(SolverError::Kind::kMissingBinary,
                    "SDP solver '" + path + "' is not an executable file (check --solver / MATDENS_SOLVER)");
}

FloatSolution run_solver(const SdpProblem& problem, const SolverOptions& options) {
  const std::string solver = resolve_solver(options);
  fs::path dir = options.work_dir;
  if (dir.empty()) {
    std::string tmpl = (fs::temp_directory_path() / "matdens-sdp-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw IoError("cannot create a temporary directory");
    dir = tmpl;
  } else {
    fs::create_directories(dir);
  }
  const std::string in = (dir / "problem.dat-s").string();
  const std::string out = (dir / "solution.sol").string();
  const std::string log = (dir / "solver.log").string();
  write_sdpa(problem, in);
  fs::remove(out);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  std::vector<char*> argv = {const_cast<char*>(solver.c_str()), const_cast<char*>(in.c_str()),
                             const_cast<char*>(out.c_str()), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, solver.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw SolverError(SolverError::Kind::kMissingBinary, "cannot start SDP solver '" + solver + "'");
  int status = 0;
  if (::waitpid(pid, &status, 0) < 0) throw SolverError(SolverError::Kind::kNonzeroExit, "waitpid failed");
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (code != 0 && !(options.accept_partial && code == 3))
    throw SolverError(SolverError::Kind::kNonzeroExit,
                      "SDP solver exited with status " + std::to_string(code) + "; see " + log);
  std::string text;
  try {
    text = read_file(out);
  } catch (const IoError&) {
    throw SolverError(SolverError::Kind::kUnparseableOutput, "SDP solver wrote no solution file " + out);
  }
  FloatSolution solution;
  try {
    solution = parse_solution(text, problem);
  } catch (const ParseError& e) {
    throw SolverError(SolverError::Kind::kUnparseableOutput, std::string("SDP solution unreadable: ") + e.what());
  }
  // a temporary directory is kept on failure so the solver log stays readable
  if (options.work_dir.empty()) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  return solution;
}

Certificate round_certificate(const FloatSolution& solution, const BigInt& D) {
  if (D <= 0) throw DomainError("round_certificate: D must be positive");
  const double scale = D.get_d();
  Certificate cert;
  cert.D = D;
  auto rounded = [&](double x) {
    BigInt v;
    mpz_set_d(v.get_mpz_t(), std::nearbyint(x * scale));
    return v;
  };
  for (std::size_t b = 0; b < solution.blocks.size(); ++b) {
    const auto& B = solution.blocks[b];
    const auto blk = static_cast<std::uint32_t>(b + 1);
    const std::size_t n = block_order(B.size);
    cert.block_sizes.push_back(B.size);
    if (B.size < 0) {
      bool ridged = false;
      for (std::size_t i = 0; i < n; ++i) {
        double x = B.values[i];
        if (!(x > 0)) {
          x += kCholeskyRidge;
          ridged = true;
        }
        if (!(x > 0)) throw VerificationError("round_certificate: negative diagonal in block " + std::to_string(blk));
        BigInt v = rounded(std::sqrt(x));
        if (v <= 0) {
          v = 1;
          ++cert.clamped_diagonals;
        }
        cert.entries.push_back({blk, static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(i + 1), v});
      }
      if (ridged) cert.ridged_blocks.push_back(blk);
      continue;
    }
    Eigen::MatrixXd X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        B.values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    X = (0.5 * (X + X.transpose())).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) {
      X += kCholeskyRidge * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      llt.compute(X);
      if (llt.info() != Eigen::Success)
        throw VerificationError("round_certificate: block " + std::to_string(blk) +
                                " is not positive definite even after the ridge");
      cert.ridged_blocks.push_back(blk);
    }
    const Eigen::MatrixXd L = llt.matrixL();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        BigInt v = rounded(L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        if (i == j && v <= 0) {
          v = 1;
          ++cert.clamped_diagonals;
        }
        if (v != 0)
          cert.entries.push_back({blk, static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1), v});
      }
  }
  return cert;
}

Certificate identity_certificate(const std::vector<std::int64_t>& block_sizes, const BigInt& D) {
  Certificate cert;
  cert.D = D;
  cert.block_sizes = block_sizes;
  for (std::size_t b = 0; b < block_sizes.size(); ++b)
    for (std::size_t i = 1; i <= block_order(block_sizes[b]); ++i)
      cert.entries.push_back({static_cast<std::uint32_t>(b + 1), static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>(i), D});
  return cert;
}

std::string to_text(const Certificate& cert) {
  std::string s;
  if (!cert.ridged_blocks.empty()) {
    std::ostringstream ridge;
    ridge << kCholeskyRidge;
    s += "# ridge " + ridge.str() + " added to blocks";
    for (auto b : cert.ridged_blocks) s += " " + std::to_string(b);
    s += "\n";
  }
  if (cert.clamped_diagonals) s += "# diagonal entries raised to 1: " + std::to_string(cert.clamped_diagonals) + "\n";
  s += cert.D.get_str() + "\n" + std::to_string(cert.block_sizes.size());
  for (auto b : cert.block_sizes) s += " " + std::to_string(b);
  s += "\n";
  for (const auto& e : cert.entries)
    s += std::to_string(e.block) + " " + std::to_string(e.i) + " " + std::to_string(e.j) + " " + e.value.get_str() + "\n";
  return s;
}

Certificate parse_certificate(const std::string& text) {
  Certificate cert;
  std::istringstream in(text);
  std::string line;
  int stage = 0;
  static const std::regex ridge_re(R"(^# ridge \S+ added to blocks((?: \d+)*)\s*$)");
  static const std::regex clamp_re(R"(^# diagonal entries raised to 1: (\d+)\s*$)");
  auto big = [](const std::string& tok, const char* what) {
    BigInt v;
    if (tok.empty() || v.set_str(tok, 10) != 0) throw ParseError(std::string("certificate: bad ") + what + " '" + tok + "'");
    return v;
  };
  while (std::getline(in, line)) {
    std::smatch mt;
    if (std::regex_match(line, mt, ridge_re)) {
      std::istringstream bs(mt[1]);
      for (std::uint32_t b; bs >> b;) cert.ridged_blocks.push_back(b);
      continue;
    }
    if (std::regex_match(line, mt, clamp_re)) {
      cert.clamped_diagonals = std::stoull(mt[1]);
      continue;
    }
    if (is_blank_or_comment(line, "#")) continue;
    std::istringstream ts(line);
    std::vector<std::string> t;
    for (std::string tok; ts >> tok;) t.push_back(tok);
    if (stage == 0) {
      if (t.size() != 1) throw ParseError("certificate: first line must be the scale D");
      cert.D = big(t[0], "scale");
      stage = 1;
    } else if (stage == 1) {
      const auto k = require_int(t.at(0), "certificate block count");
      if (k <= 0 || static_cast<std::int64_t>(t.size()) != k + 1) throw ParseError("certificate: bad block line");
      for (std::size_t b = 1; b < t.size(); ++b) cert.block_sizes.push_back(require_int(t[b], "certificate block size"));
      stage = 2;
    } else {
      if (t.size() != 4) throw ParseError("certificate: expected 'block i j value', got '" + line + "'");
      CertificateEntry e;
      const auto b = require_int(t[0], "certificate block");
      const auto i = require_int(t[1], "certificate row");
      const auto j = require_int(t[2], "certificate column");
      if (b < 1 || i < 1 || j < 1) throw ParseError("certificate: indices are 1-based");
      e.block = static_cast<std::uint32_t>(b);
      e.i = static_cast<std::uint32_t>(i);
      e.j = static_cast<std::uint32_t>(j);
      e.value = big(t[3], "entry");
      cert.entries.push_back(e);
    }
  }
  if (stage < 2) throw ParseError("certificate: missing header");
  auto key = [](const CertificateEntry& e) { return std::tie(e.block, e.i, e.j); };
  std::stable_sort(cert.entries.begin(), cert.entries.end(),
                   [&](const CertificateEntry& x, const CertificateEntry& y) { return key(x) < key(y); });
  for (std::size_t k = 1; k < cert.entries.size(); ++k)
    if (key(cert.entries[k]) == key(cert.entries[k - 1])) throw ParseError("certificate: duplicate entry");
  return cert;
}

void write_certificate(const Certificate& cert, const std::string& path) { write_file(path, to_text(cert)); }

Certificate read_certificate(const std::string& path) { return parse_certificate(read_file(path)); }

VerificationReport verify_certificate(const SdpProblem& problem, const Certificate& cert, const VerifyOptions& options) {
  check_shape(problem, cert);

  VerificationReport rep;
  rep.D = cert.D;
  rep.scale_M = problem.scale_M();
  bool first = true;
  {
    std::vector<std::vector<bool>> has(cert.block_sizes.size());
    for (std::size_t b = 0; b < has.size(); ++b) has[b].assign(block_order(cert.block_sizes[b]), false);
    for (const auto& e : cert.entries) {
      if (e.i != e.j) continue;
      has[e.block - 1][e.i - 1] = true;
      if (e.value <= 0)
        throw VerificationError("certificate diagonal entry " + std::to_string(e.i) + " of block " +
                                std::to_string(e.block) + " is not positive");
      if (first || e.value < rep.min_diagonal) rep.min_diagonal = e.value;
      first = false;
    }
    for (std::size_t b = 0; b < has.size(); ++b)
      for (std::size_t i = 0; i < has[b].size(); ++i)
        if (!has[b][i])
          throw VerificationError("certificate diagonal entry " + std::to_string(i + 1) + " of block " +
                                  std::to_string(b + 1) + " is zero");
  }

  const auto G = gram_blocks(cert, options.reverse_order);
  const auto off = matrix_offsets(problem);
  const BigInt D2 = cert.D * cert.D;

  std::vector<BigInt> numer(problem.m());
  parallel_for(problem.m(), options.workers, [&](std::size_t j) {
    numer[j] = trace_product(problem, off, j + 1, G, options.reverse_order) - BigInt(static_cast<long>(problem.a[j])) * D2;
  });
  rep.trCM = trace_product(problem, off, 0, G, options.reverse_order);

  rep.residuals.reserve(problem.m());
  BigInt worst = 0;
  for (const auto& n : numer) {
    rep.residuals.emplace_back(n, D2);
    const BigInt mag = abs(n);
    if (mag > worst) worst = mag;
  }
  rep.epsilon = ExactFraction(worst, D2);
  const ExactFraction M(static_cast<long>(rep.scale_M));
  rep.f_upper = (M - ExactFraction(rep.trCM, D2) + rep.epsilon) / M;
  return rep;
}

VerificationReport zero_multiplier_report(const SdpProblem& problem) {
  if (problem.a.empty()) throw DimensionError("zero_multiplier_report: problem has no constraints");
  VerificationReport rep;
  rep.D = 1;
  rep.scale_M = problem.scale_M();
  rep.trCM = static_cast<long>(*std::min_element(problem.a.begin(), problem.a.end()));
  rep.residuals.assign(problem.m(), ExactFraction(0));
  rep.epsilon = ExactFraction(0);
  const ExactFraction M(static_cast<long>(rep.scale_M));
  rep.f_upper = (M - ExactFraction(rep.trCM)) / M;
  rep.min_diagonal = 0;
  return rep;
}

std::vector<FlagQuadruple> certificate_multipliers(const SdpProblem& problem, const Certificate& cert) {
  if (!problem.metadata) throw DimensionError("certificate_multipliers: problem has no generator metadata");
  check_shape(problem, cert);
  const auto& md = *problem.metadata;
  if (md.types.size() + 1 != cert.block_sizes.size())
    throw VerificationError("certificate_multipliers: block count does not match the flag types");
  const auto G = gram_blocks(cert, false);
  const ExactFraction factor =
      ExactFraction(BigInt(static_cast<long>(md.scale_N)), BigInt(static_cast<long>(md.scale_M)) * cert.D * cert.D);
  std::vector<FlagQuadruple> out;
  for (std::size_t b = 0; b < md.types.size(); ++b) {
    FlagList flags(FlagType{md.types[b]}, md.flag_rows, md.flag_cols, 2);
    const std::size_t n = G[b].n;
    if (flags.size() != n) throw VerificationError("certificate_multipliers: block order differs from the flag count");
    RationalMatrix Q(n, std::vector<ExactFraction>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) Q[i][j] = factor * ExactFraction(G[b].at(i, j));
    out.push_back({std::move(flags), std::move(Q)});
  }
  return out;
}

PipelineResult pipeline(const SymbolMatrix& Hstar, const SdpConfig& config, const PipelineOptions& options) {
  const SdpProblem problem = assemble_sdp(Hstar, config);
  if (!options.problem_out.empty()) write_sdpa(problem, options.problem_out);
  PipelineResult res;
  if (options.zero_multipliers) {
    res.report = zero_multiplier_report(problem);
    return res;
  }
  const FloatSolution sol = run_solver(problem, options.solver);
  res.solver_objective = sol.objective;
  Certificate cert = round_certificate(sol, options.D);
  if (!options.certificate_out.empty()) write_certificate(cert, options.certificate_out);
  VerifyOptions vo;
  vo.workers = config.workers;
  res.report = verify_certificate(problem, cert, vo);
  res.certificate = std::move(cert);
  return res;
}

}  // namespace matdens
