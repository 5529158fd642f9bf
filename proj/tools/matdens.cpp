#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "matdens/core.hpp"
#include "matdens/error.hpp"
#include "matdens/flag.hpp"
#include "matdens/limit.hpp"
#include "matdens/minimizer.hpp"
#include "matdens/sdp.hpp"
#include "matdens/search.hpp"

using namespace matdens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitIo = 4;
constexpr int kExitSolver = 5;
constexpr int kExitVerification = 6;

const char* kExitTable =
    "Exit codes: 0 success, 2 usage or invalid input, 3 budget exceeded, 4 I/O or parse failure, "
    "5 SDP solver failure, 6 certificate verification failure.";

void print_fraction(const std::string& key, const ExactFraction& f, int digits = 10) {
  std::cout << key << " " << f.to_string() << " " << f.to_decimal(digits) << "\n";
}

SymbolMatrix load_matrix(const std::string& inline_text, const std::string& path, const char* what) {
  if (!inline_text.empty() && !path.empty())
    throw CLI::ValidationError(std::string(what) + ": give either the inline form or a file, not both");
  if (!inline_text.empty()) return SymbolMatrix::parse_inline(inline_text);
  if (!path.empty()) return read_matrix_file(path);
  throw CLI::RequiredError(what);
}

void emit_matrix(const SymbolMatrix& m, const std::string& path) {
  if (path.empty()) {
    write_matrix_text(std::cout, m);
  } else {
    write_matrix_file(path, m);
  }
}

void print_report(const VerificationReport& rep) {
  std::cout << "D " << rep.D.get_str() << "\n";
  std::cout << "trCM " << rep.trCM.get_str() << "\n";
  print_fraction("epsilon", rep.epsilon, 12);
  std::cout << "min_diagonal " << rep.min_diagonal.get_str() << "\n";
  std::cout << "M " << rep.scale_M << "\n";
  print_fraction("f_upper", rep.f_upper, 10);
  const double lower = 2 * std::exp(-2.0);
  std::cout << "gap_to_2/e^2 " << std::setprecision(10) << rep.f_upper.to_double() - lower << "\n";
}

struct PatternArgs {
  std::string inline_text;
  std::string file;

  void add(CLI::App* app) {
    app->add_option("-p,--pattern", inline_text, "pattern, inline ('0 0;0 1' or '0 0/0 1')");
    app->add_option("--pattern-file", file, "pattern file in the matrix text format");
  }
  SymbolMatrix get(const char* fallback = nullptr) const {
    if (inline_text.empty() && file.empty() && fallback) return SymbolMatrix::parse_inline(fallback);
    return load_matrix(inline_text, file, "--pattern");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact densities of submatrix patterns, their extremal values and flag-algebra bounds."};
  app.footer(kExitTable);
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("-j,--workers", workers, "worker threads (0: all available)");

  // density
  auto* density_cmd = app.add_subcommand("density", "density of a pattern in a matrix");
  PatternArgs density_pattern;
  density_pattern.add(density_cmd);
  std::string matrix_file, matrix_inline;
  density_cmd->add_option("-m,--matrix", matrix_file, "host matrix file");
  density_cmd->add_option("--matrix-inline", matrix_inline, "host matrix, inline");
  density_cmd->callback([&] {
    const auto H = density_pattern.get();
    const auto Mx = load_matrix(matrix_inline, matrix_file, "--matrix");
    std::cout << "count " << count_pattern(H, Mx).get_str() << "\n";
    print_fraction("density", density(H, Mx));
  });

  // search
  auto* search_cmd = app.add_subcommand("search", "exact maximum density over n x n matrices");
  PatternArgs search_pattern;
  search_pattern.add(search_cmd);
  std::size_t search_n = 0;
  SearchOptions search_opts;
  std::string witness_out;
  search_cmd->add_option("-n", search_n, "host order")->required();
  search_cmd->add_flag("--monotone", search_opts.monotone_only, "monotone hosts only");
  search_cmd->add_option("--budget", search_opts.budget, "maximum candidate hosts");
  search_cmd->add_option("--witness", witness_out, "write the witness matrix to this file");
  search_cmd->callback([&] {
    search_opts.workers = workers;
    const auto H = search_pattern.get();
    const auto r = f_exact(H, search_n, search_opts);
    print_fraction("f", r.best_value);
    std::cout << "explored " << r.explored << "\n";
    if (witness_out.empty()) std::cout << "witness\n";
    emit_matrix(r.witness, witness_out);
  });

  // sequence
  auto* seq_cmd = app.add_subcommand("sequence", "f(H, n) for n = h .. n_max");
  PatternArgs seq_pattern;
  seq_pattern.add(seq_cmd);
  std::size_t seq_max = 0;
  SearchOptions seq_opts;
  std::string seq_format = "exact";
  seq_cmd->add_option("--n-max", seq_max, "largest host order")->required();
  seq_cmd->add_flag("--monotone", seq_opts.monotone_only, "monotone hosts only");
  seq_cmd->add_option("--budget", seq_opts.budget, "maximum candidate hosts per n");
  seq_cmd->add_option("--format", seq_format, "exact or csv")->check(CLI::IsMember({"exact", "csv"}));
  seq_cmd->callback([&] {
    seq_opts.workers = workers;
    const auto H = seq_pattern.get();
    const auto values = f_sequence(H, seq_max, seq_opts);
    if (seq_format == "csv") std::cout << "n,exact,decimal\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::size_t n = H.rows() + i;
      if (seq_format == "csv") {
        std::cout << n << "," << values[i].to_string() << "," << values[i].to_decimal(10) << "\n";
      } else {
        print_fraction("f(" + std::to_string(n) + ")", values[i]);
      }
    }
  });

  // hasse
  auto* hasse_cmd = app.add_subcommand("hasse", "density-isomorphism classes and their refinement order");
  std::size_t hasse_h = 2, hasse_k = 4;
  std::uint64_t hasse_cap = 1'000'000;
  std::string hasse_format = "text";
  hasse_cmd->add_option("--order", hasse_h, "pattern order");
  hasse_cmd->add_option("--symbols", hasse_k, "maximum number of symbols");
  hasse_cmd->add_option("--cap", hasse_cap, "maximum matrices to enumerate");
  hasse_cmd->add_option("--format", hasse_format, "text or dot")->check(CLI::IsMember({"text", "dot"}));
  hasse_cmd->callback([&] {
    const auto d = hasse_diagram(hasse_h, hasse_k, hasse_cap);
    if (hasse_format == "dot") {
      std::cout << d.to_dot();
      return;
    }
    std::cout << "classes " << d.nodes.size() << "\n";
    std::size_t monotone = 0;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const bool mono = is_monotone_representable(d.nodes[i]);
      monotone += mono;
      std::cout << "node " << i << " (" << d.nodes[i].to_inline() << ")" << (mono ? " monotone" : "") << "\n";
    }
    std::cout << "monotone_representable " << monotone << "\n";
    std::cout << "edges " << d.edges.size() << "\n";
    for (const auto& [fine, coarse] : d.edges) std::cout << "edge " << fine << " " << coarse << "\n";
  });

  // limit-eval
  auto* limit_cmd = app.add_subcommand("limit-eval", "limit functional at g* and the atomic measure h*");
  std::size_t curve_points = 0;
  double limit_tol = 1e-9;
  limit_cmd->add_option("--curve", curve_points, "emit this many (x, g*(x)) points as CSV instead");
  limit_cmd->add_option("--tolerance", limit_tol, "quadrature tolerance");
  limit_cmd->callback([&] {
    if (curve_points) {
      std::cout << "x,g\n" << std::setprecision(12);
      for (const auto& [x, g] : gstar_curve(curve_points)) std::cout << x << "," << g << "\n";
      return;
    }
    const auto F = functional_F_gstar(limit_tol);
    const double target = 0.5 * std::exp(-2.0);
    std::cout << std::setprecision(12);
    std::cout << "F(g*) " << F.value << " error_estimate " << F.error_estimate << "\n";
    std::cout << "kenyon(h*) " << kenyon_objective(AtomicMeasure::canonical()) << "\n";
    std::cout << "1/(2e^2) " << target << "\n";
    std::cout << "2/e^2 " << 4 * target << "\n";
  });

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "n x n matrix sampled from the optimal binary graphon");
  std::size_t sample_n = 0;
  bool sample_check = false;
  std::string sample_out;
  sample_cmd->add_option("-n", sample_n, "order")->required();
  sample_cmd->add_flag("--check-density", sample_check, "report the density of (0 0;0 1) against 2/e^2");
  sample_cmd->add_option("-o,--output", sample_out, "write the matrix to this file");
  sample_cmd->callback([&] {
    const auto S = sample_matrix(sample_n);
    if (sample_check) {
      const auto d = density(SymbolMatrix::parse_inline("0 0;0 1"), S);
      print_fraction("density", d);
      std::cout << "2/e^2 " << std::setprecision(10) << 2 * std::exp(-2.0) << "\n";
      std::cout << "gap " << d.to_double() - 2 * std::exp(-2.0) << "\n";
      if (sample_out.empty()) return;
    }
    emit_matrix(S, sample_out);
  });

  // minimizer
  auto* min_cmd = app.add_subcommand("minimizer", "explicit patterns with small maximum density");
  std::size_t min_h = 2, min_n = 0;
  min_cmd->add_option("--order", min_h, "pattern order");
  min_cmd->add_option("--blowup", min_n, "also report the density in the balanced blowup of this order");
  min_cmd->callback([&] {
    const auto H = theorem2_matrix(min_h);
    std::cout << "pattern (" << H.to_inline() << ")\n";
    print_fraction("bound", minimizer_bound(min_h));
    if (min_n) print_fraction("blowup_density", density(H, balanced_blowup(H, min_n)));
  });

  // word-max
  auto* word_cmd = app.add_subcommand("word-max", "maximum subsequence density of a word over length-n words");
  std::string word_text;
  std::size_t word_n = 0;
  double word_budget = 1e8;
  word_cmd->add_option("-w,--word", word_text, "pattern word, e.g. 010")->required();
  word_cmd->add_option("-n", word_n, "host length")->required();
  word_cmd->add_option("--budget", word_budget, "maximum candidate words");
  word_cmd->callback([&] {
    const auto r = max_word_density(parse_word(word_text), word_n, word_budget, workers);
    print_fraction("max", r.value);
    std::cout << "witness " << word_to_string(r.witness) << "\n";
  });

  // flag-count
  auto* flag_cmd = app.add_subcommand("flag-count", "enumerate flags of a type");
  std::string flag_type = "0 0";
  std::size_t flag_r = 2, flag_c = 3;
  std::string flag_format = "count";
  flag_cmd->add_option("-t,--type", flag_type, "type, inline");
  flag_cmd->add_option("-r", flag_r, "flag rows");
  flag_cmd->add_option("-c", flag_c, "flag columns");
  flag_cmd->add_option("--format", flag_format, "count or csv")->check(CLI::IsMember({"count", "csv"}));
  flag_cmd->callback([&] {
    const auto list = enumerate_flags(FlagType{SymbolMatrix::parse_inline(flag_type)}, flag_r, flag_c);
    if (flag_format == "count") {
      std::cout << "flags " << list.size() << "\n";
      return;
    }
    std::cout << "index,matrix,marked_rows,marked_cols\n";
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& mk = list[i].marked();
      auto join = [](const std::vector<std::size_t>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k]);
        return s;
      };
      std::cout << i << "," << mk.base.to_inline() << "," << join(mk.marked_rows) << "," << join(mk.marked_cols) << "\n";
    }
  });

  // sdp-gen
  auto* gen_cmd = app.add_subcommand("sdp-gen", "write the flag-algebra SDP in SDPA sparse format");
  PatternArgs gen_pattern;
  gen_pattern.add(gen_cmd);
  std::string gen_out;
  gen_cmd->add_option("-o,--output", gen_out, "output .dat-s file")->required();
  gen_cmd->callback([&] {
    SdpConfig cfg;
    cfg.workers = workers;
    const auto p = assemble_sdp(gen_pattern.get("0 0;0 1"), cfg);
    write_sdpa(p, gen_out);
    std::cout << "constraints " << p.m() << "\n";
    std::cout << "blocks";
    for (auto b : p.block_sizes) std::cout << " " << b;
    std::cout << "\nvariables " << p.variable_count() << "\n";
  });

  // sdp-solve
  auto* solve_cmd = app.add_subcommand("sdp-solve", "assemble, solve, round and verify the SDP bound");
  PatternArgs solve_pattern;
  solve_pattern.add(solve_cmd);
  PipelineOptions popts;
  std::string D_text = "1000000";
  solve_cmd->add_option("--solver", popts.solver.solver_path, "solver executable (default: $MATDENS_SOLVER)");
  solve_cmd->add_option("--work-dir", popts.solver.work_dir, "keep solver files here");
  solve_cmd->add_option("--D", D_text, "rounding scale");
  solve_cmd->add_option("--problem-out", popts.problem_out, "also write the SDPA problem here");
  solve_cmd->add_option("--cert-out", popts.certificate_out, "write the certificate here");
  solve_cmd->add_flag("--zero-multipliers", popts.zero_multipliers, "skip the solver: certify the Q = 0 bound");
  solve_cmd->callback([&] {
    if (popts.D.set_str(D_text, 10) != 0 || popts.D <= 0) throw CLI::ValidationError("--D must be a positive integer");
    SdpConfig cfg;
    cfg.workers = workers;
    const auto res = pipeline(solve_pattern.get("0 0;0 1"), cfg, popts);
    if (!popts.zero_multipliers) std::cout << "solver_objective " << std::setprecision(12) << res.solver_objective << "\n";
    if (res.certificate) {
      std::cout << "ridged_blocks " << res.certificate->ridged_blocks.size() << "\n";
      std::cout << "clamped_diagonals " << res.certificate->clamped_diagonals << "\n";
    }
    print_report(res.report);
  });

  // cert-verify
  auto* verify_cmd = app.add_subcommand("cert-verify", "exact verification of a rounded certificate");
  std::string verify_problem, verify_cert;
  bool verify_reverse = false;
  verify_cmd->add_option("--problem", verify_problem, "SDPA problem file")->required();
  verify_cmd->add_option("--cert", verify_cert, "certificate file")->required();
  verify_cmd->add_flag("--reverse-order", verify_reverse, "sum in reverse order (the report must not change)");
  verify_cmd->callback([&] {
    const auto p = read_sdpa(verify_problem);
    const auto cert = read_certificate(verify_cert);
    VerifyOptions vo;
    vo.reverse_order = verify_reverse;
    vo.workers = workers;
    print_report(verify_certificate(p, cert, vo));
  });

  // double-count
  auto* dc_cmd = app.add_subcommand("double-count", "check d(H*, M) = sum_H d(H*, H) d(H, M) over r x c matrices H");
  PatternArgs dc_pattern;
  dc_pattern.add(dc_cmd);
  std::string dc_file, dc_inline;
  std::size_t dc_r = 3, dc_c = 4;
  dc_cmd->add_option("-m,--matrix", dc_file, "host matrix file");
  dc_cmd->add_option("--matrix-inline", dc_inline, "host matrix, inline");
  dc_cmd->add_option("-r", dc_r, "intermediate rows");
  dc_cmd->add_option("-c", dc_c, "intermediate columns");
  dc_cmd->callback([&] {
    const bool ok = double_counting_check(dc_pattern.get("0 0;0 1"), dc_r, dc_c, load_matrix(dc_inline, dc_file, "--matrix"));
    std::cout << "identity " << (ok ? "holds" : "fails") << "\n";
    if (!ok) throw VerificationError("double counting identity failed");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const DimensionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitOk;
}
