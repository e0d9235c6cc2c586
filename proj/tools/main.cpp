#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <variant>

#include "cdfwbpp/cdf.hpp"
#include "cdfwbpp/io.hpp"
#include "cdfwbpp/species.hpp"
#include "cdfwbpp/wbpp.hpp"

namespace {

using namespace cdfwbpp;

enum Exit : int {
  kZeroExit = 0,
  kNonzeroExit = 1,
  kUsageExit = 2,
  kPreconditionExit = 3,
  kInconclusiveExit = 4,
  kInternalExit = 5,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kUnknownLetter:
      return kUsageExit;
    case ErrorKind::kResourceLimit:
      return kInconclusiveExit;
    case ErrorKind::kInternal:
      return kInternalExit;
    default:
      return kPreconditionExit;
  }
}

struct Options {
  ResourceLimits limits;
  bool stats = false;
  unsigned jobs = 1;
};

std::string extension(const std::string& path) { return std::filesystem::path(path).extension().string(); }

// A loaded input: a word-series model (with its start configuration) or a
// power series with its base dimension and file kind.
struct WordModel {
  Wbpp model;
};
struct PowerModel {
  CdfSeries series;
  std::optional<SpecFile> spec;
  std::optional<CdfFile> cdf;
};
using Model = std::variant<WordModel, PowerModel>;

Model load(const std::string& path, std::ostream& warn) {
  std::string ext = extension(path);
  std::string text = read_text_file(path);
  if (ext == ".wbpp") {
    auto f = parse_wbpp(text);
    for (const auto& w : f.warnings) warn << path << ": warning: " << w << "\n";
    return WordModel{std::move(f.model)};
  }
  if (ext == ".bpp") return WordModel{bpp_to_wbpp(parse_bpp(text))};
  if (ext == ".cdf") {
    auto f = parse_cdf(text);
    for (const auto& w : f.warnings) warn << path << ": warning: " << w << "\n";
    CdfSeries s = f.series;
    return PowerModel{std::move(s), std::nullopt, std::move(f)};
  }
  if (ext == ".spec") {
    auto f = parse_spec(text);
    CdfSeries s = compile(*f.main(), f.sorts);
    return PowerModel{std::move(s), std::move(f), std::nullopt};
  }
  throw Error(ErrorKind::kParse, path + ": unknown file type (expected .wbpp, .bpp, .cdf or .spec)");
}

std::string exponent_of(const std::vector<std::size_t>& word, std::size_t dim) {
  return exponent_to_string(parikh(word, dim));
}

void print_stats(const ZeroVerdict& v, std::ostream& os) {
  os << "chain length: " << v.stats.chain_length << "\n";
  os << "basis size: " << v.stats.basis_size << "\n";
  os << "max degree: " << v.stats.max_degree << "\n";
  os << "configurations expanded: " << v.stats.expanded << "\n";
}

int report(const ZeroVerdict& v, const Options& opt, const char* zero_word, const std::string& nonzero_line) {
  switch (v.outcome) {
    case ZeroVerdict::Outcome::kZero:
      std::cout << zero_word << " (chain length " << v.stats.chain_length << ")\n";
      break;
    case ZeroVerdict::Outcome::kNonzero:
      std::cout << nonzero_line << "\n";
      break;
    case ZeroVerdict::Outcome::kInconclusive:
      std::cout << "INCONCLUSIVE_RESOURCE_LIMIT (" << v.message << ")\n";
      break;
  }
  if (opt.stats) print_stats(v, std::cout);
  switch (v.outcome) {
    case ZeroVerdict::Outcome::kZero:
      return kZeroExit;
    case ZeroVerdict::Outcome::kNonzero:
      return kNonzeroExit;
    default:
      return kInconclusiveExit;
  }
}

int cmd_zero(const std::string& path, const Options& opt) {
  Model m = load(path, std::cerr);
  if (auto* w = std::get_if<WordModel>(&m)) {
    auto v = zeroness(w->model, w->model.start_config(), opt.limits);
    return report(v, opt, "ZERO",
                  "NONZERO (witness " + w->model.word_to_string(v.witness) + ", value " + to_string(v.value) + ")");
  }
  auto& p = std::get<PowerModel>(m);
  auto v = zeroness(p.series, opt.limits);
  return report(v, opt, "ZERO",
                "NONZERO (witness " + exponent_of(v.witness, p.series.system.dim()) + ", value " +
                    to_string(v.value) + ")");
}

int cmd_equiv(const std::string& a, const std::string& b, const Options& opt, const char* same_word) {
  Model ma = load(a, std::cerr);
  Model mb = load(b, std::cerr);
  if (ma.index() != mb.index()) {
    throw Error(ErrorKind::kParse, "cannot compare a word-series model with a power-series model");
  }
  if (auto* wa = std::get_if<WordModel>(&ma)) {
    auto& wb = std::get<WordModel>(mb);
    auto v = equivalent(wa->model, wb.model, opt.limits);
    std::string line;
    if (v.nonzero()) {
      auto u = disjoint_union(wa->model, wb.model);
      std::string word = u.model.word_to_string(v.witness);
      line = "DIFFER (witness " + word + ": " + to_string(evaluate(u.model, u.first, v.witness)) + " vs " +
             to_string(evaluate(u.model, u.second, v.witness)) + ")";
    }
    return report(v, opt, same_word, line);
  }
  auto& pa = std::get<PowerModel>(ma);
  auto& pb = std::get<PowerModel>(mb);
  if (pa.series.system.dim() != pb.series.system.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "inputs have different dimensions");
  }
  auto v = equivalent(pa.series, pb.series, opt.limits);
  std::string line;
  if (v.nonzero()) {
    line = "DIFFER (witness " + exponent_of(v.witness, pa.series.system.dim()) + ": " +
           to_string(coeff_via_word(pa.series, v.witness)) + " vs " +
           to_string(coeff_via_word(pb.series, v.witness)) + ")";
  }
  return report(v, opt, same_word, line);
}

int cmd_eval(const std::string& path, const std::string& word) {
  Model m = load(path, std::cerr);
  if (auto* w = std::get_if<WordModel>(&m)) {
    std::cout << to_string(evaluate(w->model, w->model.start_config(), w->model.parse_word(word))) << "\n";
    return kZeroExit;
  }
  // For power series the word is a sequence of axis letters a, b, ...
  auto& p = std::get<PowerModel>(m);
  Wbpp as_words = to_wbpp(p.series);
  std::cout << to_string(coeff_via_word(p.series, as_words.parse_word(word))) << "\n";
  return kZeroExit;
}

int cmd_coeffs(const std::string& path, std::uint32_t max) {
  Model m = load(path, std::cerr);
  if (auto* w = std::get_if<WordModel>(&m)) {
    for (const auto& [word, value] : coeffs_up_to(w->model, w->model.start_config(), max)) {
      std::cout << w->model.word_to_string(word) << " " << to_string(value) << "\n";
    }
    return kZeroExit;
  }
  auto& p = std::get<PowerModel>(m);
  TruncSeries t = p.spec ? count_table(*p.spec->main(), p.spec->sorts, max) : coeff_table(p.series, max);
  for (std::uint32_t deg = 0; deg <= max; ++deg) {
    for (const auto& n : exponents_of_degree(t.dim(), deg)) {
      std::cout << exponent_to_string(n) << " " << to_string(t.get(n)) << "\n";
    }
  }
  return kZeroExit;
}

int cmd_compile(const std::string& path, const std::string& out) {
  if (extension(path) != ".spec") throw Error(ErrorKind::kParse, "compile-species expects a .spec file");
  auto f = parse_spec(read_text_file(path));
  std::string text = print_cdf(compile(*f.main(), f.sorts));
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error(ErrorKind::kParse, "cannot write " + out);
    os << text;
  }
  return kZeroExit;
}

// Worst exit status wins: precondition failures over counterexamples.
int merge_status(int a, int b) {
  auto rank = [](int s) { return s == kZeroExit ? 0 : s == kNonzeroExit ? 1 : s == kInconclusiveExit ? 2 : 3; };
  return rank(b) > rank(a) ? b : a;
}

int check_one(const std::string& path, std::uint32_t length, std::ostream& os) {
  try {
    // Fixpoints are checked before compiling, which would reject them.
    if (extension(path) == ".spec") {
      SpecFile f = parse_spec(read_text_file(path));
      bool ok = true;
      for (const auto& fp : check_fixpoints(*f.main(), f.sorts)) {
        if (fp.result.ok) {
          os << path << ": fix {" << fp.binders << "}: well-posed\n";
        } else {
          os << path << ": fix {" << fp.binders << "}: NOT well-posed: " << fp.result.diagnostic << "\n";
          ok = false;
        }
      }
      if (!ok) return kPreconditionExit;
    }
    std::ostringstream warn;
    Model m = load(path, warn);
    os << warn.str();
    if (auto* w = std::get_if<WordModel>(&m)) {
      auto r = check_commutative_bounded(w->model, length);
      if (r.ok) {
        os << path << ": commutative up to length " << length << ": yes\n";
        return kZeroExit;
      }
      os << path << ": commutative up to length " << length << ": COUNTEREXAMPLE(" << w->model.word_to_string(r.u)
         << ", " << w->model.word_to_string(r.v) << ")\n";
      return kNonzeroExit;
    }
    auto& p = std::get<PowerModel>(m);
    int status = kZeroExit;
    if (p.cdf && p.cdf->recognizer) {
      os << path << ": monoid laws: ok (" << p.cdf->recognizer->size() << " elements)\n";
    }
    // Every word with the same Parikh image must yield the same coefficient.
    Wbpp words = to_wbpp(p.series);
    auto r = check_commutative_bounded(words, length);
    if (r.ok) {
      os << path << ": mixed partials consistent up to order " << length << ": yes\n";
    } else {
      os << path << ": mixed partials consistent up to order " << length << ": NO (" << words.word_to_string(r.u)
         << " vs " << words.word_to_string(r.v) << ")\n";
      status = merge_status(status, kNonzeroExit);
    }
    return status;
  } catch (const Error& e) {
    os << path << ": error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

int cmd_check(const std::vector<std::string>& paths, std::uint32_t length, unsigned jobs) {
  std::vector<std::string> outputs(paths.size());
  std::vector<int> status(paths.size(), kZeroExit);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < paths.size();) {
      std::ostringstream os;
      status[i] = check_one(paths[i], length, os);
      outputs[i] = os.str();
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  int result = kZeroExit;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::cout << outputs[i];
    result = merge_status(result, status[i]);
  }
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroness and equivalence of weighted BPP, CDF power series and constructible species"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--max-degree", opt.limits.max_degree, "Degree cap for configurations and basis elements")
      ->capture_default_str();
  app.add_option("--max-basis", opt.limits.max_basis, "Cap on the Groebner basis size")->capture_default_str();
  app.add_option("--timeout-iterations", opt.limits.max_iterations, "Iteration budget of the saturation")
      ->capture_default_str();
  app.add_flag("--stats", opt.stats, "Print chain length, basis size and maximal degree");
  app.add_option("--jobs", opt.jobs, "Worker threads for 'check' over several files")->check(CLI::PositiveNumber);

  std::string file;
  std::string file2;
  std::string word;
  std::string out;
  std::uint32_t max = 4;
  std::vector<std::string> files;

  auto* zero = app.add_subcommand("zero", "Decide whether the series of a .wbpp/.bpp/.cdf/.spec file is zero");
  zero->add_option("file", file)->required()->check(CLI::ExistingFile);
  auto* equiv = app.add_subcommand("equiv", "Decide whether two models denote the same series");
  equiv->add_option("first", file)->required()->check(CLI::ExistingFile);
  equiv->add_option("second", file2)->required()->check(CLI::ExistingFile);
  auto* eval = app.add_subcommand("eval", "Coefficient of one word");
  eval->add_option("file", file)->required()->check(CLI::ExistingFile);
  eval->add_option("--word", word, "Word such as aabb (empty for the empty word)")->required();
  auto* coeffs = app.add_subcommand("coeffs", "All coefficients up to a length or total degree");
  coeffs->add_option("file", file)->required()->check(CLI::ExistingFile);
  coeffs->add_option("--max", max, "Length or total degree bound")->capture_default_str();
  auto* comp = app.add_subcommand("compile-species", "Compile a .spec file to a .cdf system");
  comp->add_option("file", file)->required()->check(CLI::ExistingFile);
  comp->add_option("-o,--output", out, "Output .cdf path (stdout when omitted)");
  auto* equi = app.add_subcommand("equipotent", "Decide whether two species have equal counts");
  equi->add_option("first", file)->required()->check(CLI::ExistingFile);
  equi->add_option("second", file2)->required()->check(CLI::ExistingFile);
  auto* check = app.add_subcommand("check", "Well-posedness, bounded commutativity and monoid laws");
  check->add_option("files", files)->required()->check(CLI::ExistingFile);
  check->add_option("--max", max, "Word length bound for the commutativity checks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (*zero) return cmd_zero(file, opt);
    if (*equiv) return cmd_equiv(file, file2, opt, "EQUIVALENT");
    if (*eval) return cmd_eval(file, word);
    if (*coeffs) return cmd_coeffs(file, max);
    if (*comp) return cmd_compile(file, out);
    if (*equi) {
      if (extension(file) != ".spec" || extension(file2) != ".spec") {
        throw Error(ErrorKind::kParse, "equipotent expects two .spec files");
      }
      return cmd_equiv(file, file2, opt, "EQUIVALENT");
    }
    if (*check) return cmd_check(files, max, opt.jobs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kUsageExit;
}
