#include "hardynorm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hardynorm/bellman.hpp"
#include "hardynorm/constants.hpp"
#include "hardynorm/hardy.hpp"
#include "hardynorm/io.hpp"
#include "hardynorm/martingale.hpp"

namespace hardynorm::cli {

namespace {

using io::Json;
using io::format_number;
using io::round12;

/// A command failed a check it ran; the record has already been printed.
struct CheckFailed {};

struct CommonFlags {
  double tol = OptConfig{}.f_tol;
  int starts = OptConfig{}.starts;
  std::uint64_t seed = OptConfig{}.seed;
  int max_iter = OptConfig{}.max_iter;

  OptConfig config() const {
    OptConfig cfg;
    cfg.f_tol = tol;
    cfg.starts = starts;
    cfg.seed = seed;
    cfg.max_iter = max_iter;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--tol", flags.tol, "Optimizer value tolerance");
  cmd->add_option("--starts", flags.starts, "Optimizer multistart count");
  cmd->add_option("--seed", flags.seed, "Seed for every random choice");
  cmd->add_option("--max-iter", flags.max_iter, "Iterations per local search");
}

void add_params(CLI::App* cmd, Params& params) {
  cmd->add_option("--p", params.p, "Exponent p > 1")->required();
  cmd->add_option("--m", params.m, "Subspace index m > -2(p-1)/p")->required();
  cmd->add_option("--lambda", params.lambda, "Operator coefficient")->required();
}

Json num(double x) { return io::number(x); }

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

Json constant_record(const Params& params, const ConstantResult& r) {
  Json j = io::to_json(r);
  j["conjectured_value"] = num(conjectured_value(params));
  j["gamma"] = num(gamma_pm(params).value);
  return j;
}

int cmd_constant(const Params& params, const CommonFlags& flags, std::ostream& out) {
  params.validate();
  const auto cfg = flags.config();
  try {
    emit(out, constant_record(params, sharp_constant(params, cfg)));
    return kOk;
  } catch (const SharpConstantError& e) {
    Json j = constant_record(params, e.best());
    j["error"] = e.what();
    emit(out, j);
    return kNumericalFailure;
  }
}

int cmd_ratio(const Params& params, double alpha, double beta, std::ostream& out) {
  params.validate();
  const auto parts = ratio_parts(params, alpha, beta);
  emit(out, Json{{"alpha", num(alpha)},
                 {"beta", num(beta)},
                 {"c_ratio", num(c_ratio(params, alpha, beta))},
                 {"ratio_extremal", num(ratio_extremal(params, alpha, beta))},
                 {"numerator", num(parts.numerator)},
                 {"denominator", num(parts.denominator)}});
  return kOk;
}

int cmd_sharpness(const Params& params, const CommonFlags& flags, std::ostream& out) {
  params.validate();
  const auto r = sharp_constant(params, flags.config());
  const double g = gamma_pm(params).value;
  // Without an interior argmax any feasible point serves as a witness.
  const std::array<double, 2> at = r.argmax.value_or(std::array<double, 2>{g - 1.0, g + 1.0});
  const double attained = ratio_extremal(params, at[0], at[1]);
  double near = -kInfinity;
  for (double da : {-1e-3, 0.0, 1e-3}) {
    for (double db : {-1e-3, 0.0, 1e-3}) {
      const double a = at[0] - da * std::max(1.0, std::abs(at[0] - g));
      const double b = at[1] + db * std::max(1.0, std::abs(at[1] - g));
      if ((da != 0.0 || db != 0.0) && a < g && g < b) {
        near = std::max(near, ratio_extremal(params, a, b));
      }
    }
  }
  const double gap = std::abs(r.c_pow_p - attained);
  Json j{{"C_pow_p", num(r.c_pow_p)},
         {"branch", std::string(to_string(r.branch))},
         {"alpha", num(at[0])},
         {"beta", num(at[1])},
         {"ratio_extremal", num(attained)},
         {"ratio_nearby_max", num(near)},
         {"gap", num(gap)}};
  emit(out, j);
  if (r.branch == ConstantBranch::interior_optimum && gap > 1e-6) throw CheckFailed{};
  return kOk;
}

struct MajorizeFlags {
  std::optional<double> force_c;
  double x_range = 100.0;
  long points = 1000000;
  double tol = 1e-9;
};

int cmd_majorize(const Params& params, const CommonFlags& flags, const MajorizeFlags& mf,
                 std::ostream& out, std::ostream& err) {
  params.validate();
  SpecialFnSpec spec;
  try {
    spec = build_special_fn(params, flags.config());
  } catch (const std::exception& e) {
    err << "cannot build special function: " << e.what() << '\n';
    return kNumericalFailure;
  }
  if (mf.force_c) {
    if (!(*mf.force_c > 0.0)) throw DomainError("--force-c must be positive");
    spec.c_pow_p = std::pow(*mf.force_c, params.p);
  }
  const auto major = check_majorization(spec, -mf.x_range, mf.x_range, mf.points, mf.tol);
  Json j{{"branch", std::string(to_string(spec.branch))},
         {"C_pow_p", num(spec.c_pow_p)},
         {"slope", num(spec.slope)},
         {"D", num(spec.d_coefficient())},
         {"gamma", num(spec.gamma)}};
  if (spec.anchors) j["anchors"] = {num((*spec.anchors)[0]), num((*spec.anchors)[1])};
  j["majorization"] = io::to_json(major);
  bool passed = major.passed;
  if (spec.branch == SpecialBranch::mart_m0_l1) {
    const auto b = check_burkholder_conditions(spec, {}, mf.tol);
    j["burkholder"] = {{"majorization", io::to_json(b.majorization)},
                       {"initial", io::to_json(b.initial)},
                       {"maximal", io::to_json(b.maximal)},
                       {"concavity", io::to_json(b.concavity)}};
    passed = passed && b.passed();
  }
  j["warnings"] = spec.warnings;
  j["passed"] = passed;
  emit(out, j);
  if (!passed) throw CheckFailed{};
  return kOk;
}

struct MartingaleFlags {
  double alpha = 0.0;
  double s = 0.0;
  long n = 0;
  double p = 2.0;
  long fuzz = 0;
  int depth = 4;
  int max_branch = 3;
  double scale = 1.0;
  bool absolute = false;
  int jobs = 1;
  std::string csv;
};

int cmd_martingale(const MartingaleFlags& f, const CommonFlags& flags, std::ostream& out) {
  const ExtremalMartingale em{f.alpha, f.s, f.n};
  const double exact = extremal_ratio_exact(em, f.p);
  const double limit = limit_ratio(f.alpha, f.p);
  Json j{{"alpha", num(f.alpha)},
         {"s", num(f.s)},
         {"n", f.n},
         {"p", num(f.p)},
         {"beta", num(em.beta())},
         {"top_dominates", em.top_dominates(f.p)},
         {"exact_ratio", num(exact)},
         {"limit_ratio", num(limit)},
         {"gap", num(std::abs(exact - limit))}};
  bool passed = true;
  if (f.fuzz > 0) {
    FuzzConfig cfg;
    cfg.first_seed = flags.seed;
    cfg.trees = f.fuzz;
    cfg.depth = f.depth;
    cfg.max_branch = f.max_branch;
    cfg.value_scale = f.scale;
    cfg.p = f.p;
    cfg.c = std::pow(cp_pow(f.p), 1.0 / f.p);
    cfg.variant = f.absolute ? MaximalVariant::absolute : MaximalVariant::plain;
    cfg.jobs = f.jobs;
    const auto rows = fuzz_maximal_inequality(cfg);
    long violations = 0;
    double worst = 0.0;
    for (const auto& row : rows) {
      violations += row.passed ? 0 : 1;
      worst = std::max(worst, row.ratio);
    }
    j["fuzz"] = {{"trees", f.fuzz},
                 {"C", num(cfg.c)},
                 {"violations", violations},
                 {"worst_ratio", num(worst)}};
    if (!f.csv.empty()) {
      std::ofstream csv(f.csv);
      if (!csv) throw DomainError("cannot write " + f.csv);
      csv << "seed,ratio,passed\n";
      for (const auto& row : rows) {
        csv << row.seed << ',' << format_number(row.ratio) << ',' << (row.passed ? 1 : 0) << '\n';
      }
    }
    passed = violations == 0;
  }
  emit(out, j);
  if (!passed) throw CheckFailed{};
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

std::vector<double> read_axis(const Json& spec, const char* key) {
  if (!spec.contains(key)) throw DomainError(std::string("sweep spec lacks '") + key + "'");
  const Json& axis = spec.at(key);
  std::vector<double> values;
  if (axis.is_array()) {
    for (const auto& v : axis) values.push_back(v.get<double>());
  } else if (axis.is_number()) {
    values.push_back(axis.get<double>());
  } else if (axis.is_object()) {
    const double lo = axis.at("lo").get<double>();
    const double hi = axis.at("hi").get<double>();
    const long steps = axis.at("steps").get<long>();
    if (steps < 0) throw DomainError(std::string("negative step count for '") + key + "'");
    for (long i = 0; i < steps; ++i) {
      values.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(steps - 1));
    }
  } else {
    throw DomainError(std::string("sweep axis '") + key + "' must be a list, number or range");
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

struct SweepRow {
  Params params;
  std::optional<ConstantResult> result;
  double wall_ms = 0.0;
  std::string status;
  std::string reason;
};

const std::vector<std::string> kSweepColumns = {
    "p", "m", "lambda", "gamma", "C_pow_p", "C", "branch", "alpha_star", "beta_star",
    "conjectured", "boundary_value", "wall_ms", "status", "reason"};

void run_cell(SweepRow& row, const OptConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  try {
    row.params.validate();
    row.result = sharp_constant(row.params, cfg);
    row.status = "ok";
  } catch (const SharpConstantError& e) {
    row.result = e.best();
    row.status = "nonconverged";
    row.reason = e.what();
  } catch (const DomainError& e) {
    row.status = "skipped";
    row.reason = e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

Json row_json(const SweepRow& row) {
  const bool feasible = row.status != "skipped";
  Json j;
  j["p"] = num(row.params.p);
  j["m"] = num(row.params.m);
  j["lambda"] = num(row.params.lambda);
  j["gamma"] = feasible ? num(gamma_pm(row.params).value) : Json(nullptr);
  const auto& r = row.result;
  j["C_pow_p"] = r ? num(r->c_pow_p) : Json(nullptr);
  j["C"] = r ? num(r->c) : Json(nullptr);
  j["branch"] = r ? Json(std::string(to_string(r->branch))) : Json(nullptr);
  j["alpha_star"] = r && r->argmax ? num((*r->argmax)[0]) : Json(nullptr);
  j["beta_star"] = r && r->argmax ? num((*r->argmax)[1]) : Json(nullptr);
  j["conjectured"] = feasible ? num(conjectured_value(row.params)) : Json(nullptr);
  j["boundary_value"] = r ? num(r->boundary_value) : Json(nullptr);
  j["wall_ms"] = num(row.wall_ms);
  j["status"] = row.status;
  j["reason"] = row.reason;
  return j;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

int cmd_sweep(const std::string& spec_path, const std::string& out_path,
              std::optional<std::string> format, int jobs, CommonFlags flags,
              const std::vector<std::string>& overridden, std::ostream& out) {
  std::ifstream in(spec_path);
  if (!in) throw DomainError("cannot read sweep spec " + spec_path);
  Json spec;
  try {
    spec = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("sweep spec does not parse: ") + e.what());
  }
  // Spec-file config applies unless the flag was given on the command line.
  if (spec.contains("config")) {
    const Json& c = spec.at("config");
    auto set = [&](const char* key, const char* flag, auto& field) {
      if (c.contains(key) && std::find(overridden.begin(), overridden.end(), flag) == overridden.end()) {
        field = c.at(key).get<std::decay_t<decltype(field)>>();
      }
    };
    set("tol", "--tol", flags.tol);
    set("starts", "--starts", flags.starts);
    set("seed", "--seed", flags.seed);
    set("max_iter", "--max-iter", flags.max_iter);
  }
  if (!format) format = spec.value("format", std::string("csv"));
  if (*format != "csv" && *format != "json") throw DomainError("format must be csv or json");
  const OptConfig cfg = flags.config();

  std::vector<SweepRow> rows;
  for (double p : read_axis(spec, "p")) {
    for (double m : read_axis(spec, "m")) {
      for (double l : read_axis(spec, "lambda")) rows.push_back({{p, m, l}, {}, 0.0, "", ""});
    }
  }

  std::ofstream file(out_path);
  if (!file) throw DomainError("cannot write " + out_path);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) run_cell(rows[i], cfg);
  };
  const int workers = std::clamp(jobs, 1, std::max(1, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (*format == "json") {
    Json arr = Json::array();
    for (const auto& row : rows) arr.push_back(row_json(row));
    file << Json{{"rows", arr}}.dump(2) << '\n';
  } else {
    for (std::size_t c = 0; c < kSweepColumns.size(); ++c) {
      file << (c ? "," : "") << kSweepColumns[c];
    }
    file << '\n';
    for (const auto& row : rows) {
      const Json j = row_json(row);
      for (std::size_t c = 0; c < kSweepColumns.size(); ++c) {
        file << (c ? "," : "") << csv_cell(j.at(kSweepColumns[c]));
      }
      file << '\n';
    }
  }
  file.close();
  if (!file) throw DomainError("failed writing " + out_path);
  long skipped = std::count_if(rows.begin(), rows.end(),
                               [](const SweepRow& r) { return r.status == "skipped"; });
  emit(out, Json{{"rows", rows.size()}, {"skipped", skipped}, {"out", out_path}});
  return kOk;
}

// ---------------------------------------------------------------------------
// apply

int cmd_apply(const Params& params, const std::string& in_path, const std::string& out_path,
              const std::string& op, std::ostream& out) {
  params.validate();
  if (op != "hm" && op != "i-minus-lambda-hm") {
    throw DomainError("--op must be hm or i-minus-lambda-hm");
  }
  std::ifstream in(in_path);
  if (!in) throw DomainError("cannot read " + in_path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("input does not parse: ") + e.what());
  }
  Json image;
  Json record{{"op", op}};
  if (io::is_piecewise(doc)) {
    const auto f = io::piecewise_from_json(doc);
    const auto g = op == "hm" ? apply_hm_closed(f, params) : apply_i_minus_lambda_hm(f, params);
    image = io::to_json(g);
    record["domain"] = {0.0, "inf"};
    record["input_norm"] = num(lp_norm_closed(f, params.p));
    record["image_norm"] = num(lp_norm_closed(g, params.p));
  } else {
    const auto f = io::sampled_from_json(doc);
    const auto g = op == "hm" ? apply_hm_sampled(f, params) : apply_i_minus_lambda_hm(f, params);
    image = io::to_json(g);
    record["domain"] = {num(f.grid.front()), num(f.grid.back())};
    record["input_norm"] = num(std::pow(lp_norm_pow_sampled(f, params.p), 1.0 / params.p));
    record["image_norm"] = num(std::pow(lp_norm_pow_sampled(g, params.p), 1.0 / params.p));
  }
  std::ofstream file(out_path);
  if (!file) throw DomainError("cannot write " + out_path);
  file << image.dump(2) << '\n';
  emit(out, record);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp L^p constants for I - lambda H_m and the matching martingale bounds",
               "hardynorm"};
  app.require_subcommand(1);

  Params params{0.0, 0.0, 0.0};
  CommonFlags common;

  auto* constant = app.add_subcommand("constant", "Sharp constant and its branch");
  add_params(constant, params);
  add_common(constant, common);

  double alpha = 0.0, beta = 0.0;
  auto* ratio = app.add_subcommand("ratio", "Two-point ratio at (alpha, beta)");
  add_params(ratio, params);
  ratio->add_option("--alpha", alpha)->required();
  ratio->add_option("--beta", beta)->required();

  auto* sharpness = app.add_subcommand("sharpness", "Extremal-family ratio at the argmax");
  add_params(sharpness, params);
  add_common(sharpness, common);

  MajorizeFlags mf;
  auto* majorize = app.add_subcommand("majorize", "Certify V <= U on a grid");
  add_params(majorize, params);
  add_common(majorize, common);
  majorize->add_option("--force-c", mf.force_c, "Use this C instead of the sharp one");
  majorize->add_option("--x-range", mf.x_range, "Check x in [-R, R]");
  majorize->add_option("--points", mf.points, "Grid points per slice");
  majorize->add_option("--check-tol", mf.tol, "Allowed V - U");

  MartingaleFlags mg;
  auto* martingale = app.add_subcommand("martingale", "Extremal martingale ratio and fuzzing");
  martingale->add_option("--alpha", mg.alpha)->required();
  martingale->add_option("--s", mg.s)->required();
  martingale->add_option("--n", mg.n)->required();
  martingale->add_option("--p", mg.p)->required();
  martingale->add_option("--fuzz", mg.fuzz, "Random trees to verify");
  martingale->add_option("--depth", mg.depth);
  martingale->add_option("--max-branch", mg.max_branch);
  martingale->add_option("--scale", mg.scale, "Child value spread");
  martingale->add_flag("--absolute", mg.absolute, "Check the |f_n| variant");
  martingale->add_option("--jobs", mg.jobs);
  martingale->add_option("--csv", mg.csv, "Write (seed, ratio, passed) rows here");
  add_common(martingale, common);

  std::string spec_path, out_path;
  std::optional<std::string> format;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Sharp constants over a (p, m, lambda) grid");
  sweep->add_option("--spec", spec_path, "JSON sweep spec")->required();
  sweep->add_option("--out", out_path, "Output file")->required();
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--jobs", jobs);
  add_common(sweep, common);

  std::string in_path, op = "hm";
  auto* apply = app.add_subcommand("apply", "Apply H_m or I - lambda H_m to a stored function");
  add_params(apply, params);
  apply->add_option("--in", in_path)->required();
  apply->add_option("--out", out_path)->required();
  apply->add_option("--op", op)->check(CLI::IsMember({"hm", "i-minus-lambda-hm"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (constant->parsed()) return cmd_constant(params, common, out);
    if (ratio->parsed()) return cmd_ratio(params, alpha, beta, out);
    if (sharpness->parsed()) return cmd_sharpness(params, common, out);
    if (majorize->parsed()) return cmd_majorize(params, common, mf, out, err);
    if (martingale->parsed()) return cmd_martingale(mg, common, out);
    if (sweep->parsed()) {
      std::vector<std::string> given;
      for (const char* flag : {"--tol", "--starts", "--seed", "--max-iter"}) {
        if (sweep->count(flag) > 0) given.emplace_back(flag);
      }
      return cmd_sweep(spec_path, out_path, format, jobs, common, given, out);
    }
    if (apply->parsed()) return cmd_apply(params, in_path, out_path, op, out);
  } catch (const CheckFailed&) {
    return kCheckFailed;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace hardynorm::cli
