#include "gqrs/cli.hpp"

#include "gqrs/copulas.hpp"
#include "gqrs/csv.hpp"
#include "gqrs/designs.hpp"
#include "gqrs/gan.hpp"
#include "gqrs/gofstats.hpp"
#include "gqrs/qrs.hpp"
#include "gqrs/risk.hpp"
#include "gqrs/rng.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

namespace gqrs::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::size_t threads = 1;
  int verbosity = 0;
  json artifacts = json::array();
  json inputs = json::array();
  json extras = json::object();
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  json defaults;
  std::vector<std::function<void(json&)>> overrides;
  std::string config_path;
  std::string manifest_path;
  std::function<fs::path(const json&, Context&)> execute;  // returns the manifest location
};

template <class T>
void flag(Command& cmd, const std::string& names, const std::string& key, const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = cmd.app->add_option(names, *value, help);
  cmd.overrides.push_back([value, opt, key](json& cfg) {
    if (opt->count() > 0) cfg[key] = *value;
  });
}

// ---- config helpers ------------------------------------------------------

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json file_record(const fs::path& path) {
  const std::string text = csv::read_text(path);
  return {{"path", path.string()}, {"bytes", text.size()}, {"fnv1a64", hex64(hash_name(text))}};
}

void write_artifact(Context& ctx, const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  csv::write_text_atomic(path, content);
  ctx.artifacts.push_back({{"path", path.string()}, {"bytes", content.size()}, {"fnv1a64", hex64(hash_name(content))}});
}

void note_input(Context& ctx, const fs::path& path) { ctx.inputs.push_back(file_record(path)); }

bool is_set(const json& cfg, const std::string& key) {
  return cfg.contains(key) && !cfg.at(key).is_null() && !(cfg.at(key).is_string() && cfg.at(key).get<std::string>().empty());
}

template <class T>
T get(const json& cfg, const std::string& key) {
  require(is_set(cfg, key), ErrorKind::InvalidArgument, "missing required setting '" + key + "'");
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidArgument, "setting '" + key + "' has the wrong type");
  }
}

fs::path output_path(const json& cfg, const std::string& default_name) {
  if (is_set(cfg, "out")) return fs::path(get<std::string>(cfg, "out"));
  return fs::path(get<std::string>(cfg, "out_dir")) / default_name;
}

csv::HeaderMode header_mode(const json& cfg) {
  const auto h = cfg.value("header", std::string("auto"));
  if (h == "auto") return csv::HeaderMode::Auto;
  if (h == "yes") return csv::HeaderMode::Present;
  if (h == "no") return csv::HeaderMode::Absent;
  throw Error(ErrorKind::InvalidArgument, "header must be auto, yes or no");
}

std::vector<std::string> dim_header(std::size_t k) {
  std::vector<std::string> h;
  for (std::size_t j = 0; j < k; ++j) h.push_back("dim" + std::to_string(j));
  return h;
}

copulas::CopulaSpec copula_from(const json& cfg) {
  const auto family = copulas::parse_family(get<std::string>(cfg, "family"));
  if (family == copulas::Family::MarshallOlkin) {
    if (is_set(cfg, "d"))
      require(get<std::size_t>(cfg, "d") == 2, ErrorKind::DimensionUnsupported, "Marshall-Olkin copula is bivariate");
    return copulas::CopulaSpec::marshall_olkin(get<double>(cfg, "alpha1"), get<double>(cfg, "alpha2"));
  }
  const auto d = get<std::size_t>(cfg, "d");
  const double theta = is_set(cfg, "theta") ? get<double>(cfg, "theta")
                                            : copulas::theta_from_tau(family, get<double>(cfg, "tau"));
  return family == copulas::Family::Clayton ? copulas::CopulaSpec::clayton(theta, d)
                                            : copulas::CopulaSpec::gumbel(theta, d);
}

json copula_defaults() {
  return {{"family", "clayton"}, {"theta", nullptr}, {"tau", nullptr},
          {"alpha1", nullptr},   {"alpha2", nullptr}, {"d", nullptr}};
}

void copula_flags(Command& cmd) {
  flag<std::string>(cmd, "--family", "family", "Copula family: clayton, gumbel, mo");
  flag<double>(cmd, "--theta", "theta", "Clayton/Gumbel parameter");
  flag<double>(cmd, "--tau", "tau", "Kendall's tau (used when --theta is absent)");
  flag<double>(cmd, "--alpha1", "alpha1", "Marshall-Olkin alpha1");
  flag<double>(cmd, "--alpha2", "alpha2", "Marshall-Olkin alpha2");
  flag<std::size_t>(cmd, "--d", "d", "Copula dimension");
}

json load_config(const std::string& path, const std::string& command) {
  json j = json::parse(csv::read_text(path), nullptr, false);
  require(!j.is_discarded() && j.is_object(), ErrorKind::Format, "config '" + path + "' is not a JSON object");
  if (j.contains("config") && j.contains("command")) {
    require(j.at("command") == command, ErrorKind::InvalidArgument,
            "manifest '" + path + "' belongs to command '" + j.at("command").get<std::string>() + "'");
    return j.at("config");
  }
  return j;
}

json resolve(const Command& cmd) {
  json cfg = cmd.defaults;
  if (!cmd.config_path.empty()) {
    const json file = load_config(cmd.config_path, cmd.name);
    require(file.is_object(), ErrorKind::Format, "config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      require(cfg.contains(key), ErrorKind::InvalidArgument, "unknown config key '" + key + "' for " + cmd.name);
      cfg[key] = value;
    }
  }
  for (const auto& apply : cmd.overrides) apply(cfg);
  return cfg;
}

// ---- subcommands ----------------------------------------------------------

fs::path run_design(const json& cfg, Context& ctx) {
  const auto family = get<std::string>(cfg, "family");
  qrs::DesignSpec spec = qrs::parse_design(family);
  if (spec.family == designs::Family::Sobol && family == "sobol")
    spec.randomize = designs::parse_randomization(get<std::string>(cfg, "randomize"));
  const auto n = get<std::size_t>(cfg, "n");
  const auto k = get<std::size_t>(cfg, "k");
  const auto points = qrs::make_design(spec, n, k, get<std::uint64_t>(cfg, "seed"));
  const auto path = output_path(cfg, "design.csv");
  write_artifact(ctx, path, csv::format_matrix(points.points(), dim_header(k)));
  ctx.out << "wrote " << n << " x " << k << " design to " << path.string() << "\n";
  return path.parent_path();
}

fs::path run_ingest(const json& cfg, Context& ctx) {
  const fs::path data = get<std::string>(cfg, "data");
  const auto table = csv::read_table(data, header_mode(cfg));
  note_input(ctx, data);
  const Matrix pseudo = copulas::pseudo_observations(table.values);
  const auto d = static_cast<std::size_t>(pseudo.cols());
  const auto path = output_path(cfg, "pseudo.csv");
  write_artifact(ctx, path, csv::format_matrix(pseudo, table.header.empty() ? dim_header(d) : table.header));
  ctx.out << "N=" << pseudo.rows() << " d=" << d << "\n";
  ctx.extras["N"] = pseudo.rows();
  ctx.extras["d"] = d;
  return path.parent_path();
}

fs::path run_train(const json& cfg, Context& ctx) {
  const fs::path data = get<std::string>(cfg, "data");
  const auto table = csv::read_table(data, header_mode(cfg));
  note_input(ctx, data);
  const Matrix pseudo = copulas::pseudo_observations(table.values);

  gan::GanConfig gc;
  gc.d = static_cast<std::size_t>(pseudo.cols());
  if (is_set(cfg, "d"))
    require(get<std::size_t>(cfg, "d") == gc.d, ErrorKind::DimensionMismatch,
            "data has " + std::to_string(gc.d) + " columns but --family-dim is " + std::to_string(get<std::size_t>(cfg, "d")));
  gc.k = get<std::size_t>(cfg, "k");
  gc.iterations = get<std::size_t>(cfg, "iterations");
  gc.batch_size = get<std::size_t>(cfg, "batch_size");
  gc.gen_hidden = get<std::vector<std::size_t>>(cfg, "gen_hidden");
  gc.disc_hidden = get<std::vector<std::size_t>>(cfg, "disc_hidden");
  gc.lr_g = get<double>(cfg, "lr_g");
  gc.lr_d = get<double>(cfg, "lr_d");
  gc.rmsprop_decay = get<double>(cfg, "rmsprop_decay");
  gc.rmsprop_epsilon = get<double>(cfg, "rmsprop_epsilon");
  gc.generator_loss = gan::parse_generator_loss(get<std::string>(cfg, "generator_loss"));
  gc.init = nn::parse_init_scheme(get<std::string>(cfg, "init"));
  gc.seed = get<std::uint64_t>(cfg, "seed");

  const gan::GanModel model = gan::gan_train(pseudo, gc);
  const auto path = output_path(cfg, "model.gqrs.json");
  write_artifact(ctx, path, gan::gan_serialize(model));
  for (const auto& w : model.warnings) ctx.err << "warning: " << w << "\n";
  ctx.out << "trained " << gc.iterations << " iterations on N=" << pseudo.rows() << " d=" << gc.d;
  if (!model.loss_trace.empty()) {
    const auto& last = model.loss_trace.back();
    ctx.out << " disc_objective=" << csv::format_double(last.disc_objective)
            << " gen_loss=" << csv::format_double(last.gen_loss);
    ctx.extras["final_losses"] = {{"disc_objective", last.disc_objective}, {"gen_loss", last.gen_loss}};
  }
  ctx.out << "\n";
  ctx.extras["saturated_steps"] = model.saturated_steps;
  ctx.extras["warnings"] = model.warnings;
  return path.parent_path();
}

fs::path run_sample(const json& cfg, Context& ctx) {
  const auto method = get<std::string>(cfg, "method");
  const auto n = get<std::size_t>(cfg, "n");
  const auto seed = get<std::uint64_t>(cfg, "seed");
  const qrs::DesignSpec design = qrs::parse_design(get<std::string>(cfg, "design"));
  Matrix samples;
  if (method == "cdm") {
    const auto spec = copula_from(cfg);
    samples = copulas::sample_cdm(spec, qrs::make_design(design, n, spec.dim(), seed));
  } else if (method == "gan") {
    const fs::path model_path = get<std::string>(cfg, "model");
    const auto model = gan::gan_deserialize(csv::read_text(model_path));
    note_input(ctx, model_path);
    const auto result = qrs::qrs_sample(model, {design, n, seed});
    samples = result.samples;
    ctx.extras["clamped"] = result.clamped;
    ctx.extras["output_clamped"] = result.output_clamped;
  } else {
    throw Error(ErrorKind::InvalidArgument, "method must be cdm or gan");
  }
  const auto path = output_path(cfg, "samples.csv");
  write_artifact(ctx, path, csv::format_matrix(samples, dim_header(static_cast<std::size_t>(samples.cols()))));
  ctx.out << "wrote " << samples.rows() << " x " << samples.cols() << " samples to " << path.string() << "\n";
  return path.parent_path();
}

Matrix read_unit_sample(const fs::path& path, const json& cfg, Context& ctx) {
  const auto table = csv::read_table(path, header_mode(cfg));
  note_input(ctx, path);
  require(table.values.rows() >= 1, ErrorKind::InvalidArgument, "'" + path.string() + "' has no rows");
  require((table.values.array() >= 0.0).all() && (table.values.array() <= 1.0).all(), ErrorKind::Domain,
          "'" + path.string() + "' has entries outside [0,1]");
  return table.values;
}

fs::path run_gof(const json& cfg, Context& ctx) {
  const Matrix a = read_unit_sample(get<std::string>(cfg, "sample"), cfg, ctx);
  const bool two_sample = is_set(cfg, "ref");
  require(two_sample != is_set(cfg, "against"), ErrorKind::InvalidArgument, "give exactly one of --against or --ref");
  std::string statistic, scaling = "none";
  std::size_t n_ref = 0;
  double value = 0.0;
  if (two_sample) {
    const Matrix b = read_unit_sample(get<std::string>(cfg, "ref"), cfg, ctx);
    const auto sc = gof::parse_scaling(get<std::string>(cfg, "scaling"));
    value = gof::cvm_two_sample(a, b, sc);
    statistic = "S_Nn";
    scaling = std::string(gof::to_string(sc));
    n_ref = static_cast<std::size_t>(b.rows());
  } else {
    json c = cfg;
    c["family"] = cfg.at("against");
    if (!is_set(c, "d")) c["d"] = a.cols();
    value = gof::cvm_one_sample(a, copula_from(c));
    statistic = "S_n";
  }
  ctx.out << csv::format_double(value) << "\n";
  const auto path = output_path(cfg, "gof.csv");
  write_artifact(ctx, path,
                 "statistic,scaling,n,N,d,value\n" + statistic + "," + scaling + "," + std::to_string(a.rows()) + "," +
                     std::to_string(n_ref) + "," + std::to_string(a.cols()) + "," + csv::format_double(value) + "\n");
  ctx.extras["value"] = value;
  return path.parent_path();
}

fs::path run_es_study(const json& cfg, Context& ctx) {
  risk::StudyConfig sc;
  sc.es.alpha = get<double>(cfg, "level");
  sc.copula = copula_from(cfg);
  sc.methods.clear();
  for (const auto& m : get<std::vector<std::string>>(cfg, "methods")) sc.methods.push_back(risk::parse_method(m));
  sc.n_grid = get<std::vector<std::size_t>>(cfg, "n_grid");
  sc.replications = get<std::size_t>(cfg, "replications");
  sc.master_seed = get<std::uint64_t>(cfg, "seed");
  sc.sobol_randomization = designs::parse_randomization(get<std::string>(cfg, "randomize"));
  sc.threads = ctx.threads;

  std::optional<gan::GanModel> model;
  if (is_set(cfg, "model")) {
    const fs::path model_path = get<std::string>(cfg, "model");
    model = gan::gan_deserialize(csv::read_text(model_path));
    note_input(ctx, model_path);
  }
  const auto result = risk::variance_study(sc, model ? &*model : nullptr);
  for (const auto& reason : result.skipped) ctx.err << "skipped: " << reason << "\n";

  const fs::path dir = get<std::string>(cfg, "out_dir");
  write_artifact(ctx, dir / "records.csv", risk::records_csv(result));
  write_artifact(ctx, dir / "summary.csv", risk::summary_csv(result));
  write_artifact(ctx, dir / "summary.svg", risk::summary_svg(result));
  ctx.extras["skipped"] = result.skipped;
  ctx.out << result.records.size() << " records, " << result.summary.size() << " summary rows, "
          << result.skipped.size() << " skipped; wrote " << dir.string() << "\n";
  if (ctx.verbosity > 0) ctx.out << risk::summary_csv(result);
  return dir;
}

// ---- wiring ---------------------------------------------------------------

std::size_t default_threads() {
  if (const char* env = std::getenv("GQRS_THREADS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidArgument, "GQRS_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message, const std::string& command) {
  err << json{{"error", {{"kind", kind}, {"message", message}, {"command", command}}}}.dump() << "\n";
}

std::vector<std::unique_ptr<Command>> build(CLI::App& app, std::size_t& threads_flag, int& verbosity) {
  std::vector<std::unique_ptr<Command>> cmds;
  auto add = [&](const std::string& name, const std::string& help, json defaults,
                 std::function<fs::path(const json&, Context&)> execute) -> Command& {
    auto cmd = std::make_unique<Command>();
    cmd->name = name;
    cmd->app = app.add_subcommand(name, help);
    defaults["seed"] = defaults.value("seed", json(0));
    defaults["out_dir"] = defaults.value("out_dir", json("."));
    cmd->defaults = std::move(defaults);
    cmd->execute = std::move(execute);
    cmd->app->add_option("--config", cmd->config_path, "JSON config or a manifest.json from an earlier run");
    cmd->app->add_option("--manifest", cmd->manifest_path, "Manifest location (default: <output dir>/manifest.json)");
    cmd->app->add_option("--threads", threads_flag, "Worker threads (default: $GQRS_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    cmd->app->add_flag("-v,--verbose", verbosity, "More output");
    flag<std::uint64_t>(*cmd, "--seed", "seed", "Master seed");
    flag<std::string>(*cmd, "--out-dir", "out_dir", "Output directory");
    cmds.push_back(std::move(cmd));
    return *cmds.back();
  };

  {
    auto& c = add("design", "Generate a space-filling design",
                  {{"family", "sobol"}, {"randomize", "shift"}, {"n", nullptr}, {"k", nullptr}, {"out", ""}}, run_design);
    flag<std::string>(c, "--family", "family", "sobol, sobol-owen, lhd, oalhd or random");
    flag<std::string>(c, "--randomize", "randomize", "Sobol randomization: none, shift or owen");
    flag<std::size_t>(c, "--n", "n", "Number of points");
    flag<std::size_t>(c, "--k", "k", "Dimension");
    flag<std::string>(c, "--out", "out", "Output CSV (default: <out-dir>/design.csv)");
  }
  {
    auto& c = add("ingest", "Rank-transform a data CSV into pseudo-observations",
                  {{"data", ""}, {"header", "auto"}, {"out", ""}}, run_ingest);
    auto data = std::make_shared<std::string>();
    auto* pos = c.app->add_option("csv", *data, "Data CSV");
    auto* opt = c.app->add_option("--data", *data, "Data CSV");
    auto* yes = c.app->add_flag("--header", "First line is a header");
    auto* no = c.app->add_flag("--no-header", "First line is data");
    yes->excludes(no);
    pos->excludes(opt);
    c.overrides.push_back([=](json& cfg) {
      if (pos->count() + opt->count() > 0) cfg["data"] = *data;
      if (yes->count() > 0) cfg["header"] = "yes";
      if (no->count() > 0) cfg["header"] = "no";
    });
    flag<std::string>(c, "--out", "out", "Output CSV (default: <out-dir>/pseudo.csv)");
  }
  {
    const gan::GanConfig g;
    auto& c = add("train", "Train a copula GAN on data (ranks are taken first)",
                  {{"data", ""},
                   {"header", "auto"},
                   {"d", nullptr},
                   {"k", g.k},
                   {"iterations", g.iterations},
                   {"batch_size", g.batch_size},
                   {"gen_hidden", g.gen_hidden},
                   {"disc_hidden", g.disc_hidden},
                   {"lr_g", g.lr_g},
                   {"lr_d", g.lr_d},
                   {"rmsprop_decay", g.rmsprop_decay},
                   {"rmsprop_epsilon", g.rmsprop_epsilon},
                   {"generator_loss", gan::to_string(g.generator_loss)},
                   {"init", nn::to_string(g.init)},
                   {"out", ""}},
                  run_train);
    flag<std::string>(c, "--data", "data", "Data or pseudo-observation CSV");
    flag<std::string>(c, "--header", "header", "auto, yes or no");
    flag<std::size_t>(c, "--family-dim,--d", "d", "Expected data dimension");
    flag<std::size_t>(c, "--k", "k", "Latent dimension (0: same as d)");
    flag<std::size_t>(c, "--iters", "iterations", "Training iterations");
    flag<std::size_t>(c, "--batch", "batch_size", "Minibatch size");
    flag<std::vector<std::size_t>>(c, "--gen-hidden", "gen_hidden", "Generator hidden widths");
    flag<std::vector<std::size_t>>(c, "--disc-hidden", "disc_hidden", "Discriminator hidden widths");
    flag<double>(c, "--lr-g", "lr_g", "Generator learning rate");
    flag<double>(c, "--lr-d", "lr_d", "Discriminator learning rate");
    flag<std::string>(c, "--loss", "generator_loss", "saturating or non-saturating");
    flag<std::string>(c, "--init", "init", "scaled-normal or raw-normal");
    flag<std::string>(c, "--out", "out", "Model file (default: <out-dir>/model.gqrs.json)");
  }
  {
    json d = copula_defaults();
    d.update({{"method", "cdm"}, {"model", ""}, {"design", "sobol"}, {"n", nullptr}, {"out", ""}});
    auto& c = add("sample", "Draw copula samples by CDM or from a trained GAN", d, run_sample);
    flag<std::string>(c, "--method", "method", "cdm or gan");
    flag<std::string>(c, "--model", "model", "Model file for --method gan");
    flag<std::string>(c, "--design", "design", "sobol, sobol-owen, lhd, oalhd or random");
    flag<std::size_t>(c, "--n", "n", "Number of samples");
    copula_flags(c);
    flag<std::string>(c, "--out", "out", "Output CSV (default: <out-dir>/samples.csv)");
  }
  {
    json d = copula_defaults();
    d.erase("family");
    d.update({{"sample", ""}, {"against", ""}, {"ref", ""}, {"scaling", "sqrt"}, {"header", "auto"}, {"out", ""}});
    auto& c = add("gof", "Cramer-von Mises statistics", d, run_gof);
    flag<std::string>(c, "--sample", "sample", "Sample CSV in [0,1]^d");
    flag<std::string>(c, "--against", "against", "Copula family for the one-sample statistic");
    flag<std::string>(c, "--ref", "ref", "Reference sample CSV for the two-sample statistic");
    flag<std::string>(c, "--scaling", "scaling", "Two-sample scaling: sqrt or linear");
    flag<double>(c, "--theta", "theta", "Clayton/Gumbel parameter");
    flag<double>(c, "--tau", "tau", "Kendall's tau (used when --theta is absent)");
    flag<double>(c, "--alpha1", "alpha1", "Marshall-Olkin alpha1");
    flag<double>(c, "--alpha2", "alpha2", "Marshall-Olkin alpha2");
    flag<std::size_t>(c, "--d", "d", "Copula dimension (default: sample width)");
    flag<std::string>(c, "--out", "out", "Record CSV (default: <out-dir>/gof.csv)");
  }
  {
    json d = copula_defaults();
    d.update({{"theta", 2.0 / 3.0},
              {"d", 3},
              {"level", 0.99},
              {"methods", {"CdmMc", "CdmSobol"}},
              {"n_grid", {1000, 2000, 5000, 10000}},
              {"replications", 25},
              {"randomize", "shift"},
              {"model", ""},
              {"out_dir", "results"}});
    auto& c = add("es-study", "Replicated ES variance study", d, run_es_study);
    copula_flags(c);
    flag<double>(c, "--level", "level", "ES level alpha");
    flag<std::vector<std::string>>(c, "--methods", "methods", "CdmMc CdmSobol GanSobol GanLhd GanOaLhd GanMc");
    flag<std::vector<std::size_t>>(c, "--n-grid", "n_grid", "Sample sizes");
    flag<std::size_t>(c, "--replications,-B", "replications", "Replications per (method, n)");
    flag<std::string>(c, "--randomize", "randomize", "Sobol randomization: shift or owen");
    flag<std::string>(c, "--model", "model", "Trained model for GAN methods");
  }
  return cmds;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gqrs: quasi-random copula sampling with generative networks"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::size_t threads_flag = 0;
  int verbosity = 0;
  auto cmds = build(app, threads_flag, verbosity);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    error_line(err, "invalid_argument", e.what(), "");
    return 2;
  }

  Command* cmd = nullptr;
  for (auto& c : cmds)
    if (c->app->parsed()) cmd = c.get();
  try {
    Context ctx{out, err};
    ctx.threads = threads_flag > 0 ? threads_flag : default_threads();
    ctx.verbosity = verbosity;
    const json cfg = resolve(*cmd);
    const fs::path dir = cmd->execute(cfg, ctx);
    const fs::path manifest =
        cmd->manifest_path.empty() ? (dir.empty() ? fs::path(".") : dir) / "manifest.json" : fs::path(cmd->manifest_path);
    json m = {{"tool", "gqrs"},
              {"tool_version", kToolVersion},
              {"command", cmd->name},
              {"config", cfg},
              {"inputs", ctx.inputs},
              {"artifacts", ctx.artifacts},
              {"formats", {{"model", std::string(gan::kGanFormat) + "/" + std::to_string(gan::kGanFormatVersion)}}},
              {"runtime", {{"threads", ctx.threads}}},
              {"results", ctx.extras}};
    if (manifest.has_parent_path()) fs::create_directories(manifest.parent_path());
    csv::write_text_atomic(manifest, m.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    error_line(err, std::string(to_string(e.kind())), e.what(), cmd->name);
  } catch (const fs::filesystem_error& e) {
    error_line(err, "io_error", e.what(), cmd->name);
  } catch (const std::exception& e) {
    error_line(err, "internal", e.what(), cmd->name);
  }
  return 1;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gqrs::cli
