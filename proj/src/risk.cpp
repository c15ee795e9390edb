#include "gqrs/risk.hpp"

#include "gqrs/csv.hpp"
#include "gqrs/normal.hpp"
#include "gqrs/qrs.hpp"
#include "gqrs/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace gqrs::risk {

void EsSpec::validate() const {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "ES level must lie in (0,1)");
}

std::vector<double> aggregate_loss(const Matrix& u) {
  std::vector<double> out(static_cast<std::size_t>(u.rows()), 0.0);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double v = u(i, j);
      require(v > 0.0 && v < 1.0, ErrorKind::Domain, "aggregate_loss: entries must lie strictly inside (0,1)");
      s += qrs::normal_inverse_cdf(v);
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

namespace {
constexpr double kIndexTolerance = 1e-9;
}

std::size_t var_index(std::size_t n, double alpha) {
  EsSpec{alpha}.validate();
  const double x = static_cast<double>(n) * alpha;
  return static_cast<std::size_t>(std::ceil(x - kIndexTolerance * std::max(1.0, x)));
}

namespace {

void check_tail(std::size_t n, double alpha) {
  EsSpec{alpha}.validate();
  const double tail = static_cast<double>(n) * (1.0 - alpha);
  require(tail >= 1.0 - kIndexTolerance * std::max(1.0, tail), ErrorKind::InvalidArgument,
          "expected_shortfall: need n * (1 - alpha) >= 1, got n = " + std::to_string(n));
}

void check_finite(const std::vector<double>& losses) {
  for (double v : losses) require(std::isfinite(v), ErrorKind::NonFinite, "losses contain a non-finite value");
}

}  // namespace

double value_at_risk(std::vector<double> losses, double alpha) {
  check_tail(losses.size(), alpha);
  check_finite(losses);
  const std::size_t m = std::max<std::size_t>(var_index(losses.size(), alpha), 1);
  std::nth_element(losses.begin(), losses.begin() + static_cast<std::ptrdiff_t>(m - 1), losses.end());
  return losses[m - 1];
}

double expected_shortfall(std::vector<double> losses, double alpha) {
  check_tail(losses.size(), alpha);
  check_finite(losses);
  std::sort(losses.begin(), losses.end());
  const std::size_t n = losses.size();
  const std::size_t m = var_index(n, alpha);
  if (m >= n) return losses.back();
  double sum = 0.0;
  for (std::size_t i = m; i < n; ++i) sum += losses[i];
  return sum / static_cast<double>(n - m);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::CdmMc: return "CdmMc";
    case Method::CdmSobol: return "CdmSobol";
    case Method::GanSobol: return "GanSobol";
    case Method::GanLhd: return "GanLhd";
    case Method::GanOaLhd: return "GanOaLhd";
    case Method::GanMc: return "GanMc";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (name == to_string(m)) return m;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

bool needs_model(Method m) { return m != Method::CdmMc && m != Method::CdmSobol; }

std::string_view design_label(Method m) {
  switch (m) {
    case Method::CdmMc:
    case Method::GanMc: return "random";
    case Method::CdmSobol:
    case Method::GanSobol: return "sobol";
    case Method::GanLhd: return "lhd";
    case Method::GanOaLhd: return "oalhd";
  }
  return "?";
}

std::uint64_t replication_seed(std::uint64_t master, Method m, std::size_t r) {
  return mix64(master ^ hash_name(to_string(m)) ^ static_cast<std::uint64_t>(r));
}

Matrix method_sample(Method m, std::size_t n, std::uint64_t seed, const copulas::CopulaSpec& copula,
                     const gan::GanModel* model, designs::Randomization sobol_randomization) {
  const std::size_t d = copula.dim();
  switch (m) {
    case Method::CdmMc: return copulas::sample_cdm(copula, designs::pseudo_random_points(n, d, seed));
    case Method::CdmSobol: return copulas::sample_cdm(copula, designs::sobol_points(n, d, seed, sobol_randomization));
    default: break;
  }
  require(model != nullptr, ErrorKind::InvalidArgument, std::string(to_string(m)) + " requires a trained model");
  qrs::QrsRequest req;
  req.n = n;
  req.seed = seed;
  switch (m) {
    case Method::GanSobol: req.design = {designs::Family::Sobol, sobol_randomization}; break;
    case Method::GanLhd: req.design = {designs::Family::Lhd, designs::Randomization::None}; break;
    case Method::GanOaLhd: req.design = {designs::Family::OaLhd, designs::Randomization::None}; break;
    default: req.design = {designs::Family::PseudoRandom, designs::Randomization::None}; break;
  }
  return qrs::qrs_sample(*model, req).samples;
}

std::string infeasibility(Method m, std::size_t n, const StudyConfig& config, const gan::GanModel* model) {
  const auto label = std::string(to_string(m)) + " n=" + std::to_string(n) + ": ";
  const double tail = static_cast<double>(n) * (1.0 - config.es.alpha);
  if (tail < 1.0 - kIndexTolerance * std::max(1.0, tail)) return label + "n * (1 - alpha) < 1";
  if (needs_model(m)) {
    if (model == nullptr) return label + "no trained model supplied";
    if (model->output_dim() != config.copula.dim()) return label + "model output dimension differs from copula dimension";
  }
  if (m == Method::GanOaLhd) {
    const std::size_t s = qrs::prime_square_root(n);
    if (s == 0) return label + "OA-LHD needs n = s^2 with s prime";
    if (model && model->latent_dim() > s + 1) return label + "OA-LHD needs latent dimension <= s + 1";
  }
  if (m == Method::CdmSobol || m == Method::GanSobol) {
    const std::size_t k = m == Method::CdmSobol ? config.copula.dim() : (model ? model->latent_dim() : 0);
    if (k > designs::kMaxSobolDimension) return label + "dimension exceeds the Sobol table";
  }
  if (m == Method::CdmMc || m == Method::CdmSobol) {
    if (config.copula.family() == copulas::Family::Gumbel && config.copula.dim() > copulas::kMaxGumbelCdmDimension)
      return label + "Gumbel conditional sampling supports d <= 3";
  }
  return {};
}

std::optional<double> sample_sd(const std::vector<double>& values) {
  if (values.size() < 2) return std::nullopt;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

StudyResult variance_study(const StudyConfig& config, const gan::GanModel* model) {
  config.es.validate();
  require(config.replications >= 1, ErrorKind::InvalidArgument, "variance_study: need at least one replication");

  StudyResult result;
  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  std::vector<std::size_t> grid = config.n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  struct Cell {
    Method method;
    std::size_t n;
  };
  std::vector<Cell> cells;
  for (Method m : methods)
    for (std::size_t n : grid) {
      auto reason = infeasibility(m, n, config, model);
      if (reason.empty())
        cells.push_back({m, n});
      else
        result.skipped.push_back(std::move(reason));
    }

  const std::size_t B = config.replications;
  result.records.resize(cells.size() * B);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < result.records.size(); job = next++) {
      const Cell& cell = cells[job / B];
      const std::size_t r = job % B;
      try {
        const Matrix u = method_sample(cell.method, cell.n, replication_seed(config.master_seed, cell.method, r),
                                       config.copula, model, config.sobol_randomization);
        const double es = expected_shortfall(aggregate_loss(u), config.es.alpha);
        require(std::isfinite(es), ErrorKind::NonFinite, "non-finite ES estimate");
        result.records[job] = {cell.method, cell.n, r, es};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = result.records.size();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(result.records.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> values;
    for (std::size_t r = 0; r < B; ++r) values.push_back(result.records[c * B + r].estimate);
    result.summary.push_back({cells[c].method, cells[c].n, sample_sd(values)});
  }
  return result;
}

std::string records_csv(const StudyResult& result) {
  std::string out = "method,design,n,replication,estimate\n";
  for (const auto& r : result.records) {
    out += std::string(to_string(r.method)) + "," + std::string(design_label(r.method)) + "," + std::to_string(r.n) +
           "," + std::to_string(r.replication) + "," + csv::format_double(r.estimate) + "\n";
  }
  return out;
}

std::string summary_csv(const StudyResult& result) {
  std::string out = "method,design,n,sd\n";
  for (const auto& s : result.summary) {
    out += std::string(to_string(s.method)) + "," + std::string(design_label(s.method)) + "," + std::to_string(s.n) +
           "," + (s.sd ? csv::format_double(*s.sd) : std::string("NA")) + "\n";
  }
  return out;
}

std::string summary_svg(const StudyResult& result) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 30, Bm = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : result.summary) {
    if (!s.sd || !(*s.sd > 0.0)) continue;
    const double x = std::log10(static_cast<double>(s.n)), y = std::log10(*s.sd);
    xmin = std::min(xmin, x), xmax = std::max(xmax, x), ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << L << "\" y=\"18\">log10(sd) vs log10(n)</text>\n";
  svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - Bm
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!std::isfinite(xmin)) {
    svg << "<text x=\"" << L + 10 << "\" y=\"" << T + 20 << "\">no standard deviations available</text>\n</svg>\n";
    return svg.str();
  }
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - Bm - (y - ymin) / (ymax - ymin) * (H - T - Bm); };
  svg << "<text x=\"" << L << "\" y=\"" << H - 30 << "\">" << xmin << "</text>\n";
  svg << "<text x=\"" << W - R - 30 << "\" y=\"" << H - 30 << "\">" << xmax << "</text>\n";
  svg << "<text x=\"5\" y=\"" << H - Bm << "\">" << ymin << "</text>\n";
  svg << "<text x=\"5\" y=\"" << T + 10 << "\">" << ymax << "</text>\n";
  svg << "<text x=\"" << (W - R + L) / 2 - 20 << "\" y=\"" << H - 12 << "\">log10 n</text>\n";

  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  std::size_t series = 0;
  for (Method m : kAllMethods) {
    std::string points;
    for (const auto& s : result.summary) {
      if (s.method != m || !s.sd || !(*s.sd > 0.0)) continue;
      points += std::to_string(px(std::log10(static_cast<double>(s.n)))) + "," + std::to_string(py(std::log10(*s.sd))) + " ";
    }
    if (points.empty()) continue;
    const char* color = colors[static_cast<std::size_t>(m) % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    const double ly = T + 15 + 18 * static_cast<double>(series++);
    svg << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\">" << to_string(m) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument, "loglog_slope: need two or more points");
  double mx = 0, my = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, ErrorKind::Domain, "loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  require(sxx > 0, ErrorKind::Domain, "loglog_slope: x values must not all be equal");
  return sxy / sxx;
}

}  // namespace gqrs::risk
