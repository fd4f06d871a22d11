#include "hjive/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "hjive/errors.hpp"
#include "hjive/estimators.hpp"
#include "hjive/io.hpp"
#include "hjive/metrics.hpp"

namespace hjive {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MethodOutcome {
  OrthonormalBasis basis;
  WeightVector weights;
  double gap = 0.0;
};

WeightVector heterojive_weights(const ExperimentConfig& config, const ReplicateInstance& inst) {
  const Index K = inst.data.views_count();
  switch (config.weight_source.kind) {
    case WeightSourceKind::Equal: return WeightVector::uniform(K);
    case WeightSourceKind::Fixed: return WeightVector(std::span<const double>(config.weight_source.fixed));
    case WeightSourceKind::Oracle: return oracle_weights(inst.truth, config.iteration).final();
    case WeightSourceKind::DataDriven: {
      DataDrivenOptions options;
      options.iteration = config.iteration;
      options.refresh_each_iter = config.refresh_each_iter;
      return data_driven_weights(inst.data, inst.truth.ranks(), options).weights;
    }
  }
  return WeightVector::uniform(K);
}

MethodOutcome run_method(const ExperimentConfig& config, Method method, const ReplicateInstance& inst) {
  const RankSpec ranks = inst.truth.ranks();
  switch (method) {
    case Method::HeteroJive: {
      const WeightVector w = heterojive_weights(config, inst);
      JiveFit fit = heterojive(inst.data, ranks, w);
      return {std::move(fit.u_hat), w, fit.spectral_gap};
    }
    case Method::Ajive: {
      JiveFit fit = ajive(inst.data, ranks);
      return {std::move(fit.u_hat), fit.weights, fit.spectral_gap};
    }
    case Method::StackSvd: {
      StackResult res = stack_svd(inst.data, ranks.joint);
      return {std::move(res.basis), WeightVector::uniform(inst.data.views_count()), res.gap};
    }
  }
  raise(ErrorKind::InvalidInput, "unknown method");
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t master, Index K, Index replicate) {
  return derive_seed(master, {stable_hash("replicate"), static_cast<std::uint64_t>(K),
                              static_cast<std::uint64_t>(replicate)});
}

ReplicateInstance make_replicate(const ExperimentConfig& config, Index K, Index replicate) {
  Rng rng(replicate_seed(config.seed, K, replicate));
  const SynthesisSpec spec = synthesis_spec(config, K, rng);
  ReplicateInstance inst;
  inst.truth = make_ground_truth(rng, spec);
  inst.data = synthesize_views(rng, inst.truth);
  return inst;
}

std::vector<ResultRow> run_cell(const ExperimentConfig& config, Index K, Index replicate) {
  std::vector<ResultRow> rows;
  std::optional<ReplicateInstance> inst;
  std::string setup_failure;
  try {
    inst = make_replicate(config, K, replicate);
  } catch (const Error& e) {
    setup_failure = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    setup_failure = std::string("internal: ") + e.what();
  }

  for (Method method : config.methods) {
    ResultRow row;
    row.method = std::string(to_string(method));
    row.K = K;
    row.replicate = replicate;
    if (!inst) {
      row.error = row.theta_realized = row.spectral_gap = kNaN;
      row.reason = setup_failure;
      rows.push_back(std::move(row));
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const MethodOutcome out = run_method(config, method, *inst);
      row.error = subspace_error(out.basis, inst->truth.u);
      row.theta_realized = realized_theta(inst->truth, out.weights);
      row.spectral_gap = out.gap;
      row.weights = out.weights.to_std();
    } catch (const Error& e) {
      row.error = row.theta_realized = row.spectral_gap = kNaN;
      row.reason = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
      row.error = row.theta_realized = row.spectral_gap = kNaN;
      row.reason = std::string("internal: ") + e.what();
    }
    row.wallclock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_simulation(const ExperimentConfig& config, unsigned jobs) {
  config.validate();
  const std::size_t n_k = config.K_grid.size();
  const auto n_rep = static_cast<std::size_t>(config.replicates);
  const std::size_t cells = n_k * n_rep;
  std::vector<std::vector<ResultRow>> by_cell(cells);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++)
      by_cell[c] = run_cell(config, config.K_grid[c / n_rep], static_cast<Index>(c % n_rep));
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRow> rows;
  rows.reserve(cells * config.methods.size());
  for (std::size_t m = 0; m < config.methods.size(); ++m)
    for (std::size_t c = 0; c < cells; ++c) rows.push_back(by_cell[c][m]);
  return rows;
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  for (Method method : config.methods) {
    for (Index K : config.K_grid) {
      SummaryRow s;
      s.method = std::string(to_string(method));
      s.K = K;
      double sum = 0.0;
      std::vector<double> values;
      for (const auto& row : rows) {
        if (row.method != s.method || row.K != K) continue;
        if (std::isnan(row.error)) {
          ++s.failed;
          continue;
        }
        values.push_back(row.error);
        sum += row.error;
      }
      s.ok = static_cast<Index>(values.size());
      s.mean = values.empty() ? kNaN : sum / static_cast<double>(values.size());
      if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
      } else {
        s.se = kNaN;
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  std::string text = "method,K,replicate,error,theta_realized,spectral_gap,weights,reason\n";
  for (const auto& row : rows) {
    std::string weights;
    for (std::size_t i = 0; i < row.weights.size(); ++i) {
      if (i > 0) weights += ';';
      weights += io::format_double(row.weights[i]);
    }
    text += row.method + ',' + std::to_string(row.K) + ',' + std::to_string(row.replicate) + ',' +
            io::format_double(row.error) + ',' + io::format_double(row.theta_realized) + ',' +
            io::format_double(row.spectral_gap) + ',' + weights + ',' + csv_quote(row.reason) + '\n';
  }
  io::write_text(path, text);
}

void write_timings_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  std::string text = "method,K,replicate,wallclock_ms\n";
  for (const auto& row : rows)
    text += row.method + ',' + std::to_string(row.K) + ',' + std::to_string(row.replicate) + ',' +
            io::format_double(row.wallclock_ms) + '\n';
  io::write_text(path, text);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::string text = "method,K,sqrtK,mean_error,se_error,n_ok,n_failed\n";
  for (const auto& s : rows) {
    text += s.method + ',' + std::to_string(s.K) + ',' +
            io::format_double(std::sqrt(static_cast<double>(s.K))) + ',' + io::format_double(s.mean) +
            ',' + io::format_double(s.se) + ',' + std::to_string(s.ok) + ',' + std::to_string(s.failed) +
            '\n';
  }
  io::write_text(path, text);
}

}  // namespace hjive
