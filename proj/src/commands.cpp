#include "hjive/commands.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "hjive/config.hpp"
#include "hjive/estimators.hpp"
#include "hjive/io.hpp"
#include "hjive/metrics.hpp"
#include "hjive/simulate.hpp"

namespace hjive {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return 1;
    case ErrorKind::Io: return 2;
    default: return 3;
  }
}

namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) raise(ErrorKind::Io, "cannot create directory '" + dir.string() + "'");
}

std::string indexed(const std::string& stem, Index k) { return stem + "_" + std::to_string(k + 1) + ".csv"; }

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

std::string trace_status(TraceStatus s) {
  switch (s) {
    case TraceStatus::Converged: return "converged";
    case TraceStatus::MaxIterations: return "max_iterations";
    case TraceStatus::Aborted: return "aborted";
  }
  return "max_iterations";
}

json to_json(const WeightTrace& trace) {
  json iterates = json::array();
  for (const auto& w : trace.iterates) iterates.push_back(w.to_std());
  json costs = json::array();
  for (const auto& c : trace.costs) costs.push_back(to_json(c));
  json j;
  j["iterates"] = iterates;
  j["costs"] = costs;
  j["steps"] = trace.steps;
  j["converged"] = trace.converged;
  j["iterations_used"] = trace.iterations_used;
  j["status"] = trace_status(trace.status);
  if (!trace.abort_reason.empty()) j["abort_reason"] = trace.abort_reason;
  return j;
}

MultiViewData read_views(const std::vector<std::string>& patterns) {
  const std::vector<fs::path> files = io::expand_views(patterns);
  if (files.empty()) raise(ErrorKind::InvalidInput, "no view files given");
  MultiViewData data;
  for (const auto& f : files) data.views.push_back(io::read_csv_matrix(f));
  for (std::size_t k = 1; k < data.views.size(); ++k) {
    if (data.views[k].rows() != data.views.front().rows())
      raise(ErrorKind::InvalidInput, "'" + files[k].string() + "' has " +
                                         std::to_string(data.views[k].rows()) + " rows but '" +
                                         files.front().string() + "' has " +
                                         std::to_string(data.views.front().rows()));
  }
  data.validate();
  return data;
}

RankSpec parse_ranks(const std::string& text, Index views) {
  const std::vector<double> values = io::parse_number_list(text);
  for (double v : values)
    if (v < 0 || v != std::floor(v)) raise(ErrorKind::InvalidInput, "ranks must be nonnegative integers");
  RankSpec ranks;
  ranks.joint = static_cast<Index>(values.front());
  if (values.size() == 2 && views != 1) {
    ranks.individual.assign(static_cast<std::size_t>(views), static_cast<Index>(values[1]));
  } else {
    if (static_cast<Index>(values.size()) != views + 1)
      raise(ErrorKind::InvalidInput, "--ranks lists " + std::to_string(values.size() - 1) +
                                         " individual ranks for " + std::to_string(views) + " views");
    for (std::size_t i = 1; i < values.size(); ++i) ranks.individual.push_back(static_cast<Index>(values[i]));
  }
  ranks.validate();
  return ranks;
}

json diagnostics_json(const PluginDiagnostics& d) {
  json j;
  j["sigma_hat"] = to_json(d.sigma_hat);
  j["lambda_min_hat"] = to_json(d.lambda_min_hat);
  j["snr_hat"] = to_json(d.snr_hat);
  j["eps_hat"] = to_json(d.eps_hat);
  j["kappa_hat"] = to_json(d.kappa_hat);
  return j;
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

}  // namespace

int cmd_generate(const fs::path& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig config = load_config(config_path);
    apply_seed_override(config);
    const Index K = config.K_grid.front();
    const ReplicateInstance inst = make_replicate(config, K, 0);

    make_dir(out_dir);
    make_dir(out_dir / "truth");
    json files = json::array();
    for (Index k = 0; k < K; ++k) {
      io::write_csv_matrix(out_dir / indexed("view", k), inst.data.views[static_cast<std::size_t>(k)]);
      files.push_back(indexed("view", k));
    }
    io::write_csv_matrix(out_dir / "truth" / "U.csv", inst.truth.u.matrix());
    for (Index k = 0; k < K; ++k) {
      const auto i = static_cast<std::size_t>(k);
      io::write_csv_matrix(out_dir / "truth" / indexed("U", k), inst.truth.u_k[i].matrix());
      io::write_csv_matrix(out_dir / "truth" / indexed("V", k), inst.truth.v_k[i]);
      io::write_csv_matrix(out_dir / "truth" / indexed("W", k), inst.truth.w_k[i]);
    }

    json params;
    params["sigma_k"] = inst.truth.sigma_k;
    params["s_k"] = inst.truth.s_k;
    params["gamma"] = inst.truth.gamma;
    params["theta_target"] = inst.truth.theta_target;
    params["theta_realized"] = realized_theta(inst.truth, WeightVector::uniform(K));
    params["r"] = config.r;
    params["r_k"] = config.r_k;
    write_json(out_dir / "truth" / "params.json", params);

    json manifest;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = config_hash(config);
    manifest["config"] = json::parse(canonical_config(config));
    manifest["K"] = K;
    manifest["views"] = files;
    write_json(out_dir / "manifest.json", manifest);
    out << "wrote " << K << " views to " << out_dir.string() << '\n';
    return 0;
  });
}

int cmd_estimate(const EstimateRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const MultiViewData data = read_views(req.views);
    const Index K = data.views_count();
    const RankSpec ranks = parse_ranks(req.ranks, K);
    const Method method = parse_method(req.method);

    std::optional<WeightVector> fixed;
    if (req.weights) {
      if (method == Method::Ajive) raise(ErrorKind::InvalidInput, "--weights cannot be used with ajive");
      const std::vector<double> w = io::parse_number_list(*req.weights);
      if (static_cast<Index>(w.size()) != K)
        raise(ErrorKind::InvalidInput, "--weights has " + std::to_string(w.size()) + " entries for " +
                                           std::to_string(K) + " views");
      fixed = WeightVector(std::span<const double>(w));
    }

    // Plug-in quantities always come from the equal-weight fit.
    std::optional<PluginFit> plugin;
    std::optional<WeightTrace> trace;
    WeightVector weights = WeightVector::uniform(K);
    std::string source = "equal";
    if (method == Method::HeteroJive && !fixed) {
      DataDrivenOptions options;
      options.iteration = req.iteration;
      options.refresh_each_iter = req.refresh_each_iter;
      DataDrivenWeights dd = data_driven_weights(data, ranks, options);
      weights = dd.weights;
      trace = std::move(dd.trace);
      plugin = std::move(dd.plugin);
      source = "data_driven";
    } else {
      if (fixed) {
        weights = *fixed;
        source = "fixed";
      }
      if (noise_estimable(data, ranks)) plugin = plugin_fit(data, ranks);
    }

    OrthonormalBasis u_hat(Matrix(data.n(), 0));
    double gap = 0.0;
    try {
      if (method == Method::StackSvd) {
        StackResult res = stack_svd(data, ranks.joint, weights);
        if (res.degenerate_gap)
          raise(ErrorKind::DegenerateAggregation, "pooled covariance has a tie at the joint rank");
        u_hat = std::move(res.basis);
        gap = res.gap;
      } else {
        JiveFit fit = heterojive(data, ranks, weights);
        u_hat = std::move(fit.u_hat);
        gap = fit.spectral_gap;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateAggregation) {
        err << "degenerate aggregation: " << e.what() << '\n';
        return 3;
      }
      throw;
    }

    make_dir(req.out_dir);
    io::write_csv_matrix(req.out_dir / "U_hat.csv", u_hat.matrix());

    json wj;
    wj["method"] = std::string(to_string(method));
    wj["weight_source"] = source;
    wj["weights"] = weights.to_std();
    wj["trace"] = trace ? to_json(*trace) : json(nullptr);
    write_json(req.out_dir / "weights.json", wj);

    json dj;
    dj["spectral_gap"] = gap;
    if (plugin) {
      dj.update(diagnostics_json(plugin->diagnostics));
      try {
        dj["theta_hat"] = theta_of_w(plugin->maps, weights);
      } catch (const Error&) {
        dj["theta_hat"] = nullptr;
      }
    } else {
      dj["note"] = "too few degrees of freedom to estimate noise levels";
    }

    if (req.truth) {
      const Matrix truth_u = io::read_csv_matrix(*req.truth / "U.csv");
      if (truth_u.rows() != data.n() || truth_u.cols() != ranks.joint)
        raise(ErrorKind::InvalidInput, "truth U.csv must be " + std::to_string(data.n()) + " x " +
                                           std::to_string(ranks.joint));
      const double error = subspace_error(u_hat, OrthonormalBasis(truth_u));
      dj["subspace_error"] = error;
      out << "subspace_error " << io::format_double(error) << '\n';
    }
    write_json(req.out_dir / "diagnostics.json", dj);
    return 0;
  });
}

int cmd_weights(const EstimateRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MultiViewData data = read_views(req.views);
    const RankSpec ranks = parse_ranks(req.ranks, data.views_count());
    DataDrivenOptions options;
    options.iteration = req.iteration;
    options.refresh_each_iter = req.refresh_each_iter;
    const DataDrivenWeights dd = data_driven_weights(data, ranks, options);

    make_dir(req.out_dir);
    json wj;
    wj["method"] = "heterojive";
    wj["weight_source"] = "data_driven";
    wj["weights"] = dd.weights.to_std();
    wj["trace"] = to_json(dd.trace);
    wj["diagnostics"] = diagnostics_json(dd.plugin.diagnostics);
    write_json(req.out_dir / "weights.json", wj);

    for (Index k = 0; k < dd.weights.size(); ++k) out << (k ? "," : "") << io::format_double(dd.weights[k]);
    out << '\n';
    return 0;
  });
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir, unsigned jobs, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig config = load_config(config_path);
    apply_seed_override(config);
    make_dir(out_dir);
    const std::vector<ResultRow> rows = run_simulation(config, jobs);
    const std::vector<SummaryRow> summary = summarize(config, rows);
    write_results_csv(out_dir / "results.csv", rows);
    write_timings_csv(out_dir / "timings.csv", rows);
    write_summary_csv(out_dir / "summary.csv", summary);

    json manifest;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = config_hash(config);
    manifest["config"] = json::parse(canonical_config(config));
    write_json(out_dir / "manifest.json", manifest);

    Index failed = 0;
    for (const auto& s : summary) failed += s.failed;
    out << "method,K,mean_error,se_error\n";
    for (const auto& s : summary)
      out << s.method << ',' << s.K << ',' << io::format_double(s.mean) << ',' << io::format_double(s.se)
          << '\n';
    if (failed > 0) err << failed << " replicate runs failed; see the reason column of results.csv\n";
    return 0;
  });
}

}  // namespace hjive
