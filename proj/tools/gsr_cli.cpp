// gsr: experiment driver for sparse graph signal interpolation.
//
//   gsr synth   --n 1000 --trials 100 --out synth.csv
//   gsr probe   lemma1|contraction|variance --out probe.csv
//   gsr recsys  --dataset u.data --format movielens-tab --method imatgi --out rmse.csv

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsr/gsr.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct ImatgiFlags {
  double alpha = 0.2;
  double beta = -1.0;  // negative: adaptive
  double lambda = 1.0;
  double epsilon = 1e-6;
  std::size_t iters = 20;

  ImatgiFlags() = default;
  explicit ImatgiFlags(const gsr::ImatgiConfig& c)
      : alpha(c.alpha), beta(c.beta.value_or(-1.0)), lambda(c.lambda), epsilon(c.epsilon), iters(c.max_iters) {}

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "threshold decay rate")->capture_default_str();
    app->add_option("--beta", beta, "initial threshold (negative: max |GFT| of the samples)")->capture_default_str();
    app->add_option("--lambda", lambda, "relaxation parameter")->capture_default_str();
    app->add_option("--epsilon", epsilon, "stopping tolerance on ||f_k - f_{k-1}||")->capture_default_str();
    app->add_option("--iters", iters, "iteration cap")->capture_default_str();
  }
  gsr::ImatgiConfig config() const {
    gsr::ImatgiConfig c;
    c.alpha = alpha;
    if (beta >= 0) c.beta = beta;
    c.lambda = lambda;
    c.epsilon = epsilon;
    c.max_iters = iters;
    return c;
  }
};

// Writes to a string first so an unwritable path never leaves partial output.
template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw gsr::DataError("cannot write " + path);
  os << buf.str();
  if (!os) throw gsr::DataError("failed writing " + path);
}

std::string aggregate_path(const std::string& out) {
  std::filesystem::path p(out);
  const auto ext = p.extension().string();
  return (p.parent_path() / (p.stem().string() + ".aggregate" + (ext.empty() ? ".csv" : ext))).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse graph signal interpolation experiments"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "k-sparse reconstruction sweep over sampling rate and sparsity");
  gsr::experiments::SynthParams sp;
  ImatgiFlags synth_flags(sp.imatgi);
  std::string synth_out;
  synth->add_option("--n", sp.n, "vertices")->capture_default_str();
  synth->add_option("--p", sp.p_list, "sampling rates")->delimiter(',')->capture_default_str();
  synth->add_option("--sparsity", sp.sparsity_list, "sparsity factors k/N")->delimiter(',')->capture_default_str();
  synth->add_option("--trials", sp.trials, "signals per cell")->capture_default_str();
  synth->add_option("--seed", sp.seed, "master seed")->capture_default_str();
  synth->add_option("--out", synth_out, "per-trial CSV; means go to <stem>.aggregate.csv")->required();
  synth->add_flag("--fixed-graph", sp.fixed_graph, "reuse one graph for all trials");
  synth_flags.add(synth);

  // probe
  auto* probe = app.add_subcommand("probe", "Monte Carlo checks of the iteration's statistics");
  gsr::experiments::ProbeParams pp;
  ImatgiFlags probe_flags;
  std::string probe_kind, probe_out;
  bool trials_set = false;
  probe->add_option("kind", probe_kind, "lemma1 | contraction | variance")
      ->required()
      ->check(CLI::IsMember({"lemma1", "contraction", "variance"}));
  probe->add_option("--n", pp.n, "vertices")->capture_default_str();
  probe->add_option("--p", pp.p, "sampling rate")->capture_default_str();
  auto* trials_opt = probe->add_option("--trials", pp.trials, "Monte Carlo trials");
  probe->add_option("--sparsity", pp.sparsity, "fraction of retained GFT coefficients")->capture_default_str();
  probe->add_option("--gamma", pp.gamma, "variance guard factor (0 disables)")->capture_default_str();
  std::string mask_model = "resampled";
  probe->add_option("--masks", mask_model, "fresh mask per iteration (resampled) or one per trial (fixed)")
      ->check(CLI::IsMember({"resampled", "fixed"}))
      ->capture_default_str();
  probe->add_option("--seed", pp.seed, "master seed")->capture_default_str();
  probe->add_option("--out", probe_out, "output CSV")->required();
  probe_flags.add(probe);

  // recsys
  auto* rec = app.add_subcommand("recsys", "cross-validated rating interpolation benchmark");
  std::string dataset, format = "movielens-tab", rec_out, dataset_name;
  std::vector<std::string> methods{"imatgi"};
  double scale_min = 1.0, scale_max = 5.0, cutoff_fraction = 0.1;
  std::uint64_t rec_seed = 1;
  std::size_t top_m = 10, min_common = 2, knn_k = 10, subsample = 100000, folds = 5;
  ImatgiFlags rec_flags(gsr::recsys::default_imatgi_config());
  std::string centering = "user-item";
  rec->add_option("--dataset", dataset, "ratings file")->required();
  rec->add_option("--format", format, "movielens-tab | csv-semicolon | csv-comma")
      ->check(CLI::IsMember({"movielens-tab", "csv-semicolon", "csv-comma"}))
      ->capture_default_str();
  rec->add_option("--scale-min", scale_min, "lowest rating")->capture_default_str();
  rec->add_option("--scale-max", scale_max, "highest rating")->capture_default_str();
  rec->add_option("--method", methods, "imatgi | ilsr | knn (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"imatgi", "ilsr", "knn"}))
      ->capture_default_str();
  rec->add_option("--seed", rec_seed, "master seed")->capture_default_str();
  rec->add_option("--out", rec_out, "output CSV")->required();
  rec->add_option("--name", dataset_name, "dataset label (default: file stem)");
  rec->add_option("--centering", centering, "baseline removed before interpolation: none | user | user-item")
      ->check(CLI::IsMember({"none", "user", "user-item"}))
      ->capture_default_str();
  rec->add_option("--top-m", top_m, "neighbours per user in the similarity graph")->capture_default_str();
  rec->add_option("--min-common", min_common, "co-rated items needed for an edge")->capture_default_str();
  rec->add_option("--cutoff-fraction", cutoff_fraction, "ILSR bandwidth as a fraction of users")->capture_default_str();
  rec->add_option("--knn-k", knn_k, "KNN neighbour count")->capture_default_str();
  rec->add_option("--subsample", subsample, "triples kept before cross-validation")->capture_default_str();
  rec->add_option("--folds", folds, "cross-validation folds")->capture_default_str();
  rec_flags.add(rec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  trials_set = trials_opt->count() > 0;

  try {
    if (*synth) {
      sp.imatgi = synth_flags.config();
      for (double p : sp.p_list)
        if (auto w = sp.imatgi.stability_warning(p)) std::cerr << "warning: " << *w << '\n';
      const auto result = gsr::experiments::run_synth(sp);
      write_file(synth_out, [&](std::ostream& os) { gsr::experiments::write_synth_rows(os, result); });
      write_file(aggregate_path(synth_out), [&](std::ostream& os) { gsr::experiments::write_synth_aggregate(os, result); });
      return kOk;
    }
    if (*probe) {
      pp.imatgi = probe_flags.config();
      pp.lambda = probe_flags.lambda;
      pp.iters = probe_flags.iters;
      pp.masks = mask_model == "fixed" ? gsr::MaskModel::Fixed : gsr::MaskModel::Resampled;
      gsr::experiments::ProbeResult result;
      if (probe_kind == "lemma1") {
        result = gsr::experiments::probe_subsampling(pp);
      } else if (probe_kind == "contraction") {
        if (!trials_set) pp.trials = 5000;
        result = gsr::experiments::probe_contraction(pp);
      } else {
        if (!trials_set) pp.trials = 2000;
        result = gsr::experiments::probe_variance(pp);
      }
      write_file(probe_out, [&](std::ostream& os) { gsr::experiments::write_probe_csv(os, result); });
      std::cerr << probe_kind << ": " << (result.pass ? "pass" : "FAIL") << '\n';
      return kOk;
    }
    if (*rec) {
      namespace rs = gsr::recsys;
      const rs::RatingScale scale{scale_min, scale_max};
      auto ingested = rs::ingest(dataset, rs::parse_format(format), scale);
      for (const auto& w : ingested.report.warnings) std::cerr << "warning: " << w << '\n';
      const auto table = rs::subsample_triples(ingested.table, rec_seed, subsample);
      const auto split = rs::make_cv_split(table.size(), rec_seed, folds);
      if (dataset_name.empty()) dataset_name = std::filesystem::path(dataset).stem().string();
      rs::EvaluateParams params;
      params.graph.top_m = top_m;
      params.graph.min_common = min_common;
      params.graph.centering = centering == "none" ? rs::Centering::None
                               : centering == "user" ? rs::Centering::User
                                                     : rs::Centering::UserItem;
      std::vector<rs::RmseReport> reports;
      for (const auto& m : methods) {
        rs::Interpolator interp;
        if (m == "imatgi") interp = rs::make_imatgi_interpolator(rec_flags.config());
        else if (m == "ilsr") interp = rs::make_ilsr_interpolator({0, 1000, 1e-9}, cutoff_fraction);
        else interp = rs::make_knn_interpolator({knn_k, gsr::KnnWeighting::InverseDistance});
        reports.push_back(rs::evaluate(interp, m, dataset_name, table, split, params));
        std::cerr << m << ": mean nRMSE " << reports.back().mean << " (cold start " << reports.back().cold_start << ")\n";
      }
      write_file(rec_out, [&](std::ostream& os) { rs::write_rmse_csv(os, reports); });
      return kOk;
    }
  } catch (const gsr::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const gsr::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const gsr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
