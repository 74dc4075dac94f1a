// Command-line front end: builds, fits, verifies, and serializes the
// constructive networks.  Exit codes: 0 success, 2 validation/usage error,
// 3 construction failure (search budget or delta exhaustion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "euaf/approx1d.hpp"
#include "euaf/approxnd.hpp"
#include "euaf/autodiff.hpp"
#include "euaf/builtin_targets.hpp"
#include "euaf/classify.hpp"
#include "euaf/gadgets.hpp"
#include "euaf/network.hpp"
#include "euaf/pointfit.hpp"
#include "euaf/uaf_variants.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace euaf;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ManifestWriter {
  std::string subcommand;
  std::vector<std::string> argv_echo;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write() const {
    if (outputs.empty()) return;
    json doc;
    doc["subcommand"] = subcommand;
    doc["argv"] = argv_echo;
    doc["version"] = kVersion;
    doc["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    doc["outputs"] = outputs;
    const std::string path = outputs.front() + ".manifest.json";
    std::ofstream ofs(path);
    ofs << doc.dump(2) << "\n";
  }
};

json fit_result_json(const pointfit::FitResult& r) {
  json doc;
  doc["w"] = r.w;
  doc["per_index_error"] = r.per_index_error;
  doc["max_error"] = r.max_error;
  doc["evaluations"] = r.evaluations;
  doc["search_bound_reached"] = r.search_bound_reached;
  doc["satisfied"] = r.satisfied;
  return doc;
}

json report_json(const approx1d::Approx1DReport& rep) {
  json doc;
  doc["K"] = rep.K;
  doc["M"] = rep.M;
  doc["w0"] = rep.w0;
  doc["m0"] = rep.m0;
  doc["grid_sup_error"] = rep.grid_sup_error;
  doc["guarantee_region"] = rep.guarantee_region;
  doc["width"] = rep.network.width();
  doc["depth"] = rep.network.depth();
  json fits = json::array();
  for (const auto& f : rep.fits) fits.push_back(fit_result_json(f));
  doc["fits"] = std::move(fits);
  return doc;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::string::size_type pos = 0;
  while (pos < text.size()) {
    auto next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructive fixed-size universal approximation toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> argv_echo(argv, argv + argc);

  // ---- gadget ----
  auto* gadget = app.add_subcommand("gadget", "build one of the exact algebraic blocks");
  std::string gadget_kind = "square";
  double gadget_M = 1.0, gadget_a = 1.0, gadget_b = 1.0, gadget_range = 1.0;
  int gadget_K = 10, gadget_i = 1, gadget_depth = 1;
  bool gadget_check = false;
  std::string gadget_out;
  gadget->add_option("--kind", gadget_kind,
                     "square|product|step|partition|widen|snap|magnitude");
  gadget->add_option("--M", gadget_M);
  gadget->add_option("--K", gadget_K);
  gadget->add_option("--i", gadget_i);
  gadget->add_option("--depth", gadget_depth);
  gadget->add_option("--a", gadget_a);
  gadget->add_option("--b", gadget_b);
  gadget->add_option("--range", gadget_range);
  gadget->add_flag("--check", gadget_check, "print the max grid error of the gadget");
  gadget->add_option("--out", gadget_out, "write the network JSON here");

  // ---- pointfit ----
  auto* pf = app.add_subcommand("pointfit", "solve the winding point-fitting problem");
  std::string pf_targets;
  double pf_epsilon = 0.05, pf_alpha = 3.141592653589793;
  std::uint64_t pf_budget = 1'000'000'000ULL;
  pf->add_option("--targets", pf_targets, "comma-separated values in [0,1]")->required();
  pf->add_option("--epsilon", pf_epsilon);
  pf->add_option("--budget", pf_budget);
  pf->add_option("--alpha", pf_alpha);

  // ---- fit1d ----
  auto* fit1d = app.add_subcommand("fit1d", "univariate sup-norm approximation");
  std::string f1_function = "x", f1_out, f1_report;
  double f1_a = 0.0, f1_b = 1.0, f1_epsilon = 0.25;
  std::uint64_t f1_budget = 1'000'000'000ULL;
  int f1_user_k = 0;
  fit1d->add_option("--function", f1_function, "builtin name or sample-file.csv");
  fit1d->add_option("--a", f1_a);
  fit1d->add_option("--b", f1_b);
  fit1d->add_option("--epsilon", f1_epsilon);
  fit1d->add_option("--budget", f1_budget);
  fit1d->add_option("--K", f1_user_k, "override the grid count (>= 10)");
  fit1d->add_option("--out", f1_out);
  fit1d->add_option("--report", f1_report);

  // ---- fitnd ----
  auto* fitnd = app.add_subcommand("fitnd", "superposition assembly for built-in targets");
  int fnd_d = 2;
  std::string fnd_target = "sum2", fnd_out, fnd_report;
  double fnd_a = 0.0, fnd_b = 1.0, fnd_epsilon = 0.25;
  fitnd->add_option("--d", fnd_d);
  fitnd->add_option("--builtin-target", fnd_target, "sum2|prod2|sum<d>");
  fitnd->add_option("--a", fnd_a);
  fitnd->add_option("--b", fnd_b);
  fitnd->add_option("--epsilon", fnd_epsilon);
  fitnd->add_option("--out", fnd_out);
  fitnd->add_option("--report", fnd_report);

  // ---- classify ----
  auto* cls = app.add_subcommand("classify", "exact rational-label representer (d = 1)");
  std::string cls_regions, cls_out, cls_report;
  cls->add_option("--regions", cls_regions, "regions JSON document")->required();
  cls->add_option("--out", cls_out);
  cls->add_option("--report", cls_report);

  // ---- uaf ----
  auto* uafcmd = app.add_subcommand("uaf", "activation variants");
  std::string uaf_variant = "sigmoidal";
  int uaf_s = 1;
  double uaf_eval = std::nan("");
  bool uaf_apx = false;
  double uaf_M = 2.0, uaf_eps = 0.1;
  std::string uaf_out;
  uafcmd->add_option("--variant", uaf_variant, "sigmoidal|smooth");
  uafcmd->add_option("--s", uaf_s);
  uafcmd->add_option("--eval", uaf_eval);
  uafcmd->add_flag("--approximate-sigma", uaf_apx);
  uafcmd->add_option("--M", uaf_M);
  uafcmd->add_option("--epsilon", uaf_eps);
  uafcmd->add_option("--out", uaf_out);

  // ---- train-demo ----
  auto* train = app.add_subcommand("train-demo", "toy SGD comparison run");
  std::string tr_target = "sin8", tr_act = "euaf", tr_trace;
  int tr_width = 40, tr_depth = 2, tr_steps = 2000;
  std::uint64_t tr_seed = 42;
  train->add_option("--target", tr_target);
  train->add_option("--activation", tr_act, "euaf|relu");
  train->add_option("--width", tr_width);
  train->add_option("--depth", tr_depth);
  train->add_option("--steps", tr_steps);
  train->add_option("--seed", tr_seed);
  train->add_option("--trace", tr_trace, "CSV loss trace output path");

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "re-verify a serialized network");
  std::string v_net, v_target = "x", v_residuals;
  int v_grid = 10000;
  verify->add_option("--net", v_net)->required();
  verify->add_option("--target", v_target, "builtin name or sample-file.csv");
  verify->add_option("--grid", v_grid);
  verify->add_option("--residuals", v_residuals, "per-point residual CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ManifestWriter manifest;
  manifest.argv_echo = argv_echo;

  try {
    if (*gadget) {
      manifest.subcommand = "gadget";
      gadgets::GadgetSpec spec;
      if (gadget_kind == "square") spec.kind = gadgets::GadgetSpec::Kind::Square;
      else if (gadget_kind == "product") spec.kind = gadgets::GadgetSpec::Kind::Product;
      else if (gadget_kind == "step") spec.kind = gadgets::GadgetSpec::Kind::StepNet;
      else if (gadget_kind == "partition")
        spec.kind = gadgets::GadgetSpec::Kind::PartitionComponent;
      else if (gadget_kind == "widen") spec.kind = gadgets::GadgetSpec::Kind::IdentityWiden;
      else if (gadget_kind == "snap") spec.kind = gadgets::GadgetSpec::Kind::SnapNet;
      else if (gadget_kind == "magnitude")
        spec.kind = gadgets::GadgetSpec::Kind::MagnitudeReduced;
      else throw validation_error("unknown gadget kind: " + gadget_kind);
      spec.M = gadget_M;
      spec.K = gadget_K;
      spec.component = gadget_i;
      spec.depth = gadget_depth;
      spec.a = gadget_a;
      spec.b = gadget_b;
      spec.range_bound = gadget_range;
      Network net = gadgets::build(spec);
      if (gadget_check && spec.kind == gadgets::GadgetSpec::Kind::Square) {
        double sup = 0.0;
        for (int i = 0; i < 10000; ++i) {
          const double x = -1.0 + 2.0 * i / 9999.0;
          sup = std::max(sup, std::fabs(eval1(net, x) - x * x));
        }
        std::printf("max grid error: %.3e\n", sup);
      } else if (gadget_check && spec.kind == gadgets::GadgetSpec::Kind::Product) {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-spec.M, spec.M);
        double sup = 0.0;
        for (int i = 0; i < 10000; ++i) {
          const double x = u(rng), y = u(rng);
          sup = std::max(sup, std::fabs(eval(net, std::vector<double>{x, y})[0] - x * y));
        }
        std::printf("max grid error: %.3e\n", sup);
      }
      if (!gadget_out.empty()) {
        save_network(net, gadget_out);
        manifest.outputs.push_back(gadget_out);
      }
    } else if (*pf) {
      manifest.subcommand = "pointfit";
      pointfit::FitTargets targets;
      targets.values = parse_csv_doubles(pf_targets);
      targets.alpha = pf_alpha;
      const auto result = pointfit::fit(targets, pf_epsilon, pf_budget);
      std::cout << fit_result_json(result).dump(2) << "\n";
      if (!result.satisfied) return 3;
    } else if (*fit1d) {
      manifest.subcommand = "fit1d";
      approx1d::Target1D target;
      target.a = f1_a;
      target.b = f1_b;
      if (f1_function.size() > 4 &&
          f1_function.substr(f1_function.size() - 4) == ".csv") {
        double lo = 0.0, hi = 1.0;
        target.evaluator = targets::load_csv_target(f1_function, &lo, &hi);
        if (f1_a < lo || f1_b > hi)
          throw validation_error("sample file does not cover [a, b]");
      } else {
        target.evaluator = targets::lookup1d(f1_function);
      }
      if (f1_user_k > 0) target.user_K = f1_user_k;
      approx1d::Approx1DReport rep;
      try {
        rep = approx1d::build_interval_approx(target, f1_epsilon, f1_budget);
      } catch (const construction_error& e) {
        if (!f1_report.empty()) {
          json doc;
          doc["error"] = e.what();
          doc["best_effort_error"] = e.best_effort_error;
          std::ofstream(f1_report) << doc.dump(2) << "\n";
          manifest.outputs.push_back(f1_report);
          manifest.write();
        }
        std::cerr << "construction failed: " << e.what() << "\n";
        return 3;
      }
      if (!f1_out.empty()) {
        save_network(rep.network, f1_out);
        manifest.outputs.push_back(f1_out);
      }
      if (!f1_report.empty()) {
        std::ofstream(f1_report) << report_json(rep).dump(2) << "\n";
        manifest.outputs.push_back(f1_report);
      }
      std::cout << report_json(rep).dump(2) << "\n";
    } else if (*fitnd) {
      manifest.subcommand = "fitnd";
      approxnd::KstDecomposition kst;
      std::function<double(std::span<const double>)> ref;
      if (fnd_target == "prod2") {
        if (fnd_d != 2) throw validation_error("prod2 requires --d 2");
        kst = approxnd::product2_decomposition(fnd_a, fnd_b);
        ref = targets::lookup("prod2").fn;
      } else if (fnd_target == "sum2" || fnd_target == "sum") {
        kst = approxnd::additive_decomposition(fnd_d, std::vector<double>(fnd_d, 1.0),
                                               fnd_a, fnd_b);
        ref = [fnd_d](std::span<const double> v) {
          double s = 0.0;
          for (int j = 0; j < fnd_d; ++j) s += v[j];
          return s;
        };
      } else {
        throw validation_error("unknown builtin nd target: " + fnd_target);
      }
      auto [net, rep] = approxnd::assemble(fnd_a, fnd_b, kst, fnd_epsilon,
                                           1'000'000'000ULL, ref);
      json doc;
      doc["width"] = net.width();
      doc["depth"] = net.depth();
      doc["nonzero_params"] = rep.nonzero_params;
      doc["grid_sup_error"] = rep.grid_sup_error;
      doc["M"] = rep.M;
      if (!fnd_out.empty()) {
        save_network(net, fnd_out);
        manifest.outputs.push_back(fnd_out);
      }
      if (!fnd_report.empty()) {
        std::ofstream(fnd_report) << doc.dump(2) << "\n";
        manifest.outputs.push_back(fnd_report);
      }
      std::cout << doc.dump(2) << "\n";
    } else if (*cls) {
      manifest.subcommand = "classify";
      std::ifstream ifs(cls_regions);
      if (!ifs) throw validation_error("cannot open regions file: " + cls_regions);
      json doc = json::parse(ifs, nullptr, true);
      classify::LabeledRegions lr;
      for (const auto& region : doc.at("regions")) {
        std::vector<std::array<double, 2>> ivs;
        for (const auto& iv : region.at("intervals"))
          ivs.push_back({iv[0].get<double>(), iv[1].get<double>()});
        lr.regions.push_back(std::move(ivs));
      }
      for (const auto& lab : doc.at("labels"))
        lr.labels.push_back({lab.at("num").get<long long>(), lab.at("den").get<long long>()});
      double lo = 1e300, hi = -1e300;
      for (const auto& region : lr.regions)
        for (const auto& iv : region) {
          lo = std::min(lo, iv[0]);
          hi = std::max(hi, iv[1]);
        }
      lr.box_lo = doc.value("box_lo", lo - 0.1 * (hi - lo) - 0.1);
      lr.box_hi = doc.value("box_hi", hi + 0.1 * (hi - lo) + 0.1);
      auto rep = classify::build_classifier(lr);
      json out;
      out["n1"] = rep.n1;
      out["n2"] = rep.n2;
      out["verified_points"] = rep.verified_points;
      out["max_deviation_on_samples"] = rep.max_deviation_on_samples;
      out["width"] = rep.network.width();
      out["depth"] = rep.network.depth();
      if (!cls_out.empty()) {
        save_network(rep.network, cls_out);
        manifest.outputs.push_back(cls_out);
      }
      if (!cls_report.empty()) {
        std::ofstream(cls_report) << out.dump(2) << "\n";
        manifest.outputs.push_back(cls_report);
      }
      std::cout << out.dump(2) << "\n";
    } else if (*uafcmd) {
      manifest.subcommand = "uaf";
      if (uaf_apx) {
        auto res = uaf::approximate_sigma_by_sigmoidal(uaf_M, uaf_eps);
        json doc;
        doc["converged"] = res.converged;
        doc["delta"] = res.delta;
        doc["eta0"] = res.eta0;
        doc["sup_error"] = res.sup_error;
        doc["width"] = res.network.width();
        doc["depth"] = res.network.depth();
        if (!uaf_out.empty()) {
          save_network(res.network, uaf_out);
          manifest.outputs.push_back(uaf_out);
        }
        std::cout << doc.dump(2) << "\n";
        if (!res.converged) return 3;
      } else if (!std::isnan(uaf_eval)) {
        const double v = uaf_variant == "smooth" ? uaf::eval_smooth(uaf_s, uaf_eval)
                                                 : uaf::eval_sigmoidal(uaf_eval);
        std::printf("%.17g\n", v);
      } else {
        throw validation_error("uaf: pass --eval <x> or --approximate-sigma");
      }
    } else if (*train) {
      manifest.subcommand = "train-demo";
      const auto target = targets::lookup(tr_target);
      autodiff::TrainConfig cfg;
      cfg.steps = tr_steps;
      cfg.seed = tr_seed;
      const ActivationKind act =
          tr_act == "relu" ? ActivationKind::relu() : ActivationKind::euaf();
      auto res = autodiff::train_toy(target.fn, target.dim, tr_width, tr_depth, act, cfg);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!tr_trace.empty()) {
        file.open(tr_trace);
        os = &file;
        manifest.outputs.push_back(tr_trace);
      }
      (*os) << "step,train_mse,test_mse,test_mae,test_max\n";
      for (const auto& row : res.trace)
        (*os) << row.step << "," << row.train_mse << "," << row.test_mse << ","
              << row.test_mae << "," << row.test_max << "\n";
      std::cerr << "initial mse " << res.initial_train_mse << " final "
                << res.final_train_mse << (res.diverged ? " (diverged)" : "") << "\n";
      if (res.diverged) return 3;
    } else if (*verify) {
      manifest.subcommand = "verify";
      Network net = load_network(v_net);
      std::function<double(std::span<const double>)> ref;
      if (v_target.size() > 4 && v_target.substr(v_target.size() - 4) == ".csv") {
        auto f = targets::load_csv_target(v_target, nullptr, nullptr);
        ref = [f](std::span<const double> v) { return f(v[0]); };
      } else {
        ref = targets::lookup(v_target).fn;
      }
      if (!net.domain) throw validation_error("network carries no domain to verify on");
      const auto& lo = net.domain->lo;
      const auto& hi = net.domain->hi;
      double sup = 0.0, mean = 0.0;
      std::ofstream res_csv;
      if (!v_residuals.empty()) {
        res_csv.open(v_residuals);
        res_csv << "index,residual\n";
        manifest.outputs.push_back(v_residuals);
      }
      std::mt19937_64 rng(9);
      std::vector<double> x(net.input_dim);
      for (int i = 0; i < v_grid; ++i) {
        if (net.input_dim == 1) {
          x[0] = lo[0] + (hi[0] - lo[0]) * double(i) / double(v_grid - 1);
        } else {
          for (std::size_t j = 0; j < net.input_dim; ++j) {
            std::uniform_real_distribution<double> u(lo[j], hi[j]);
            x[j] = u(rng);
          }
        }
        const double r = std::fabs(eval(net, x)[0] - ref(x));
        sup = std::max(sup, r);
        mean += r / double(v_grid);
        if (res_csv.is_open()) res_csv << i << "," << r << "\n";
      }
      json doc;
      doc["sup_error"] = sup;
      doc["mean_error"] = mean;
      doc["grid"] = v_grid;
      std::cout << doc.dump(2) << "\n";
    }
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const construction_error& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  manifest.write();
  return 0;
}
