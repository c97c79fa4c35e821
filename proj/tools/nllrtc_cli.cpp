#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "nllrtc/cloud_detect.hpp"
#include "nllrtc/config.hpp"
#include "nllrtc/container.hpp"
#include "nllrtc/errors.hpp"
#include "nllrtc/metrics.hpp"
#include "nllrtc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace nllrtc;

namespace {

RunConfig loadRunConfig(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return RunConfig::fromFile(path);
}

void echoConfig(const RunConfig& cfg) {
  std::cout << "# effective configuration\n" << cfg.effectiveText();
  std::cout << "# deterministic seed: " << cfg.seed << "\n";
}

std::string formatMetric(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void writeReport(const fs::path& path, const QualityReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open report for writing: " + path.string());
  for (std::size_t k = 0; k < report.perBand.size(); ++k) {
    const BandQuality& q = report.perBand[k];
    out << "band" << k << "_psnr = " << formatMetric(q.psnr) << "\n"
        << "band" << k << "_ssim = " << formatMetric(q.ssim) << "\n"
        << "band" << k << "_q = " << formatMetric(q.q) << "\n"
        << "band" << k << "_ag = " << formatMetric(q.ag) << "\n";
  }
  out << "avg_psnr = " << formatMetric(report.average.psnr) << "\n"
      << "avg_ssim = " << formatMetric(report.average.ssim) << "\n"
      << "avg_q = " << formatMetric(report.average.q) << "\n"
      << "avg_ag = " << formatMetric(report.average.ag) << "\n"
      << "restricted_to_missing = " << (report.restrictedToMissing ? 1 : 0)
      << "\n";
}

int runInpaint(const std::string& input, const std::string& maskPath,
               const std::string& output, const std::string& configPath,
               bool baseline) {
  const RunConfig cfg = loadRunConfig(configPath);
  echoConfig(cfg);
  ImageStack stack = loadStack(input);
  ObservationMask mask = loadMask(maskPath);

  if (baseline) {
    auto [completed, trace] =
        halrtcComplete(stack.values, mask.values, cfg.pipeline.solver);
    stack.values = std::move(completed);
    std::cout << "iterations: " << trace.iterations
              << (trace.converged ? " (converged)" : " (max-iter)") << "\n";
  } else {
    auto [result, report] = inpaint(stack, mask, cfg.pipeline);
    stack = std::move(result);
    std::cout << "groups: " << report.groupsProcessed
              << ", solver iterations: " << report.totalSolverIterations
              << ", missing " << report.missingBefore << " -> "
              << report.missingAfter
              << (report.usedHalrtcFallback ? ", used fallback" : "") << "\n";
  }
  saveContainer(output, stack);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-local low-rank tensor completion for multitemporal "
               "multispectral image stacks"};
  app.require_subcommand(1);

  std::string input, maskPath, output, configPath, specPath;
  std::string testPath, refPath, reportPath, scatterPath, anchorSpec;
  long long timeIndex = 0;
  double rankRelTol = 0.01;

  auto* inpaintCmd = app.add_subcommand("inpaint", "Non-local low-rank inpainting");
  inpaintCmd->add_option("--input", input)->required();
  inpaintCmd->add_option("--mask", maskPath)->required();
  inpaintCmd->add_option("--output", output)->required();
  inpaintCmd->add_option("--config", configPath);

  auto* halrtcCmd = app.add_subcommand("halrtc", "Whole-stack nuclear-norm baseline");
  halrtcCmd->add_option("--input", input)->required();
  halrtcCmd->add_option("--mask", maskPath)->required();
  halrtcCmd->add_option("--output", output)->required();
  halrtcCmd->add_option("--config", configPath);

  auto* detectCmd = app.add_subcommand("detect-cloud", "Two-stage cloud detection");
  detectCmd->add_option("--input", input)->required();
  detectCmd->add_option("--time", timeIndex)->required();
  detectCmd->add_option("--output", output)->required();
  detectCmd->add_option("--config", configPath);

  auto* simulateCmd = app.add_subcommand("simulate-mask", "Synthetic degradation mask");
  simulateCmd->add_option("--input", input)->required();
  simulateCmd->add_option("--spec", specPath)->required();
  simulateCmd->add_option("--output", output)->required();

  auto* metricsCmd = app.add_subcommand("metrics", "Quality metrics report");
  metricsCmd->add_option("--test", testPath)->required();
  metricsCmd->add_option("--reference", refPath)->required();
  metricsCmd->add_option("--mask", maskPath);
  metricsCmd->add_option("--report", reportPath)->required();
  metricsCmd->add_option("--time", timeIndex);
  metricsCmd->add_option("--scatter", scatterPath);

  auto* ranksCmd = app.add_subcommand("analyze-ranks",
                                      "Fiber counts and numerical ranks of a patch group");
  ranksCmd->add_option("--group-from", input)->required();
  ranksCmd->add_option("--anchor", anchorSpec, "row,col in the working tensor")
      ->required();
  ranksCmd->add_option("--report", reportPath)->required();
  ranksCmd->add_option("--mask", maskPath);
  ranksCmd->add_option("--config", configPath);
  ranksCmd->add_option("--rel-tol", rankRelTol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (inpaintCmd->parsed())
      return runInpaint(input, maskPath, output, configPath, false);
    if (halrtcCmd->parsed())
      return runInpaint(input, maskPath, output, configPath, true);

    if (detectCmd->parsed()) {
      const RunConfig cfg = loadRunConfig(configPath);
      echoConfig(cfg);
      const ImageStack stack = loadStack(input);
      ObservationMask mask = thresholdDetect(stack, timeIndex, cfg.detect);
      mask = knnRefine(mask, timeIndex, cfg.detect);
      saveContainer(output, mask);
      return 0;
    }

    if (simulateCmd->parsed()) {
      const RunConfig cfg;
      echoConfig(cfg);
      const ImageStack stack = loadStack(input);
      const DegradationSpec spec = degradationSpecFromFile(specPath);
      const ObservationMask mask = simulateDegradation(stack, spec);
      saveContainer(output, mask);
      return 0;
    }

    if (metricsCmd->parsed()) {
      const RunConfig cfg;
      echoConfig(cfg);
      const ImageStack test = loadStack(testPath);
      const ImageStack reference = loadStack(refPath);
      std::optional<ObservationMask> mask;
      if (!maskPath.empty()) mask = loadMask(maskPath);
      const QualityReport report = qualityReport(
          test, reference, timeIndex, mask ? &*mask : nullptr);
      writeReport(reportPath, report);
      if (!scatterPath.empty()) {
        if (!mask) throw DataError("--scatter requires --mask");
        std::ofstream out(scatterPath, std::ios::trunc);
        if (!out)
          throw DataError("cannot open scatter file: " + scatterPath);
        out << "original,reconstructed\n";
        out.precision(12);
        for (const auto& [orig, rec] : scatterData(test, reference, *mask))
          out << orig << "," << rec << "\n";
      }
      return 0;
    }

    if (ranksCmd->parsed()) {
      const RunConfig cfg = loadRunConfig(configPath);
      echoConfig(cfg);
      const ImageStack stack = loadStack(input);
      ObservationMask mask;
      if (!maskPath.empty()) {
        mask = loadMask(maskPath);
      } else {
        mask.values = TensorXb(stack.values.shape());
        for (Eigen::Index p = 0; p < mask.values.size(); ++p)
          mask.values[p] = 1;
      }

      Eigen::Index row = 0, col = 0;
      {
        std::istringstream in(anchorSpec);
        char comma;
        if (!(in >> row >> comma >> col) || comma != ',')
          throw DataError("anchor must be row,col");
      }

      const WorkingTensor w = rearrangeForward(stack, mask);
      const std::vector<PatchRef> refs =
          searchSimilar(w, PatchRef{row, col}, cfg.pipeline.search);
      const PatchGroup group =
          groupPatches(w, refs, cfg.pipeline.search.patchWidth, 0);

      std::ofstream out(reportPath, std::ios::trunc);
      if (!out) throw DataError("cannot open report: " + reportPath);
      const Shape& shape = group.values.shape();
      out << "group_shape = " << shape[0] << "," << shape[1] << ","
          << shape[2] << "," << shape[3] << "\n";
      for (int mode = 1; mode <= 4; ++mode) {
        const auto u = unfold(group.values, mode);
        out << "mode" << mode << "_fibers = " << countFibers(shape, mode)
            << "\n";
        out << "mode" << mode << "_dimspac = "
            << numericalRank(u.matrix, rankRelTol) << "\n";
      }
      return 0;
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
