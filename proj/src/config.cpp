#include "nllrtc/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "nllrtc/errors.hpp"

namespace nllrtc {

namespace {

std::map<std::string, std::string> parseKeyValues(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      const auto last = s.find_last_not_of(" \t\r");
      return s.substr(first, last - first + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(lineNo) +
                      " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DataError("empty key on config line " +
                                     std::to_string(lineNo));
    kv[key] = value;
  }
  return kv;
}

double toDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw DataError("invalid numeric value for " + key + ": " + value);
  }
}

long long toInt(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return i;
  } catch (const std::exception&) {
    throw DataError("invalid integer value for " + key + ": " + value);
  }
}

std::string readText(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

RunConfig RunConfig::fromText(const std::string& text) {
  RunConfig cfg;
  for (const auto& [key, value] : parseKeyValues(text)) {
    if (key == "patch_width")
      cfg.pipeline.search.patchWidth = toInt(key, value);
    else if (key == "search_radius")
      cfg.pipeline.search.radius = toInt(key, value);
    else if (key == "search_step")
      cfg.pipeline.search.step = toInt(key, value);
    else if (key == "gamma2")
      cfg.pipeline.search.gamma2 = toDouble(key, value);
    else if (key == "min_group_size")
      cfg.pipeline.search.minGroupSize = toInt(key, value);
    else if (key == "min_joint_fraction")
      cfg.pipeline.search.minJointFraction = toDouble(key, value);
    else if (key == "alpha1")
      cfg.pipeline.solver.alpha[0] = toDouble(key, value);
    else if (key == "alpha2")
      cfg.pipeline.solver.alpha[1] = toDouble(key, value);
    else if (key == "alpha3")
      cfg.pipeline.solver.alpha[2] = toDouble(key, value);
    else if (key == "alpha4")
      cfg.pipeline.solver.alpha[3] = toDouble(key, value);
    else if (key == "beta")
      cfg.pipeline.solver.beta = toDouble(key, value);
    else if (key == "epsilon")
      cfg.pipeline.solver.setEpsilon(toDouble(key, value));
    else if (key == "tol")
      cfg.pipeline.solver.tol = toDouble(key, value);
    else if (key == "max_iter")
      cfg.pipeline.solver.maxIter = static_cast<int>(toInt(key, value));
    else if (key == "threshold_step")
      cfg.detect.thresholdStep = toDouble(key, value);
    else if (key == "refine_radius")
      cfg.detect.refineRadius = toInt(key, value);
    else if (key == "majority_fraction")
      cfg.detect.majorityFraction = toDouble(key, value);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(toInt(key, value));
    else
      throw DataError("unknown config key: " + key);
  }
  return cfg;
}

RunConfig RunConfig::fromFile(const std::filesystem::path& path) {
  return fromText(readText(path));
}

std::string RunConfig::effectiveText() const {
  std::ostringstream out;
  out.precision(17);
  out << "patch_width = " << pipeline.search.patchWidth << "\n"
      << "search_radius = " << pipeline.search.radius << "\n"
      << "search_step = " << pipeline.search.step << "\n"
      << "gamma2 = " << pipeline.search.gamma2 << "\n"
      << "min_group_size = " << pipeline.search.minGroupSize << "\n"
      << "min_joint_fraction = " << pipeline.search.minJointFraction << "\n"
      << "alpha1 = " << pipeline.solver.alpha[0] << "\n"
      << "alpha2 = " << pipeline.solver.alpha[1] << "\n"
      << "alpha3 = " << pipeline.solver.alpha[2] << "\n"
      << "alpha4 = " << pipeline.solver.alpha[3] << "\n"
      << "beta = " << pipeline.solver.beta << "\n"
      << "epsilon = " << pipeline.solver.epsilon[0] << "\n"
      << "tol = " << pipeline.solver.tol << "\n"
      << "max_iter = " << pipeline.solver.maxIter << "\n"
      << "threshold_step = " << detect.thresholdStep << "\n"
      << "refine_radius = " << detect.refineRadius << "\n"
      << "majority_fraction = " << detect.majorityFraction << "\n"
      << "seed = " << seed << "\n";
  return out.str();
}

DegradationSpec degradationSpecFromText(const std::string& text) {
  DegradationSpec spec;
  for (const auto& [key, value] : parseKeyValues(text)) {
    if (key == "kind") {
      if (value == "cloud")
        spec.kind = DegradationSpec::Kind::Cloud;
      else if (value == "diagonal-stripes")
        spec.kind = DegradationSpec::Kind::DiagonalStripes;
      else if (value == "vertical-stripes")
        spec.kind = DegradationSpec::Kind::VerticalStripes;
      else
        throw DataError("unknown degradation kind: " + value);
    } else if (key == "time") {
      spec.targetTime = toInt(key, value);
    } else if (key == "ellipses") {
      // center_row,center_col,radius_row,radius_col; ...
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ';')) {
        std::istringstream fields(item);
        Ellipse e;
        char comma;
        if (!(fields >> e.centerRow >> comma >> e.centerCol >> comma >>
              e.radiusRow >> comma >> e.radiusCol))
          throw DataError("invalid ellipse: " + item);
        spec.ellipses.push_back(e);
      }
    } else if (key == "stripe_period") {
      spec.stripePeriod = toInt(key, value);
    } else if (key == "stripe_width") {
      spec.stripeWidth = toInt(key, value);
    } else if (key == "stripe_count") {
      spec.stripeCount = toInt(key, value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(toInt(key, value));
    } else {
      throw DataError("unknown degradation key: " + key);
    }
  }
  return spec;
}

DegradationSpec degradationSpecFromFile(const std::filesystem::path& path) {
  return degradationSpecFromText(readText(path));
}

}  // namespace nllrtc
