#include "fcsmpc/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fcsmpc/predictor.hpp"

namespace fcsmpc {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("scenario: " + what); }

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = strip(line);
      if (t.empty()) continue;
      const std::size_t eq = t.find('=');
      if (eq == std::string::npos)
        fail("line " + std::to_string(line_no) + " is not 'key = value'");
      const std::string key = strip(t.substr(0, eq));
      const std::string value = strip(t.substr(eq + 1));
      if (key.empty()) fail("empty key on line " + std::to_string(line_no));
      if (value.empty()) fail("empty value for key '" + key + "'");
      if (!values_.emplace(key, value).second) fail("duplicate key '" + key + "'");
    }
  }

  [[nodiscard]] std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }

  void expect_empty() const {
    if (values_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : values_) {
      if (!keys.empty()) keys += ", ";
      keys += "'" + k + "'";
    }
    fail("unknown key(s): " + keys);
  }

 private:
  std::map<std::string, std::string> values_;
};

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *strip(end ? std::string(end) : std::string()).c_str() != '\0')
    fail("key '" + key + "': '" + v + "' is not a number");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const double r = std::round(x);
  if (std::abs(x - r) > 0.0) fail("key '" + key + "': '" + v + "' is not an integer");
  return static_cast<long>(r);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  fail("key '" + key + "': expected on/off, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = v.find(',', start);
    const std::string item = strip(comma == std::string::npos ? v.substr(start)
                                                              : v.substr(start, comma - start));
    if (item.empty()) fail("key '" + key + "': empty list item");
    out.push_back(to_double(key, item));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

std::array<double, 3> to_triple(const std::string& key, const std::string& v) {
  const auto list = to_list(key, v);
  if (list.size() != 3) fail("key '" + key + "': expected 3 comma-separated values");
  return {list[0], list[1], list[2]};
}

CouplingTable to_table(const std::string& key, const std::string& v) {
  if (v == "equations") return CouplingTable::kEquations;
  if (v == "printed_table") return CouplingTable::kPrintedTable;
  fail("key '" + key + "': expected equations|printed_table, got '" + v + "'");
}

double require_num(KeyValues& kv, const std::string& key) {
  const auto v = kv.take(key);
  if (!v) fail("missing required key '" + key + "'");
  return to_double(key, *v);
}

bool near_integer(double x, double tol = 1e-6) { return std::abs(x - std::round(x)) <= tol; }

}  // namespace

void Scenario::validate() const {
  plant.validate();
  weights.validate();
  if (!(Ts > 0.0)) fail("controller.Ts must be > 0");
  if (!(duration > 0.0)) fail("run.duration must be > 0");
  if (!(log_rate > 0.0)) fail("run.log_rate must be > 0");
  if (!(reference.frequency > 0.0)) fail("reference.frequency must be > 0");
  if (!(reference.amplitude >= 0.0)) fail("reference.amplitude must be >= 0");
  if (warmup_periods < 0) fail("run.warmup_periods must be >= 0");
  if (max_order < 1) fail("metrics.max_order must be >= 1");
  if (!(band > 0.0)) fail("metrics.band must be > 0");
  if (controller_C && !(*controller_C > 0.0)) fail("controller.C must be > 0");

  if (!near_integer(duration / Ts)) fail("run.duration must be a whole number of periods Ts");
  if (!near_integer(duration * reference.frequency))
    fail("run.duration must cover a whole number of fundamental periods");
  if (!near_integer(log_rate / reference.frequency))
    fail("run.log_rate must give a whole number of samples per fundamental period");
  if (periods() - warmup_periods < 1)
    fail("run leaves no full fundamental period after the warm-up");

  if (alphas) SubintervalGrid(*alphas, Ts);  // construction performs the checks

  if (!initial_i.allFinite() || !std::isfinite(initial_vd.vd1) || !std::isfinite(initial_vd.vd2) ||
      !std::isfinite(initial_vd.vd3))
    fail("initial state must be finite");
}

Scenario parse_scenario(const std::string& text, const std::string& fallback_name) {
  KeyValues kv(text);
  Scenario sc;
  sc.name = fallback_name;

  if (auto v = kv.take("name")) sc.name = *v;

  sc.plant.R = require_num(kv, "plant.R");
  sc.plant.L = require_num(kv, "plant.L");
  sc.plant.V_dc = require_num(kv, "plant.Vdc");
  if (auto v = kv.take("plant.C")) sc.plant.C = to_double("plant.C", *v);
  if (auto v = kv.take("plant.capacitor_coupling"))
    sc.plant.capacitor_coupling = to_bool("plant.capacitor_coupling", *v);
  if (auto v = kv.take("plant.neutral")) {
    if (*v == "tied") sc.plant.neutral = NeutralMode::kTied;
    else if (*v == "floating") sc.plant.neutral = NeutralMode::kFloating;
    else fail("key 'plant.neutral': expected tied|floating, got '" + *v + "'");
  }
  if (auto v = kv.take("plant.coupling_table"))
    sc.plant.coupling_table = to_table("plant.coupling_table", *v);

  sc.Ts = require_num(kv, "controller.Ts");
  if (auto v = kv.take("controller.alphas")) sc.alphas = to_list("controller.alphas", *v);
  sc.weights.lambda_I = require_num(kv, "controller.lambda_I");
  sc.weights.lambda_C = require_num(kv, "controller.lambda_C");
  if (auto v = kv.take("controller.lambda_S"))
    sc.weights.lambda_S = to_double("controller.lambda_S", *v);
  if (auto v = kv.take("controller.C")) sc.controller_C = to_double("controller.C", *v);
  if (auto v = kv.take("controller.tracking_norm")) {
    if (*v == "l1") sc.cost_options.tracking_norm = TrackingNorm::kL1;
    else if (*v == "l2sq") sc.cost_options.tracking_norm = TrackingNorm::kL2Squared;
    else fail("key 'controller.tracking_norm': expected l1|l2sq, got '" + *v + "'");
  }
  if (auto v = kv.take("controller.coupling_table"))
    sc.cost_options.coupling_table = to_table("controller.coupling_table", *v);
  if (auto v = kv.take("controller.per_subinterval_reference"))
    sc.per_subinterval_reference = to_bool("controller.per_subinterval_reference", *v);

  sc.reference.amplitude = require_num(kv, "reference.amplitude");
  sc.reference.frequency = require_num(kv, "reference.frequency");
  if (auto v = kv.take("reference.phase_deg")) {
    const auto deg = to_triple("reference.phase_deg", *v);
    for (int k = 0; k < 3; ++k)
      sc.reference.phase_rad[static_cast<std::size_t>(k)] =
          deg[static_cast<std::size_t>(k)] * 3.141592653589793238462643383279502884 / 180.0;
  }

  sc.duration = require_num(kv, "run.duration");
  if (auto v = kv.take("run.warmup_periods"))
    sc.warmup_periods = static_cast<int>(to_long("run.warmup_periods", *v));
  if (auto v = kv.take("run.log_rate")) sc.log_rate = to_double("run.log_rate", *v);
  if (auto v = kv.take("run.initial_i")) {
    const auto t = to_triple("run.initial_i", *v);
    sc.initial_i = Vec3(t[0], t[1], t[2]);
  }
  if (auto v = kv.take("run.initial_vd")) {
    const auto t = to_triple("run.initial_vd", *v);
    sc.initial_vd = {t[0], t[1], t[2]};
  }

  if (auto v = kv.take("metrics.max_order"))
    sc.max_order = static_cast<int>(to_long("metrics.max_order", *v));
  if (auto v = kv.take("metrics.band")) sc.band = to_double("metrics.band", *v);

  kv.expect_empty();
  sc.validate();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();

  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem.erase(0, slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
    stem.erase(dot);
  return parse_scenario(ss.str(), stem.empty() ? "scenario" : stem);
}

}  // namespace fcsmpc
