#include "depthup/config.hpp"

#include "depthup/io.hpp"

#include <array>
#include <charconv>
#include <functional>
#include <stdexcept>

namespace depthup {
namespace {

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("config: bad value '" + text + "' for " + key);
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::string key;
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, const std::string&)> set;
};

// Builds a Field for a numeric member reached through `access`.
template <typename T, typename Access>
Field numeric(std::string key, Access access) {
  Field f;
  f.key = key;
  f.get = [access](const Config& c) {
    Config copy = c;
    const T v = access(copy);
    if constexpr (std::is_floating_point_v<T>) {
      return format_number(v);
    } else {
      return std::to_string(v);
    }
  };
  f.set = [access, key](Config& c, const std::string& text) { access(c) = parse_number<T>(key, text); };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(numeric<double>("solver.beta", [](Config& c) -> double& { return c.solver.beta; }));
    t.push_back(numeric<double>("solver.gamma", [](Config& c) -> double& { return c.solver.gamma; }));
    t.push_back(numeric<double>("solver.rho", [](Config& c) -> double& { return c.solver.rho; }));
    t.push_back(numeric<int>("solver.max_iters", [](Config& c) -> int& { return c.solver.max_iters; }));
    t.push_back(numeric<double>("solver.tol_primal", [](Config& c) -> double& { return c.solver.tol_primal; }));
    t.push_back(numeric<double>("solver.tol_dual", [](Config& c) -> double& { return c.solver.tol_dual; }));
    t.push_back(numeric<Index>("prior.window", [](Config& c) -> Index& { return c.prior.window; }));
    t.push_back(numeric<double>("prior.jump_threshold", [](Config& c) -> double& { return c.prior.jump_threshold; }));
    t.push_back({"prior.weight_stencil", [](const Config& c) { return to_string(c.weight_stencil); },
                 [](Config& c, const std::string& v) { c.weight_stencil = parse_weight_stencil(v); }});
    t.push_back(numeric<double>("canny.sigma", [](Config& c) -> double& { return c.prior.canny.gaussian_sigma; }));
    t.push_back(numeric<double>("canny.low", [](Config& c) -> double& { return c.prior.canny.low_threshold; }));
    t.push_back(numeric<double>("canny.high", [](Config& c) -> double& { return c.prior.canny.high_threshold; }));
    t.push_back(numeric<double>("acquisition.sampling_rate", [](Config& c) -> double& { return c.acquisition.sampling_rate; }));
    t.push_back(numeric<double>("acquisition.sigma0", [](Config& c) -> double& { return c.acquisition.sigma0; }));
    t.push_back(numeric<double>("acquisition.sigma1", [](Config& c) -> double& { return c.acquisition.sigma1; }));
    t.push_back(numeric<double>("acquisition.max_range", [](Config& c) -> double& { return c.acquisition.max_range; }));
    t.push_back(numeric<Index>("acquisition.fov_first_row", [](Config& c) -> Index& { return c.acquisition.fov_first_row; }));
    t.push_back(numeric<Index>("acquisition.fov_last_row", [](Config& c) -> Index& { return c.acquisition.fov_last_row; }));
    t.push_back(numeric<std::uint64_t>("acquisition.seed", [](Config& c) -> std::uint64_t& { return c.acquisition.seed; }));
    t.push_back(numeric<Index>("scene.rows", [](Config& c) -> Index& { return c.scene.rows; }));
    t.push_back(numeric<Index>("scene.cols", [](Config& c) -> Index& { return c.scene.cols; }));
    t.push_back(numeric<std::uint64_t>("scene.seed", [](Config& c) -> std::uint64_t& { return c.scene.seed; }));
    t.push_back(numeric<int>("scene.boxes", [](Config& c) -> int& { return c.scene.boxes; }));
    t.push_back(numeric<int>("scene.stripes", [](Config& c) -> int& { return c.scene.stripes; }));
    t.push_back(numeric<double>("scene.intensity_noise", [](Config& c) -> double& { return c.scene.intensity_noise; }));
    return t;
  }();
  return table;
}

const Field& field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return f;
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const Field& f : fields()) out.push_back(f.key);
    return out;
  }();
  return k;
}

Config Config::preset(const std::string& name) {
  Config c;
  if (name == "synthia") {
    c.solver.beta = 0.005;
    c.solver.gamma = 0.001;
    c.prior.window = 5;
  } else if (name == "kitti") {
    c.solver.beta = 0.01;
    c.solver.gamma = 0.002;
    c.prior.window = 5;
  } else {
    throw std::invalid_argument("config: unknown preset '" + name + "'");
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value) { field(key).set(*this, trim(value)); }

std::string Config::get(const std::string& key) const { return field(key).get(*this); }

void Config::merge_text(const std::string& text) {
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const size_t end = std::min(text.find('\n', pos), text.size());
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) + ": expected key = value");
    }
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

std::string Config::to_text() const {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

nlohmann::json Config::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : fields()) j[f.key] = f.get(*this);
  return j;
}

void Config::validate() const {
  solver.validate();
  prior.validate();
  acquisition.validate();
  check_shape({scene.rows, scene.cols});
  if (scene.boxes < 0 || scene.stripes < 0) throw std::invalid_argument("config: scene counts must be >= 0");
  if (!(scene.intensity_noise >= 0.0)) throw std::invalid_argument("config: scene.intensity_noise must be >= 0");
}

Config load_config(const std::filesystem::path& path) {
  Config c;
  c.merge_text(io::read_text(path));
  return c;
}

}  // namespace depthup
