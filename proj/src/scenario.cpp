#include "swd/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "swd/config_doc.hpp"

namespace swd {

namespace {

using config::Value;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ValidationError, path + ": " + what);
}

bool valid_label(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-' ||
           c == '+' || c == '.';
  });
}

/// Typed, path-aware access to one section; remembers which keys were consumed.
class Keys {
 public:
  explicit Keys(const config::Section& section) : section_(section) {}

  [[nodiscard]] std::string path(const std::string& key) const {
    return section_.name + "." + key;
  }

  const Value* find(const std::string& key) {
    for (const auto& e : section_.entries) {
      if (e.key == key) {
        used_.insert(key);
        return &e.value;
      }
    }
    return nullptr;
  }

  const Value& require(const std::string& key) {
    const Value* v = find(key);
    if (!v) invalid(path(key), "missing required key");
    return *v;
  }

  double number(const Value& v, const std::string& key) const {
    if (!v.is_number()) invalid(path(key), "expected a number");
    const double x = std::get<double>(v.data);
    if (!std::isfinite(x)) invalid(path(key), "expected a finite number");
    return x;
  }

  double number(const std::string& key) { return number(require(key), key); }

  double number_or(const std::string& key, double fallback) {
    const Value* v = find(key);
    return v ? number(*v, key) : fallback;
  }

  std::size_t count_or(const std::string& key, std::size_t fallback, std::size_t min = 1) {
    const Value* v = find(key);
    if (!v) return fallback;
    const double x = number(*v, key);
    if (x != std::floor(x) || x < static_cast<double>(min) || x > 1e12) {
      invalid(path(key), "expected an integer >= " + std::to_string(min));
    }
    return static_cast<std::size_t>(x);
  }

  bool flag_or(const std::string& key, bool fallback) {
    const Value* v = find(key);
    if (!v) return fallback;
    if (!v->is_bool()) invalid(path(key), "expected true or false");
    return std::get<bool>(v->data);
  }

  std::string string(const Value& v, const std::string& key) const {
    if (!v.is_string()) invalid(path(key), "expected a quoted string");
    return std::get<std::string>(v.data);
  }

  std::optional<std::string> string_opt(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    return string(*v, key);
  }

  /// Labels may be written as strings or as numbers.
  Label label(const Value& v, const std::string& key) const {
    Label out;
    if (v.is_number()) {
      out = config::format_shortest(std::get<double>(v.data));
    } else if (v.is_string()) {
      out = std::get<std::string>(v.data);
    } else {
      invalid(path(key), "expected a mode label");
    }
    if (!valid_label(out)) invalid(path(key), "invalid label '" + out + "'");
    return out;
  }

  std::vector<Label> labels(const Value& v, const std::string& key) const {
    if (!v.is_array()) invalid(path(key), "expected an array of labels");
    std::vector<Label> out;
    for (const auto& item : std::get<Value::Array>(v.data)) out.push_back(label(item, key));
    return out;
  }

  std::vector<double> numbers(const Value& v, const std::string& key) const {
    if (!v.is_array()) invalid(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : std::get<Value::Array>(v.data)) out.push_back(number(item, key));
    return out;
  }

  Vec vector(const Value& v, const std::string& key, std::size_t n) const {
    const auto xs = numbers(v, key);
    if (xs.size() != n) invalid(path(key), "expected " + std::to_string(n) + " numbers");
    return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(n));
  }

  /// n x n matrix, row-major flat or as a list of rows.
  Mat matrix(const Value& v, const std::string& key, std::size_t n) const {
    if (!v.is_array()) invalid(path(key), "expected a matrix");
    const auto& items = std::get<Value::Array>(v.data);
    std::vector<double> flat;
    if (!items.empty() && items.front().is_array()) {
      if (items.size() != n) invalid(path(key), "expected " + std::to_string(n) + " rows");
      for (const auto& row : items) {
        const auto r = numbers(row, key);
        if (r.size() != n) invalid(path(key), "rows must have " + std::to_string(n) + " entries");
        flat.insert(flat.end(), r.begin(), r.end());
      }
    } else {
      flat = numbers(v, key);
      if (flat.size() != n * n) {
        invalid(path(key), "expected " + std::to_string(n * n) + " entries (row-major)");
      }
    }
    Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * n + j];
      }
    }
    return m;
  }

  ClassKFn class_k(const Value& v, const std::string& key) const {
    const auto cp = numbers(v, key);
    if (cp.size() != 2) invalid(path(key), "expected [coefficient, exponent]");
    try {
      return {cp[0], cp[1]};
    } catch (const Error& e) {
      invalid(path(key), e.what());
    }
  }

  void finish() const {
    for (const auto& e : section_.entries) {
      if (!used_.contains(e.key)) {
        invalid(path(e.key), "unknown key (line " + std::to_string(e.line) + ")");
      }
    }
  }

 private:
  const config::Section& section_;
  std::set<std::string> used_;
};

/// "2*u - 1" -> {slope 2, offset -1}.
std::pair<double, double> parse_affine_in_u(const std::string& text, const std::string& path) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) invalid(path, "empty family expression");
  double slope = 0.0;
  double offset = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    double sign = 1.0;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1.0 : 1.0;
      ++i;
    } else if (i != 0) {
      invalid(path, "malformed expression '" + text + "'");
    }
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) != 0 || s[j] == '.' ||
                            ((s[j] == 'e' || s[j] == 'E') && j + 1 < s.size()) ||
                            ((s[j] == '-' || s[j] == '+') && j > i &&
                             (s[j - 1] == 'e' || s[j - 1] == 'E')))) {
      ++j;
    }
    double coef = 1.0;
    const bool has_number = j > i;
    if (has_number) {
      try {
        std::size_t used = 0;
        coef = std::stod(s.substr(i, j - i), &used);
        if (used != j - i) throw std::invalid_argument("partial");
      } catch (const std::exception&) {
        invalid(path, "malformed number in '" + text + "'");
      }
      i = j;
    }
    if (i < s.size() && s[i] == '*') {
      if (!has_number) invalid(path, "malformed expression '" + text + "'");
      ++i;
      if (i >= s.size() || s[i] != 'u') invalid(path, "expected 'u' after '*'");
    }
    if (i < s.size() && s[i] == 'u') {
      slope += sign * coef;
      ++i;
    } else if (has_number) {
      offset += sign * coef;
    } else {
      invalid(path, "malformed expression '" + text + "'");
    }
  }
  return {slope, offset};
}

std::vector<Subsystem> build_subsystems(const config::Section& section, std::size_t n) {
  Keys keys(section);
  const std::string base = section.name.substr(std::string("subsystem.").size());
  if (!valid_label(base)) invalid(section.name, "invalid subsystem name");
  const Mat A = keys.matrix(keys.require("A"), "A", n);
  const Value* b = keys.find("b");
  const Value* family = keys.find("family");
  const Value* u_values = keys.find("u_values");
  const Value* labels = keys.find("labels");
  const Value* weight = keys.find("P");
  const Value* alpha = keys.find("alpha");
  const Value* beta = keys.find("beta");
  const Value* k = keys.find("k");

  if ((b != nullptr) == (family != nullptr)) {
    invalid(keys.path("b"), "give exactly one of 'b' or 'family'");
  }
  std::vector<std::pair<Label, Vec>> members;
  if (b) {
    if (u_values || labels) invalid(keys.path("u_values"), "only valid together with 'family'");
    members.emplace_back(base, keys.vector(*b, "b", n));
  } else {
    if (!family->is_array()) invalid(keys.path("family"), "expected an array of expressions");
    const auto& exprs = std::get<Value::Array>(family->data);
    if (exprs.size() != n) invalid(keys.path("family"), "expected " + std::to_string(n) + " entries");
    std::vector<std::pair<double, double>> terms;
    for (const auto& e : exprs) {
      if (e.is_number()) {
        terms.emplace_back(0.0, std::get<double>(e.data));
      } else {
        terms.push_back(parse_affine_in_u(keys.string(e, "family"), keys.path("family")));
      }
    }
    if (!u_values) invalid(keys.path("u_values"), "required with 'family'");
    const auto us = keys.numbers(*u_values, "u_values");
    if (us.empty()) invalid(keys.path("u_values"), "must not be empty");
    std::vector<Label> names;
    if (labels) {
      names = keys.labels(*labels, "labels");
      if (names.size() != us.size()) invalid(keys.path("labels"), "one label per u value");
    } else {
      for (double u : us) names.push_back(config::format_shortest(u));
    }
    for (std::size_t i = 0; i < us.size(); ++i) {
      Vec bu(static_cast<Eigen::Index>(n));
      for (std::size_t c = 0; c < n; ++c) {
        bu[static_cast<Eigen::Index>(c)] = terms[c].first * us[i] + terms[c].second;
      }
      members.emplace_back(names[i], std::move(bu));
    }
  }

  const bool custom = weight || alpha || beta;
  if (custom && (!alpha || !beta)) {
    invalid(keys.path(alpha ? "beta" : "alpha"),
            "weighted certificates need explicit alpha and beta");
  }
  std::optional<double> k_override;
  if (k) {
    k_override = keys.number(*k, "k");
    if (!(*k_override > 0.0)) invalid(keys.path("k"), "must be positive");
  }
  std::vector<Subsystem> out;
  for (auto& [label, bu] : members) {
    try {
      Subsystem sub = custom ? make_affine_subsystem(
                                   A, bu, label,
                                   weight ? keys.matrix(*weight, "P", n)
                                          : Mat(Mat::Identity(static_cast<Eigen::Index>(n),
                                                              static_cast<Eigen::Index>(n))),
                                   keys.class_k(*alpha, "alpha"), keys.class_k(*beta, "beta"))
                             : make_affine_subsystem(A, bu, label);
      if (k_override) sub = sub.with_decay_rate(*k_override);
      out.push_back(std::move(sub));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ValidationError) throw;
      invalid(section.name, e.what());
    }
  }
  keys.finish();
  return out;
}

std::vector<double> dwell_values(Keys& keys, const Value& v, const Label& initial,
                                 const std::vector<Label>& modes, bool periodic,
                                 const SwitchedSystem& system, double eps) {
  if (v.is_number()) return {keys.number(v, "T")};
  if (v.is_array()) return keys.numbers(v, "T");
  if (v.is_string() && std::get<std::string>(v.data) == "auto") {
    // Each interval gets exactly the dwell time of the transition it realizes.
    std::vector<double> out;
    Label prev = initial;
    auto push = [&](const Label& next) {
      const double t = pairwise_dwell(eps, system.at(prev), system.at(next));
      if (!(t > 0.0)) {
        invalid(keys.path("T"), "transition " + prev + " -> " + next + " has zero dwell time");
      }
      out.push_back(t);
      prev = next;
    };
    for (const auto& m : modes) push(m);
    if (periodic) push(initial);
    return out;
  }
  invalid(keys.path("T"), "expected a number, an array or \"auto\"");
}

double resolve_horizon(Keys& keys, const Value* v, const SwitchingSignal& signal,
                       const SwitchedSystem& system, double eps) {
  const std::string path = keys.path("horizon");
  if (v && v->is_number()) {
    const double h = keys.number(*v, "horizon");
    if (!(h > signal.t0())) invalid(path, "must exceed t0");
    return h;
  }
  const std::string spec = v ? keys.string(*v, "horizon") : "auto";
  if (spec == "auto") {
    if (signal.is_periodic()) return signal.t0() + 5.0 * *signal.period();
    const auto segs = signal.segments();
    if (segs.empty()) invalid(path, "a constant signal needs an explicit horizon");
    double longest = segs.front().time - signal.t0();
    for (std::size_t i = 1; i < segs.size(); ++i) {
      longest = std::max(longest, segs[i].time - segs[i - 1].time);
    }
    return segs.back().time + longest;
  }
  const auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')') invalid(path, "unrecognized '" + spec + "'");
  const std::string fn = spec.substr(0, open);
  const std::string args = spec.substr(open + 1, spec.size() - open - 2);
  if (fn == "periods") {
    if (!signal.is_periodic()) invalid(path, "periods(n) needs a periodic signal");
    double count = 0.0;
    try {
      count = std::stod(args);
    } catch (const std::exception&) {
      invalid(path, "periods(n) needs a number");
    }
    if (!(count > 0.0)) invalid(path, "periods(n) needs n > 0");
    return signal.t0() + count * *signal.period();
  }
  if (fn == "dwell") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) invalid(path, "dwell(a,b) needs two labels");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    const Label a = trim(args.substr(0, comma));
    const Label b = trim(args.substr(comma + 1));
    if (!system.contains(a) || !system.contains(b)) invalid(path, "unknown label in " + spec);
    const double t = pairwise_dwell(eps, system.at(a), system.at(b));
    if (!(t > 0.0)) invalid(path, spec + " is zero");
    return signal.t0() + t;
  }
  invalid(path, "unrecognized '" + spec + "'");
}

SignalSpec build_signal(const config::Section& section, const SwitchedSystem& system, double eps) {
  Keys keys(section);
  const std::string name =
      section.name == "signal" ? "main" : section.name.substr(std::string("signal.").size());
  if (!valid_label(name)) invalid(section.name, "invalid signal name");
  const std::size_t n = system.dimension();

  const std::string kind = keys.string(keys.require("kind"), "kind");
  const Label initial = keys.label(keys.require("initial"), "initial");
  const Value* modes_v = keys.find("modes");
  const std::vector<Label> modes = modes_v ? keys.labels(*modes_v, "modes") : std::vector<Label>{};
  const double t0 = keys.number_or("t0", 0.0);
  for (const auto& m : modes) {
    if (!system.contains(m)) invalid(keys.path("modes"), "unknown mode '" + m + "'");
  }
  if (!system.contains(initial)) invalid(keys.path("initial"), "unknown mode '" + initial + "'");

  std::optional<SwitchingSignal> signal;
  try {
    if (kind == "explicit") {
      const auto times = keys.numbers(keys.require("times"), "times");
      if (times.size() != modes.size()) invalid(keys.path("times"), "one time per mode");
      std::vector<SwitchPoint> segments;
      for (std::size_t i = 0; i < times.size(); ++i) segments.push_back({times[i], modes[i]});
      std::optional<double> period;
      if (const Value* p = keys.find("period")) period = keys.number(*p, "period");
      signal.emplace(t0, initial, std::move(segments), period);
    } else if (kind == "from_dwell" || kind == "periodic") {
      const bool periodic = kind == "periodic";
      const auto dwell = dwell_values(keys, keys.require("T"), initial, modes, periodic, system, eps);
      signal.emplace(signal_from_dwell(initial, modes, dwell, t0, periodic));
    } else {
      invalid(keys.path("kind"), "expected explicit, from_dwell or periodic");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    invalid(section.name, e.what());
  }

  SignalSpec spec{name, *signal, 0.0, {}, 0.0, true, false};
  spec.horizon = resolve_horizon(keys, keys.find("horizon"), *signal, system, eps);

  if (const Value* x0 = keys.find("x0")) {
    if (!x0->is_array()) invalid(keys.path("x0"), "expected a point or a list of points");
    const auto& items = std::get<Value::Array>(x0->data);
    if (!items.empty() && items.front().is_array()) {
      for (const auto& p : items) spec.initial_states.push_back(keys.vector(p, "x0", n));
    } else {
      spec.initial_states.push_back(keys.vector(*x0, "x0", n));
    }
  }
  if (const Value* of = keys.find("boundary_of")) {
    const Label region = keys.label(*of, "boundary_of");
    if (!system.contains(region)) invalid(keys.path("boundary_of"), "unknown mode '" + region + "'");
    const std::size_t count = keys.count_or("boundary_count", 16, 3);
    for (auto& p : region_boundary_points(system.at(region), eps, count)) {
      spec.initial_states.push_back(std::move(p));
    }
  } else if (keys.find("boundary_count")) {
    invalid(keys.path("boundary_count"), "only valid together with 'boundary_of'");
  }
  if (const Value* tr = keys.find("transient")) {
    if (tr->is_string() && std::get<std::string>(tr->data) == "period") {
      if (!signal->is_periodic()) invalid(keys.path("transient"), "signal is not periodic");
      spec.transient = *signal->period();
    } else {
      spec.transient = keys.number(*tr, "transient");
      if (spec.transient < 0.0) invalid(keys.path("transient"), "must be >= 0");
    }
  }
  spec.verify = keys.flag_or("verify", true);
  spec.convergence = keys.flag_or("convergence", false);
  keys.finish();
  return spec;
}

const config::Section* find_section(const config::Document& doc, const std::string& name) {
  for (const auto& s : doc.sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const ScenarioOverrides& overrides) {
  const config::Document doc = config::parse_document(text);
  for (const auto& s : doc.sections) {
    const bool known = s.name == "system" || s.name == "analysis" || s.name == "numeric" ||
                       s.name == "signal" || s.name.starts_with("subsystem.") ||
                       s.name.starts_with("signal.");
    if (!known) invalid(s.name, "unknown section (line " + std::to_string(s.line) + ")");
  }

  const config::Section* sys = find_section(doc, "system");
  if (!sys) invalid("system", "missing [system] section");
  Keys sys_keys(*sys);
  const std::size_t n = sys_keys.count_or("dimension", 0, 1);
  if (n == 0) invalid("system.dimension", "missing required key");
  std::string name = sys_keys.string_opt("name").value_or("scenario");
  sys_keys.finish();

  std::vector<Subsystem> subsystems;
  for (const auto& s : doc.sections) {
    if (!s.name.starts_with("subsystem.")) continue;
    for (auto& sub : build_subsystems(s, n)) subsystems.push_back(std::move(sub));
  }
  if (subsystems.empty()) invalid("subsystem", "at least one [subsystem.<label>] is required");
  std::optional<SwitchedSystem> system;
  try {
    system.emplace(std::move(subsystems));
  } catch (const Error& e) {
    invalid("subsystem", e.what());
  }

  const config::Section* an = find_section(doc, "analysis");
  if (!an) invalid("analysis", "missing [analysis] section");
  Keys akeys(*an);
  double eps = akeys.number("eps");
  if (overrides.eps) eps = *overrides.eps;
  if (!(eps > 0.0)) invalid("analysis.eps", "must be positive");

  std::vector<SignalSpec> signals;
  for (const auto& s : doc.sections) {
    if (s.name == "signal" || s.name.starts_with("signal.")) {
      signals.push_back(build_signal(s, *system, eps));
    }
  }

  Scenario sc{std::move(name), std::move(*system), eps, std::move(signals), {}, 10, {}, {}, {},
              Box::cube(n, -3.0, 3.0), {}};
  auto& f = sc.analyses;
  f.certify = akeys.flag_or("certify", false);
  f.dwell_table = akeys.flag_or("dwell_table", false);
  f.simulate = akeys.flag_or("simulate", false);
  f.trapping = akeys.flag_or("trapping", false);
  f.w_monitor = akeys.flag_or("w_monitor", false);
  f.convergence = akeys.flag_or("convergence", false);
  f.triangle = akeys.flag_or("triangle", false);
  f.tube = akeys.flag_or("tube", false);
  f.plot_data = akeys.flag_or("plot_data", false);
  if (!f.any()) invalid("analysis", "no analysis requested");
  sc.i_max = akeys.count_or("i_max", 10, 1);

  if (const Value* tr = akeys.find("transitions")) {
    if (!tr->is_array()) invalid("analysis.transitions", "expected [[from, to], ...]");
    for (const auto& pair : std::get<Value::Array>(tr->data)) {
      const auto labels = akeys.labels(pair, "transitions");
      if (labels.size() != 2) invalid("analysis.transitions", "each entry is [from, to]");
      for (const auto& l : labels) {
        if (!sc.system.contains(l)) invalid("analysis.transitions", "unknown mode '" + l + "'");
      }
      sc.transitions.emplace_back(labels[0], labels[1]);
    }
  }
  if (const Value* tm = akeys.find("triangle_modes")) {
    const auto labels = akeys.labels(*tm, "triangle_modes");
    if (labels.size() != 3) invalid("analysis.triangle_modes", "expected [u0, v, u1]");
    for (const auto& l : labels) {
      if (!sc.system.contains(l)) invalid("analysis.triangle_modes", "unknown mode '" + l + "'");
    }
    sc.triangle_modes = std::array<Label, 3>{labels[0], labels[1], labels[2]};
  }
  const Value* tube_from = akeys.find("tube_from");
  const Value* tube_to = akeys.find("tube_to");
  const Value* tube_times = akeys.find("tube_times");
  const std::size_t tube_count = akeys.count_or("tube_count", 360, 3);
  if (tube_from || tube_to) {
    if (!tube_from || !tube_to) invalid("analysis.tube_from", "tube_from and tube_to go together");
    TubeSpec tube{akeys.label(*tube_from, "tube_from"), akeys.label(*tube_to, "tube_to"), {},
                  tube_count};
    if (!sc.system.contains(tube.from) || !sc.system.contains(tube.to)) {
      invalid("analysis.tube_from", "unknown mode");
    }
    if (tube_times) {
      tube.times = akeys.numbers(*tube_times, "tube_times");
      for (std::size_t i = 0; i < tube.times.size(); ++i) {
        if (tube.times[i] < 0.0 || (i > 0 && !(tube.times[i] > tube.times[i - 1]))) {
          invalid("analysis.tube_times", "must be nonnegative and increasing");
        }
      }
    } else {
      const double t = pairwise_dwell(eps, sc.system.at(tube.from), sc.system.at(tube.to));
      for (int i = 0; i <= 4; ++i) tube.times.push_back(t * i / 4.0);
      tube.times.erase(std::unique(tube.times.begin(), tube.times.end()), tube.times.end());
    }
    sc.tube = std::move(tube);
  } else if (tube_times) {
    invalid("analysis.tube_times", "needs tube_from and tube_to");
  }
  if (const Value* box = akeys.find("certify_box")) {
    if (!box->is_array()) invalid("analysis.certify_box", "expected [lo, hi] or [[lo..], [hi..]]");
    const auto& items = std::get<Value::Array>(box->data);
    if (items.size() != 2) invalid("analysis.certify_box", "expected two entries");
    if (items[0].is_array()) {
      sc.certify_box = {akeys.vector(items[0], "certify_box", n),
                        akeys.vector(items[1], "certify_box", n)};
    } else {
      sc.certify_box = Box::cube(n, akeys.number(items[0], "certify_box"),
                                 akeys.number(items[1], "certify_box"));
    }
    if (!((sc.certify_box.upper - sc.certify_box.lower).array() > 0.0).all()) {
      invalid("analysis.certify_box", "box must have positive volume");
    }
  }
  akeys.finish();

  if (const config::Section* num = find_section(doc, "numeric")) {
    Keys nk(*num);
    auto& ns = sc.numeric;
    ns.step = nk.number_or("step", ns.step);
    if (!(ns.step > 0.0)) invalid("numeric.step", "must be positive");
    const double seed = nk.number_or("seed", static_cast<double>(ns.seed));
    if (seed < 0.0 || seed != std::floor(seed) || seed > 9007199254740992.0) {
      invalid("numeric.seed", "expected a nonnegative integer");
    }
    ns.seed = static_cast<std::uint64_t>(seed);
    ns.samples = nk.count_or("samples", ns.samples, 1);
    ns.membership_tolerance = nk.number_or("membership_tol", ns.membership_tolerance);
    if (ns.membership_tolerance < 0.0) invalid("numeric.membership_tol", "must be >= 0");
    ns.mu_samples = nk.count_or("mu_samples", ns.mu_samples, 1);
    if (const Value* r = nk.find("mu_radius")) {
      ns.mu_radius = nk.number(*r, "mu_radius");
      if (!(*ns.mu_radius > 0.0)) invalid("numeric.mu_radius", "must be positive");
    }
    nk.finish();
  }
  if (overrides.step) {
    if (!(*overrides.step > 0.0)) invalid("numeric.step", "must be positive");
    sc.numeric.step = *overrides.step;
  }
  if (overrides.seed) sc.numeric.seed = *overrides.seed;

  if (f.needs_trajectories()) {
    if (sc.signals.empty()) invalid("signal", "requested analyses need at least one [signal]");
    for (const auto& s : sc.signals) {
      if (s.initial_states.empty()) {
        invalid("signal." + s.name + ".x0", "no initial states (x0 or boundary_of)");
      }
    }
  }
  if (f.convergence &&
      std::none_of(sc.signals.begin(), sc.signals.end(), [](const auto& s) { return s.convergence; })) {
    invalid("analysis.convergence", "no signal has convergence = true");
  }
  if (f.triangle && !sc.triangle_modes) invalid("analysis.triangle_modes", "required by triangle");
  if (f.tube && !sc.tube) invalid("analysis.tube_from", "required by tube");
  if (f.dwell_table && sc.transitions.empty() && sc.signals.empty()) {
    invalid("analysis.transitions", "dwell_table needs transitions or a signal");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

std::string serialize_signal(const SwitchingSignal& signal, std::string_view name) {
  std::ostringstream out;
  out << "[signal." << name << "]\n";
  out << "kind = \"explicit\"\n";
  out << "initial = \"" << signal.initial_mode() << "\"\n";
  out << "t0 = " << config::format_precise(signal.t0()) << "\n";
  out << "modes = [";
  for (std::size_t i = 0; i < signal.segments().size(); ++i) {
    out << (i ? ", " : "") << '"' << signal.segments()[i].mode << '"';
  }
  out << "]\ntimes = [";
  for (std::size_t i = 0; i < signal.segments().size(); ++i) {
    out << (i ? ", " : "") << config::format_precise(signal.segments()[i].time);
  }
  out << "]\n";
  if (signal.period()) out << "period = " << config::format_precise(*signal.period()) << "\n";
  return out.str();
}

}  // namespace swd
