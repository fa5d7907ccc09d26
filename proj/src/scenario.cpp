#include "plant/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace plant {

using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    std::string where;
    const auto pos = text_.find("\"" + leaf(field) + "\"");
    if (pos != std::string::npos)
      where = "line " + std::to_string(1 + std::count(text_.begin(), text_.begin() + pos, '\n')) + ": ";
    throw PlantError(Errc::ParseError, where + "field '" + field + "': " + msg);
  }

  void only_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(join(path, key), "unknown key '" + key + "'");
    }
  }

  const json& need(const json& obj, const std::string& path, const char* key) const {
    if (!obj.contains(key)) fail(join(path, key), "missing");
    return obj.at(key);
  }

  Count integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<Count>();
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  CountVec integers(const json& v, const std::string& path) const {
    CountVec out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i)
      out.push_back(integer(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i)
      out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::vector<double>> table(const json& v, const std::string& path) const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i)
      out.push_back(numbers(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  static std::string leaf(const std::string& field) {
    std::string f = field.substr(field.rfind('.') == std::string::npos ? 0 : field.rfind('.') + 1);
    return f.substr(0, f.find('['));
  }

  const std::string& text_;
};

int state_index(const std::vector<std::string>& ids, const std::string& id, const Reader& rd,
                const std::string& path) {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) rd.fail(path, "unknown state id '" + id + "'");
  return static_cast<int>(it - ids.begin());
}

StateProcessSpec read_process(const json& j, const std::string& path,
                              const std::vector<std::string>& ids, int column,
                              const std::string& base_dir, const Reader& rd) {
  rd.only_keys(j, path, {"mode", "probs", "transition", "initial", "sequence", "file"});
  const std::string mode = rd.string(rd.need(j, path, "mode"), path + ".mode");
  if (mode == "iid") {
    return StateProcessSpec::iid(rd.numbers(rd.need(j, path, "probs"), path + ".probs"));
  }
  if (mode == "markov") {
    auto t = rd.table(rd.need(j, path, "transition"), path + ".transition");
    const std::string init = rd.string(rd.need(j, path, "initial"), path + ".initial");
    return StateProcessSpec::markov(std::move(t), state_index(ids, init, rd, path + ".initial"));
  }
  if (mode == "trace") {
    std::vector<std::string> seq;
    if (j.contains("sequence")) {
      const auto& arr = rd.array(j.at("sequence"), path + ".sequence");
      for (std::size_t i = 0; i < arr.size(); ++i)
        seq.push_back(rd.string(arr[i], path + ".sequence[" + std::to_string(i) + "]"));
    } else if (j.contains("file")) {
      std::filesystem::path file = rd.string(j.at("file"), path + ".file");
      if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
      for (const auto& [x, y] : read_trace_file(file.string())) seq.push_back(column == 0 ? x : y);
    } else {
      rd.fail(path, "trace mode needs 'sequence' or 'file'");
    }
    std::vector<int> idx;
    for (const auto& id : seq) idx.push_back(state_index(ids, id, rd, path + ".sequence"));
    return StateProcessSpec::from_trace(std::move(idx));
  }
  rd.fail(path + ".mode", "expected iid, markov or trace");
}

json write_process(const StateProcessSpec& p, const std::vector<std::string>& ids) {
  json j;
  switch (p.mode) {
    case ProcessMode::Iid:
      j["mode"] = "iid";
      j["probs"] = p.probs;
      break;
    case ProcessMode::Markov:
      j["mode"] = "markov";
      j["transition"] = p.transition;
      j["initial"] = ids[p.initial];
      break;
    case ProcessMode::Trace: {
      j["mode"] = "trace";
      std::vector<std::string> seq;
      for (int s : p.trace) seq.push_back(ids[s]);
      j["sequence"] = seq;
      break;
    }
  }
  return j;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw PlantError(Errc::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  const Reader rd(text);
  rd.only_keys(root, "", {"M", "K", "beta", "alpha", "price_set", "D_max", "A_max", "c_max",
                          "supply_states", "demand_states", "process_x", "process_y",
                          "controller", "episode"});

  PlantConfig cfg;
  cfg.num_materials = static_cast<int>(rd.integer(rd.need(root, "", "M"), "M"));
  cfg.num_products = static_cast<int>(rd.integer(rd.need(root, "", "K"), "K"));
  const auto& beta = rd.array(rd.need(root, "", "beta"), "beta");
  for (std::size_t m = 0; m < beta.size(); ++m)
    cfg.beta.push_back(rd.integers(beta[m], "beta[" + std::to_string(m) + "]"));
  cfg.alpha = rd.numbers(rd.need(root, "", "alpha"), "alpha");
  cfg.price_set = rd.table(rd.need(root, "", "price_set"), "price_set");
  cfg.d_max = rd.integers(rd.need(root, "", "D_max"), "D_max");
  cfg.a_max = rd.integers(rd.need(root, "", "A_max"), "A_max");
  cfg.c_max = rd.integer(rd.need(root, "", "c_max"), "c_max");

  std::vector<SupplyState> supply;
  const auto& sx = rd.array(rd.need(root, "", "supply_states"), "supply_states");
  for (std::size_t i = 0; i < sx.size(); ++i) {
    const std::string p = "supply_states[" + std::to_string(i) + "]";
    rd.only_keys(sx[i], p, {"id", "unit_cost", "available"});
    supply.push_back(SupplyState{rd.string(rd.need(sx[i], p, "id"), p + ".id"),
                                 rd.integers(rd.need(sx[i], p, "unit_cost"), p + ".unit_cost"),
                                 rd.integers(rd.need(sx[i], p, "available"), p + ".available")});
  }

  std::vector<DemandState> demand;
  const auto& sy = rd.array(rd.need(root, "", "demand_states"), "demand_states");
  for (std::size_t i = 0; i < sy.size(); ++i) {
    const std::string p = "demand_states[" + std::to_string(i) + "]";
    rd.only_keys(sy[i], p, {"id", "F", "h", "F_hat"});
    DemandState y;
    y.id = rd.string(rd.need(sy[i], p, "id"), p + ".id");
    const bool has_h = sy[i].contains("h");
    const bool has_hat = sy[i].contains("F_hat");
    if (has_h != has_hat) rd.fail(p, "'h' and 'F_hat' must be given together");
    if (has_h) {
      y.factor = DemandFactorization{rd.numbers(sy[i].at("h"), p + ".h"),
                                     rd.table(sy[i].at("F_hat"), p + ".F_hat")};
    }
    if (sy[i].contains("F")) {
      y.F = rd.table(sy[i].at("F"), p + ".F");
    } else if (y.factor) {
      const auto& fac = *y.factor;
      if (fac.h.size() != fac.f_hat.size()) rd.fail(p + ".h", "length differs from F_hat");
      for (std::size_t k = 0; k < fac.f_hat.size(); ++k) {
        std::vector<double> row;
        for (double f : fac.f_hat[k]) row.push_back(fac.h[k] * f);
        y.F.push_back(std::move(row));
      }
    } else {
      rd.fail(p + ".F", "missing (give F, or h with F_hat)");
    }
    demand.push_back(std::move(y));
  }

  Scenario s;
  try {
    s.model = validate_config(std::move(cfg), std::move(supply), std::move(demand));
  } catch (const PlantError& e) {
    throw PlantError(Errc::ValidationError, e.what());
  }

  std::vector<std::string> xids;
  std::vector<std::string> yids;
  for (const auto& x : s.model.supply) xids.push_back(x.id);
  for (const auto& y : s.model.demand) yids.push_back(y.id);
  s.process_x = read_process(rd.need(root, "", "process_x"), "process_x", xids, 0, base_dir, rd);
  s.process_y = read_process(rd.need(root, "", "process_y"), "process_y", yids, 1, base_dir, rd);
  try {
    validate_process(s.process_x, static_cast<int>(xids.size()));
    validate_process(s.process_y, static_cast<int>(yids.size()));
  } catch (const PlantError& e) {
    throw PlantError(Errc::ValidationError, e.what());
  }

  if (root.contains("controller")) {
    const auto& c = root.at("controller");
    rd.only_keys(c, "controller",
                 {"V", "placeholder", "demand_blind", "assembly_delay", "theta", "unsafe_theta"});
    if (c.contains("V")) s.V = rd.number(c.at("V"), "controller.V");
    if (c.contains("placeholder")) s.placeholder = rd.boolean(c.at("placeholder"), "controller.placeholder");
    if (c.contains("demand_blind")) s.demand_blind = rd.boolean(c.at("demand_blind"), "controller.demand_blind");
    if (c.contains("assembly_delay"))
      s.assembly_delay = rd.boolean(c.at("assembly_delay"), "controller.assembly_delay");
    if (c.contains("theta")) s.theta = rd.numbers(c.at("theta"), "controller.theta");
    if (c.contains("unsafe_theta")) s.unsafe_theta = rd.boolean(c.at("unsafe_theta"), "controller.unsafe_theta");
  }
  if (root.contains("episode")) {
    const auto& e = root.at("episode");
    rd.only_keys(e, "episode", {"horizon", "seed", "replications"});
    if (e.contains("horizon")) s.horizon = rd.integer(e.at("horizon"), "episode.horizon");
    if (e.contains("seed")) s.seed = static_cast<std::uint64_t>(rd.integer(e.at("seed"), "episode.seed"));
    if (e.contains("replications"))
      s.replications = static_cast<int>(rd.integer(e.at("replications"), "episode.replications"));
  }
  if (!(s.V > 0.0)) throw PlantError(Errc::ValidationError, "controller.V must be positive");
  if (s.horizon < 1) throw PlantError(Errc::ValidationError, "episode.horizon must be >= 1");
  if (s.replications < 1) throw PlantError(Errc::ValidationError, "episode.replications must be >= 1");
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlantError(Errc::ParseError, "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario_text(buf.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_scenario(const Scenario& s) {
  const auto& cfg = s.model.cfg;
  json j;
  j["M"] = cfg.num_materials;
  j["K"] = cfg.num_products;
  j["beta"] = cfg.beta;
  j["alpha"] = cfg.alpha;
  j["price_set"] = cfg.price_set;
  j["D_max"] = cfg.d_max;
  j["A_max"] = cfg.a_max;
  j["c_max"] = cfg.c_max;
  std::vector<std::string> xids;
  std::vector<std::string> yids;
  for (const auto& x : s.model.supply) {
    j["supply_states"].push_back({{"id", x.id}, {"unit_cost", x.unit_cost}, {"available", x.available}});
    xids.push_back(x.id);
  }
  for (const auto& y : s.model.demand) {
    json d = {{"id", y.id}, {"F", y.F}};
    if (y.factor) {
      d["h"] = y.factor->h;
      d["F_hat"] = y.factor->f_hat;
    }
    j["demand_states"].push_back(std::move(d));
    yids.push_back(y.id);
  }
  j["process_x"] = write_process(s.process_x, xids);
  j["process_y"] = write_process(s.process_y, yids);
  json c = {{"V", s.V},
            {"placeholder", s.placeholder},
            {"demand_blind", s.demand_blind},
            {"assembly_delay", s.assembly_delay},
            {"unsafe_theta", s.unsafe_theta}};
  if (s.theta) c["theta"] = *s.theta;
  j["controller"] = std::move(c);
  j["episode"] = {{"horizon", s.horizon}, {"seed", s.seed}, {"replications", s.replications}};
  return j.dump(2) + "\n";
}

}  // namespace plant
