#include "mechband_cli/spec_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "mechband/errors.hpp"

namespace mechband::cli {

namespace {

using Json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, (path.empty() ? "/" : path) + ": " + what);
}

void reject_unknown(const Json& object, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail(path + "/" + item.key(), "unknown key");
  }
}

const Json& require(const Json& object, const std::string& path, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) fail(path + "/" + key, "missing key");
  return *it;
}

const Json& require_object(const Json& value, const std::string& path) {
  if (!value.is_object()) fail(path, "expected an object");
  return value;
}

std::size_t read_size(const Json& object, const std::string& path, const char* key) {
  const Json& value = require(object, path, key);
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
    fail(path + "/" + key, "expected a non-negative integer");
  return value.get<std::size_t>();
}

double read_number(const Json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected a number");
  return value.get<double>();
}

// Walks a nested array of the given shape in row-major order.
void read_tensor(const Json& value, const std::string& path,
                 std::span<const std::size_t> shape, std::vector<double>& out) {
  if (shape.empty()) {
    out.push_back(read_number(value, path));
    return;
  }
  if (!value.is_array()) fail(path, "expected an array");
  if (value.size() != shape.front()) {
    fail(path, "expected " + std::to_string(shape.front()) + " entries, got " +
                   std::to_string(value.size()));
  }
  for (std::size_t i = 0; i < value.size(); ++i)
    read_tensor(value[i], path + "/" + std::to_string(i), shape.subspan(1), out);
}

std::vector<double> tensor(const Json& doc, const char* key,
                           std::initializer_list<std::size_t> shape) {
  const std::vector<std::size_t> dims(shape);
  std::vector<double> out;
  read_tensor(require(doc, "", key), std::string("/") + key, dims, out);
  return out;
}

Json nested(std::span<const double> flat, std::span<const std::size_t> shape) {
  Json out = Json::array();
  if (shape.size() == 1) {
    for (std::size_t i = 0; i < shape.front(); ++i) out.push_back(flat[i]);
    return out;
  }
  std::size_t stride = 1;
  for (std::size_t k = 1; k < shape.size(); ++k) stride *= shape[k];
  for (std::size_t i = 0; i < shape.front(); ++i)
    out.push_back(nested(flat.subspan(i * stride, stride), shape.subspan(1)));
  return out;
}

Json nested(std::span<const double> flat, std::initializer_list<std::size_t> shape) {
  const std::vector<std::size_t> dims(shape);
  return nested(flat, std::span<const std::size_t>(dims));
}

}  // namespace

OdeSpec parse_spec_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed JSON: ") + e.what());
  }
  require_object(doc, "");
  reject_unknown(doc, "", {"dims", "weights", "c", "d", "u", "s"});

  const Json& dims_json = require_object(require(doc, "", "dims"), "/dims");
  reject_unknown(dims_json, "/dims", {"T", "V", "Q", "R", "T_init", "R_init"});
  Dimensions d;
  d.time_points = read_size(dims_json, "/dims", "T");
  d.variables = read_size(dims_json, "/dims", "V");
  d.equations = read_size(dims_json, "/dims", "Q");
  d.order = read_size(dims_json, "/dims", "R");
  d.init_time_points = read_size(dims_json, "/dims", "T_init");
  d.init_order = read_size(dims_json, "/dims", "R_init");
  if (d.time_points == 0) fail("/dims/T", "must be >= 1");

  OdeSpec spec;
  spec.dims = d;
  if (const auto it = doc.find("weights"); it != doc.end()) {
    const Json& w = require_object(*it, "/weights");
    reject_unknown(w, "/weights", {"gov", "init", "smooth"});
    if (w.contains("gov")) spec.weights.governing = read_number(w["gov"], "/weights/gov");
    if (w.contains("init")) spec.weights.initial = read_number(w["init"], "/weights/init");
    if (w.contains("smooth"))
      spec.weights.smoothness = read_number(w["smooth"], "/weights/smooth");
  }
  spec.coefficients = tensor(doc, "c", {d.time_points, d.equations, d.variables, d.orders()});
  spec.constants = tensor(doc, "d", {d.time_points, d.equations});
  spec.initial_values = tensor(doc, "u", {d.init_time_points, d.variables, d.init_orders()});
  spec.steps = tensor(doc, "s", {d.intervals()});
  validate_spec(spec);
  return spec;
}

OdeSpec read_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open spec file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec_json(buffer.str());
}

std::string spec_to_json(const OdeSpec& spec) {
  const Dimensions& d = spec.dims;
  Json doc;
  doc["dims"] = {{"T", d.time_points}, {"V", d.variables},        {"Q", d.equations},
                 {"R", d.order},       {"T_init", d.init_time_points}, {"R_init", d.init_order}};
  doc["weights"] = {{"gov", spec.weights.governing},
                    {"init", spec.weights.initial},
                    {"smooth", spec.weights.smoothness}};
  doc["c"] = nested(spec.coefficients, {d.time_points, d.equations, d.variables, d.orders()});
  doc["d"] = nested(spec.constants, {d.time_points, d.equations});
  doc["u"] = nested(spec.initial_values, {d.init_time_points, d.variables, d.init_orders()});
  doc["s"] = d.intervals() == 0 ? Json::array() : nested(spec.steps, {d.intervals()});
  return doc.dump(2);
}

void write_trajectory_csv(std::ostream& out, const OdeSpec& spec, const Solution& y) {
  const std::vector<double> times = time_grid(spec);
  const auto old_precision = out.precision(17);
  out << "t,time,var,order,value\n";
  for (std::size_t t = 0; t < spec.dims.time_points; ++t)
    for (std::size_t v = 0; v < spec.dims.variables; ++v)
      for (std::size_t r = 0; r < spec.dims.orders(); ++r)
        out << t << ',' << times[t] << ',' << v << ',' << r << ',' << y(t, v, r) << '\n';
  out.precision(old_precision);
}

}  // namespace mechband::cli
