#include "hardynorm/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace hardynorm::io {

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return nullptr;
  return round12(x);
}

namespace {

double read_number(const Json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw DomainError(std::string("field '") + key + "' is not a number");
  }
  if (!v.is_number()) throw DomainError(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::vector<double> read_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DomainError(std::string("missing array '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw DomainError(std::string("array '") + key + "' holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

Json number_array(const std::vector<double>& xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(number(x));
  return arr;
}

}  // namespace

Json to_json(const PiecewisePowerFn& f) {
  Json pieces = Json::array();
  for (const auto& piece : f.pieces()) {
    pieces.push_back({{"coeff_re", number(piece.coeff.real())},
                      {"coeff_im", number(piece.coeff.imag())},
                      {"exponent", number(piece.exponent)},
                      {"lo", number(piece.lo)},
                      {"hi", number(piece.hi)}});
  }
  return {{"pieces", pieces}};
}

PiecewisePowerFn piecewise_from_json(const Json& j) {
  if (!j.contains("pieces") || !j.at("pieces").is_array()) {
    throw DomainError("missing array 'pieces'");
  }
  std::vector<PowerPiece> pieces;
  for (const auto& pj : j.at("pieces")) {
    const double im = pj.contains("coeff_im") ? read_number(pj, "coeff_im") : 0.0;
    pieces.push_back({Complex{read_number(pj, "coeff_re"), im},
                      read_number(pj, "exponent"), read_number(pj, "lo"),
                      read_number(pj, "hi")});
  }
  return PiecewisePowerFn(pieces);
}

Json to_json(const SampledFn& f) {
  std::vector<double> re, im;
  for (const auto& v : f.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {{"grid", number_array(f.grid)},
          {"values_re", number_array(re)},
          {"values_im", number_array(im)}};
}

SampledFn sampled_from_json(const Json& j) {
  SampledFn f;
  f.grid = read_array(j, "grid");
  const auto re = read_array(j, "values_re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("values_im")) im = read_array(j, "values_im");
  if (re.size() != im.size()) throw DomainError("values_re and values_im differ in length");
  for (std::size_t i = 0; i < re.size(); ++i) f.values.emplace_back(re[i], im[i]);
  f.validate();
  return f;
}

Json to_json(const ViolationReport& r) {
  Json j{{"passed", r.passed}, {"max_violation", number(r.max_violation)}};
  j["witness_x"] = r.witness ? number((*r.witness)[0]) : Json(nullptr);
  j["witness_y"] = r.witness ? number((*r.witness)[1]) : Json(nullptr);
  j["points_checked"] = r.points_checked;
  return j;
}

ViolationReport report_from_json(const Json& j) {
  ViolationReport r{read_number(j, "max_violation"), std::nullopt,
                    j.at("points_checked").get<long>(), j.at("passed").get<bool>()};
  if (!j.at("witness_x").is_null()) {
    r.witness = std::array<double, 2>{read_number(j, "witness_x"), read_number(j, "witness_y")};
  }
  return r;
}

Json to_json(const MartingaleNode& node) {
  Json children = Json::array();
  for (const auto& child : node.children) children.push_back(to_json(child));
  return {{"value", number(node.value)}, {"prob", number(node.prob)}, {"children", children}};
}

MartingaleNode node_from_json(const Json& j) {
  MartingaleNode node{read_number(j, "value"), read_number(j, "prob"), {}};
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) node.children.push_back(node_from_json(c));
  }
  return node;
}

SimpleMartingale tree_from_json(const Json& j) {
  SimpleMartingale sm{node_from_json(j), 0};
  std::function<int(const MartingaleNode&)> height = [&](const MartingaleNode& n) {
    int h = 0;
    for (const auto& c : n.children) h = std::max(h, 1 + height(c));
    return h;
  };
  sm.depth = height(sm.root);
  return sm;
}

Json to_json(const ConstantResult& r) {
  Json j{{"C_pow_p", number(r.c_pow_p)},
         {"C", number(r.c)},
         {"branch", std::string(to_string(r.branch))}};
  if (r.argmax) j["argmax"] = {number((*r.argmax)[0]), number((*r.argmax)[1])};
  if (r.alpha_p) j["alpha_p"] = number(*r.alpha_p);
  j["boundary_value"] = number(r.boundary_value);
  j["converged"] = r.converged;
  return j;
}

bool is_piecewise(const Json& j) {
  if (j.is_object() && j.contains("pieces")) return true;
  if (j.is_object() && j.contains("grid")) return false;
  throw DomainError("expected a document with 'pieces' or 'grid'");
}

}  // namespace hardynorm::io
