// JSON forms of the wire types.
//
//   vector : [{"i": 1, "v": 3.0}, ...]
//   space  : {"type":"lp","p":2} | {"type":"lp","p":"inf"}
//            {"type":"tsirelson","rule":"min-after-n","growth":"power","support_cap":12}
//            {"type":"convexify","base":{...},"p":2}
//            {"type":"interpolate","Y":{...},"Z":{...},"theta":0.5}
//            {"type":"dual","base":{...}}
//            {"type":"direct_sum","outer":{...},"parts":[{"lo":1,"hi":8,"space":{...}}]}
//
// Parsing is strict: unknown keys are rejected.
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "latlab/core.hpp"
#include "latlab/space.hpp"

namespace latlab {

using Json = nlohmann::json;

namespace detail {
inline void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || (it.key() == k);
    if (!ok) throw std::invalid_argument(what + ": unknown key '" + it.key() + "'");
  }
}
}  // namespace detail

inline Json to_json(const FiniteVector& v) {
  Json arr = Json::array();
  for (const Entry& e : v.entries()) arr.push_back({{"i", e.index}, {"v", e.value}});
  return arr;
}

inline FiniteVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector: expected an array of {i, v}");
  std::vector<Entry> es;
  for (const Json& item : j) {
    if (!item.is_object()) throw std::invalid_argument("vector: expected objects {i, v}");
    detail::check_keys(item, {"i", "v"}, "vector entry");
    es.push_back({item.at("i").get<Index>(), item.at("v").get<double>()});
  }
  return FiniteVector::from_entries(std::move(es));
}

inline Json to_json(const Space& s) {
  const SpaceNode& n = s.node();
  switch (n.kind) {
    case SpaceKind::lp: {
      Json j{{"type", "lp"}};
      if (std::isinf(n.p)) j["p"] = "inf";
      else j["p"] = n.p;
      return j;
    }
    case SpaceKind::tsirelson:
      return Json{{"type", "tsirelson"},
                  {"rule", to_string(n.ts.rule)},
                  {"growth", to_string(n.ts.growth)},
                  {"support_cap", n.ts.support_cap}};
    case SpaceKind::convexify:
      return Json{{"type", "convexify"}, {"base", to_json(n.a)}, {"p", n.p}};
    case SpaceKind::interpolate:
      return Json{{"type", "interpolate"},
                  {"Y", to_json(n.a)},
                  {"Z", to_json(n.b)},
                  {"theta", n.theta}};
    case SpaceKind::dual:
      return Json{{"type", "dual"}, {"base", to_json(n.a)}};
    case SpaceKind::direct_sum: {
      Json parts = Json::array();
      for (const auto& part : n.parts)
        parts.push_back(Json{{"lo", part.lo}, {"hi", part.hi}, {"space", to_json(part.space)}});
      return Json{{"type", "direct_sum"}, {"outer", to_json(n.outer)}, {"parts", parts}};
    }
  }
  throw std::logic_error("to_json: unreachable");
}

inline Space space_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw std::invalid_argument("space: expected an object with a 'type' key");
  const std::string type = j.at("type").get<std::string>();
  if (type == "lp") {
    detail::check_keys(j, {"type", "p"}, "lp space");
    const Json& p = j.at("p");
    if (p.is_string()) {
      if (p.get<std::string>() != "inf")
        throw std::invalid_argument("lp space: p must be a number or \"inf\"");
      return Space::lp_inf();
    }
    return Space::lp(p.get<double>());
  }
  if (type == "tsirelson") {
    detail::check_keys(j, {"type", "rule", "growth", "support_cap"}, "tsirelson space");
    TsirelsonOptions opts;
    if (j.contains("rule")) {
      const std::string r = j.at("rule").get<std::string>();
      if (r == "min-after-n") opts.rule = AdmissibilityRule::min_after_n;
      else if (r == "per-index") opts.rule = AdmissibilityRule::per_index;
      else throw std::invalid_argument("tsirelson space: unknown rule '" + r + "'");
    }
    if (j.contains("growth")) {
      const std::string g = j.at("growth").get<std::string>();
      if (g == "power") opts.growth = GrowthKind::power;
      else if (g == "linear") opts.growth = GrowthKind::linear;
      else throw std::invalid_argument("tsirelson space: unknown growth '" + g + "'");
    }
    if (j.contains("support_cap")) opts.support_cap = j.at("support_cap").get<int>();
    return Space::tsirelson(opts);
  }
  if (type == "convexify") {
    detail::check_keys(j, {"type", "base", "p"}, "convexify space");
    const double p = j.at("p").get<double>();
    Space base = space_from_json(j.at("base"));
    return p >= 1.0 ? Space::convexify(base, p) : Space::concavify(base, p);
  }
  if (type == "interpolate") {
    detail::check_keys(j, {"type", "Y", "Z", "theta"}, "interpolate space");
    return Space::interpolate(space_from_json(j.at("Y")), space_from_json(j.at("Z")),
                              j.at("theta").get<double>());
  }
  if (type == "dual") {
    detail::check_keys(j, {"type", "base"}, "dual space");
    return Space::dual_of(space_from_json(j.at("base")));
  }
  if (type == "direct_sum") {
    detail::check_keys(j, {"type", "outer", "parts"}, "direct_sum space");
    std::vector<SpacePart> parts;
    for (const Json& pj : j.at("parts")) {
      detail::check_keys(pj, {"lo", "hi", "space"}, "direct_sum part");
      parts.push_back(SpacePart{pj.at("lo").get<Index>(), pj.at("hi").get<Index>(),
                                space_from_json(pj.at("space"))});
    }
    return Space::direct_sum(std::move(parts), space_from_json(j.at("outer")));
  }
  throw std::invalid_argument("space: unknown type '" + type + "'");
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  Json j;
  in >> j;
  return j;
}

inline FiniteVector load_vector(const std::string& path) {
  return vector_from_json(load_json_file(path));
}
inline Space load_space(const std::string& path) { return space_from_json(load_json_file(path)); }

}  // namespace latlab
