#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "graph_of_groups.hpp"
#include "group.hpp"

namespace morse_atlas {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// 64-bit FNV-1a, as 16 lowercase hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Compact dump with sorted keys; the byte form used for hashing.
inline std::string canonical(const Json& j) { return j.dump(); }

/// Parses JSON text; syntax errors report line and column.
inline Json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    int line = 1, col = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    auto cut = what.find("; last read");
    auto start = what.find("syntax error");
    std::string brief = start == std::string::npos ? what : what.substr(start, cut == std::string::npos ? cut : cut - start);
    throw Error(ErrorCode::ParseError,
                origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + brief);
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::ParseError, where + ": " + why);
}

inline const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) schema_fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(where, "missing field '" + key + "'");
  return *it;
}

template <class T>
T get_as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    schema_fail(where, "wrong type (" + std::string(j.type_name()) + ")");
  }
}

inline int get_int(const Json& j, const std::string& key, const std::string& where) {
  return get_as<int>(field(j, key, where), where + "/" + key);
}

}  // namespace detail

inline void check_header(const Json& j, const std::string& kind, const std::string& where = "input") {
  int v = detail::get_int(j, "schema_version", where);
  if (v != kSchemaVersion) detail::schema_fail(where, "unsupported schema_version " + std::to_string(v));
  auto k = detail::get_as<std::string>(detail::field(j, "kind", where), where + "/kind");
  if (k != kind) detail::schema_fail(where, "expected kind '" + kind + "', got '" + k + "'");
}

inline std::vector<std::string> word_strings(const std::vector<Word>& ws, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const Word& w : ws) out.push_back(format_word(w, names));
  return out;
}

inline Json descriptor_to_json(const GroupDescriptor& d) {
  Json j;
  j["tag"] = std::string(tag_name(d.tag));
  Json params = Json::object();
  switch (d.tag) {
    case GroupTag::FiniteCyclic: params["order"] = d.param; break;
    case GroupTag::ZPow:
    case GroupTag::Free: params["rank"] = d.param; break;
    case GroupTag::Presentation: {
      params["relators"] = word_strings(d.relators, d.generators);
      params["complete"] = d.complete;
      if (!d.rules.empty()) {
        Json rules = Json::array();
        for (const Rule& r : d.rules)
          rules.push_back({format_word(r.lhs, d.generators), format_word(r.rhs, d.generators)});
        params["rules"] = rules;
      }
      break;
    }
    case GroupTag::FreeProduct:
    case GroupTag::DirectProduct: {
      Json fs = Json::array();
      for (const auto& f : d.factors) fs.push_back(descriptor_to_json(f));
      params["factors"] = fs;
      break;
    }
    default: break;
  }
  if (!params.empty()) j["params"] = params;
  j["generators"] = d.generators;
  return j;
}

inline GroupDescriptor descriptor_from_json(const Json& j, const std::string& where = "group") {
  using detail::field;
  using detail::get_as;
  auto tag_text = get_as<std::string>(field(j, "tag", where), where + "/tag");
  GroupTag tag;
  try {
    tag = parse_tag(tag_text);
  } catch (const Error&) {
    detail::schema_fail(where + "/tag", "unknown tag '" + tag_text + "'");
  }
  const Json empty = Json::object();
  const Json& params = j.contains("params") ? j.at("params") : empty;
  std::string pw = where + "/params";
  GroupDescriptor d;
  try {
    switch (tag) {
      case GroupTag::Trivial: d = GroupDescriptor::trivial(); break;
      case GroupTag::FiniteCyclic: d = GroupDescriptor::cyclic(detail::get_int(params, "order", pw)); break;
      case GroupTag::Z: d = GroupDescriptor::integers(); break;
      case GroupTag::ZPow: d = GroupDescriptor::zpow(detail::get_int(params, "rank", pw)); break;
      case GroupTag::Free: d = GroupDescriptor::free(detail::get_int(params, "rank", pw)); break;
      case GroupTag::Presentation: {
        auto gens = get_as<std::vector<std::string>>(field(j, "generators", where), where + "/generators");
        std::vector<Word> rels;
        if (params.contains("relators"))
          for (const auto& r : get_as<std::vector<std::string>>(params.at("relators"), pw + "/relators"))
            rels.push_back(parse_word(r, gens));
        bool complete = params.contains("complete") ? get_as<bool>(params.at("complete"), pw + "/complete") : true;
        d = GroupDescriptor::presentation(gens, rels, complete);
        if (params.contains("rules"))
          for (const auto& r : params.at("rules")) {
            auto pair = get_as<std::vector<std::string>>(r, pw + "/rules");
            if (pair.size() != 2) detail::schema_fail(pw + "/rules", "each rule is [lhs, rhs]");
            d.rules.push_back({parse_word(pair[0], gens), parse_word(pair[1], gens)});
          }
        return d;
      }
      case GroupTag::FreeProduct:
      case GroupTag::DirectProduct: {
        std::vector<GroupDescriptor> fs;
        const Json& arr = field(params, "factors", pw);
        for (size_t i = 0; i < arr.size(); ++i)
          fs.push_back(descriptor_from_json(arr[i], pw + "/factors/" + std::to_string(i)));
        d = GroupDescriptor::product(tag, std::move(fs));
        break;
      }
      default: d = GroupDescriptor::symbolic(tag); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    detail::schema_fail(where, e.what());
  }
  if (j.contains("generators")) {
    auto gens = get_as<std::vector<std::string>>(j.at("generators"), where + "/generators");
    if (d.complete && static_cast<int>(gens.size()) != d.generator_count())
      detail::schema_fail(where + "/generators", "expected " + std::to_string(d.generator_count()) + " names");
    d.generators = gens;
  }
  return d;
}

/// Document form; hosts are written only where they differ from the
/// endpoint vertex group.
inline Json gog_to_json(const GraphOfGroups& gog) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "graph_of_groups";
  Json vs = Json::array();
  for (VertexId v = 0; v < gog.vertex_count(); ++v)
    vs.push_back({{"name", gog.vertex_name[v]}, {"group", descriptor_to_json(gog.vertex_group[v])}});
  j["vertices"] = vs;
  Json es = Json::array();
  const Graph& g = gog.graph;
  for (EdgeId e = 0; e < g.edge_count(); e += 2) {
    VertexId s = g.source(e), t = g.target(e);
    const auto& h = gog.edge_group_of(e);
    Json ej;
    ej["source"] = gog.vertex_name[s];
    ej["target"] = gog.vertex_name[t];
    ej["group"] = descriptor_to_json(h);
    ej["into_source"] = word_strings(gog.injection[e ^ 1], gog.vertex_group[s].generators);
    ej["into_target"] = word_strings(gog.injection[e], gog.vertex_group[t].generators);
    if (!(gog.host[e ^ 1] == gog.vertex_group[s])) ej["source_host"] = descriptor_to_json(gog.host[e ^ 1]);
    if (!(gog.host[e] == gog.vertex_group[t])) ej["target_host"] = descriptor_to_json(gog.host[e]);
    es.push_back(ej);
  }
  j["edges"] = es;
  return j;
}

inline std::string gog_hash(const GraphOfGroups& gog) { return fnv1a_hex(canonical(gog_to_json(gog))); }

inline GraphOfGroups gog_from_json(const Json& j, const std::string& where = "input") {
  using detail::field;
  using detail::get_as;
  check_header(j, "graph_of_groups", where);
  GraphOfGroups gog;
  std::map<std::string, VertexId> by_name;
  const Json& vs = field(j, "vertices", where);
  if (!vs.is_array() || vs.empty()) detail::schema_fail(where + "/vertices", "expected a nonempty array");
  for (size_t i = 0; i < vs.size(); ++i) {
    std::string w = where + "/vertices/" + std::to_string(i);
    std::string name = vs[i].contains("name") ? get_as<std::string>(vs[i].at("name"), w + "/name")
                                              : "v" + std::to_string(i);
    if (by_name.count(name)) detail::schema_fail(w, "duplicate vertex name '" + name + "'");
    by_name[name] = gog.add_vertex(descriptor_from_json(field(vs[i], "group", w), w + "/group"), name);
  }
  auto vertex_ref = [&](const Json& r, const std::string& w) -> VertexId {
    if (r.is_number_integer()) {
      int v = r.get<int>();
      if (v < 0 || v >= gog.vertex_count()) detail::schema_fail(w, "vertex index out of range");
      return v;
    }
    auto name = get_as<std::string>(r, w);
    auto it = by_name.find(name);
    if (it == by_name.end()) detail::schema_fail(w, "unknown vertex '" + name + "'");
    return it->second;
  };
  if (j.contains("edges")) {
    const Json& es = j.at("edges");
    for (size_t i = 0; i < es.size(); ++i) {
      std::string w = where + "/edges/" + std::to_string(i);
      VertexId s = vertex_ref(field(es[i], "source", w), w + "/source");
      VertexId t = vertex_ref(field(es[i], "target", w), w + "/target");
      auto h = es[i].contains("group") ? descriptor_from_json(es[i].at("group"), w + "/group")
                                       : GroupDescriptor::trivial();
      auto words = [&](const char* key) {
        return es[i].contains(key) ? get_as<std::vector<std::string>>(es[i].at(key), w + "/" + key)
                                   : std::vector<std::string>{};
      };
      EdgeId e;
      try {
        e = gog.add_edge_named(s, t, h, words("into_source"), words("into_target"));
      } catch (const Error& err) {
        detail::schema_fail(w, err.what());
      }
      if (es[i].contains("source_host")) gog.host[e ^ 1] = descriptor_from_json(es[i].at("source_host"), w + "/source_host");
      if (es[i].contains("target_host")) gog.host[e] = descriptor_from_json(es[i].at("target_host"), w + "/target_host");
    }
  }
  try {
    gog.validate();
  } catch (const Error& err) {
    if (err.code() == ErrorCode::DisconnectedGraph) throw;
    detail::schema_fail(where, err.what());
  }
  return gog;
}

/// Vertex list by names or indices.
inline std::vector<VertexId> vertex_set_from_json(const GraphOfGroups& gog, const Json& arr,
                                                  const std::string& where) {
  std::vector<VertexId> out;
  if (!arr.is_array()) detail::schema_fail(where, "expected an array");
  for (const auto& r : arr) {
    if (r.is_number_integer()) {
      out.push_back(r.get<int>());
      if (out.back() < 0 || out.back() >= gog.vertex_count()) detail::schema_fail(where, "vertex index out of range");
      continue;
    }
    auto name = detail::get_as<std::string>(r, where);
    auto it = std::find(gog.vertex_name.begin(), gog.vertex_name.end(), name);
    if (it == gog.vertex_name.end()) detail::schema_fail(where, "unknown vertex '" + name + "'");
    out.push_back(static_cast<VertexId>(it - gog.vertex_name.begin()));
  }
  return out;
}

}  // namespace morse_atlas
