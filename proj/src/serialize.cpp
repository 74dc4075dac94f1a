#include <fstream>
#include <sstream>

#include "euaf/network.hpp"
#include "json.hpp"

namespace euaf {

using nlohmann::json;

std::string serialize(const Network& net) {
  net.validate();
  json doc;
  doc["input_dim"] = net.input_dim;
  if (net.domain) {
    doc["domain"] = {{"lo", net.domain->lo}, {"hi", net.domain->hi}};
  } else {
    doc["domain"] = nullptr;
  }
  doc["layers"] = json::array();
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const AffineLayer& L = net.layers[i];
    json jl;
    json rows = json::array();
    for (std::size_t r = 0; r < L.out_dim; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < L.in_dim; ++c) row.push_back(L.w(r, c));
      rows.push_back(std::move(row));
    }
    jl["weights"] = std::move(rows);
    jl["bias"] = L.bias;
    if (i + 1 < net.layers.size()) {
      json acts = json::array();
      for (const auto& t : net.hidden_activations[i]) acts.push_back(to_string(t));
      jl["activations"] = std::move(acts);
    } else {
      jl["activations"] = nullptr;
    }
    doc["layers"].push_back(std::move(jl));
  }
  return doc.dump(2);
}

Network deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("network JSON parse error: ") + e.what());
  }
  Network net;
  try {
    net.input_dim = doc.at("input_dim").get<std::size_t>();
    if (!doc.at("domain").is_null()) {
      Hypercube box;
      box.lo = doc["domain"].at("lo").get<std::vector<double>>();
      box.hi = doc["domain"].at("hi").get<std::vector<double>>();
      net.domain = std::move(box);
    }
    const json& jlayers = doc.at("layers");
    for (std::size_t i = 0; i < jlayers.size(); ++i) {
      const json& jl = jlayers[i];
      const json& rows = jl.at("weights");
      const std::size_t out_dim = rows.size();
      const std::size_t in_dim = out_dim == 0 ? 0 : rows[0].size();
      AffineLayer L(out_dim, in_dim);
      for (std::size_t r = 0; r < out_dim; ++r) {
        if (rows[r].size() != in_dim) {
          std::ostringstream os;
          os << "layer " << i << ": ragged weight rows";
          throw validation_error(os.str());
        }
        for (std::size_t c = 0; c < in_dim; ++c) L.w(r, c) = rows[r][c].get<double>();
      }
      L.bias = jl.at("bias").get<std::vector<double>>();
      if (L.bias.size() != out_dim) {
        std::ostringstream os;
        os << "layer " << i << ": bias length " << L.bias.size() << " != rows " << out_dim;
        throw validation_error(os.str());
      }
      net.layers.push_back(std::move(L));
      if (i + 1 < jlayers.size()) {
        std::vector<ActivationKind> tags;
        for (const auto& s : jl.at("activations"))
          tags.push_back(activation_from_string(s.get<std::string>()));
        net.hidden_activations.push_back(std::move(tags));
      } else if (!jl.at("activations").is_null()) {
        throw validation_error("final layer must have null activations");
      }
    }
  } catch (const json::exception& e) {
    throw validation_error(std::string("network JSON field error: ") + e.what());
  }
  net.validate();
  return net;
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream ofs(path);
  if (!ofs) throw validation_error("cannot open for writing: " + path);
  ofs << serialize(net) << "\n";
}

Network load_network(const std::string& path) {
  std::ifstream ifs(path);
  if (!ifs) throw validation_error("cannot open for reading: " + path);
  std::stringstream ss;
  ss << ifs.rdbuf();
  return deserialize(ss.str());
}

}  // namespace euaf
