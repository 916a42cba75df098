#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "slackcme/network.hpp"

namespace test {

inline std::string model_path(const std::string& name) {
  return std::string(SLACKCME_MODELS_DIR) + "/" + name;
}

inline slackcme::ReactionNetwork load_model(const std::string& name) {
  std::ifstream in(model_path(name));
  std::ostringstream s;
  s << in.rdbuf();
  return slackcme::parse_network(s.str());
}

}  // namespace test
