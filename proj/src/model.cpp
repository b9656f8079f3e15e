#include "mhdcm/model.hpp"

#include "mhdcm/errors.hpp"

namespace mhdcm {

const char* method_name(Method method) {
  return method == Method::dccm ? "dccm" : "dnccm";
}

Method method_from_name(const std::string& name) {
  if (name == "dccm") return Method::dccm;
  if (name == "dnccm") return Method::dnccm;
  throw ConfigError("unknown method '" + name + "' (expected dccm or dnccm)");
}

}  // namespace mhdcm
