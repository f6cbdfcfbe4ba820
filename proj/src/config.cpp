#include "ophydro/config.hpp"

namespace ophydro {

const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace ophydro
