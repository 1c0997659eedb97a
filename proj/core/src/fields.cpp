#include "nspf/fields.hpp"

#include <cmath>

#include "nspf/error.hpp"

namespace nspf {

void require_finite(const Field& f, const std::string& what) {
  for (int j = 0; j < f.height(); ++j) {
    for (int i = 0; i < f.width(); ++i) {
      if (!std::isfinite(f(i, j))) {
        throw NumericalError("non-finite " + what + " at pixel (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
      }
    }
  }
}

void require_finite(const FieldSet& fs) {
  require_finite(fs.u, "u");
  require_finite(fs.v, "v");
  require_finite(fs.p, "p");
}

}  // namespace nspf
