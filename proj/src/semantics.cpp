#include "uller/semantics.hpp"

#include <cmath>
#include <string>

namespace uller {

double apply_loss(LossTransform t, double truth, std::string_view what) {
  switch (t) {
    case LossTransform::Neg:
      return -truth;
    case LossTransform::NegLog:
      if (!(truth > 0.0)) {
        throw Error(ErrorKind::ZeroProbability,
                    "-log of zero truth value for " + std::string(what));
      }
      return -std::log(truth);
  }
  return 0.0;
}

}  // namespace uller
