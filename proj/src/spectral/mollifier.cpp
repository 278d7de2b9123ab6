#include "anderson_lab/spectral/mollifier.hpp"

#include <sstream>

namespace anderson_lab::spectral {

Mollifier Mollifier::squared() const {
  if (kind_ == MollifierKind::gaussian) return Mollifier(epsilon_ * std::sqrt(2.0), kind_);
  return *this;  // indicator functions are idempotent
}

std::string Mollifier::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(eps=" << epsilon_ << ")";
  return os.str();
}

SpectralField mollify(const SpectralField& f, const Mollifier& m) {
  return f.multiplied([&m](Wavevector k) { return m(k); });
}

MollifierKind parse_mollifier_kind(const std::string& name) {
  if (name == "gaussian") return MollifierKind::gaussian;
  if (name == "sharp" || name == "sharp_cutoff") return MollifierKind::sharp_cutoff;
  throw std::invalid_argument("unknown mollifier kind '" + name + "'");
}

std::string to_string(MollifierKind kind) {
  return kind == MollifierKind::gaussian ? "gaussian" : "sharp_cutoff";
}

}  // namespace anderson_lab::spectral
