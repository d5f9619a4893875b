#include "zinf/version.hpp"

namespace zinf {

std::string_view version() noexcept { return ZINF_VERSION; }

}  // namespace zinf
