#pragma once

#include <string_view>

namespace zinf {

std::string_view version() noexcept;

}  // namespace zinf
