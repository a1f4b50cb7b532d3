#pragma once

#include <string>
#include <string_view>

namespace refwhy::util {

std::string sha256_hex(std::string_view data);

}  // namespace refwhy::util
