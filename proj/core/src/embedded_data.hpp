#pragma once

#include <string_view>

namespace greybox::detail {

std::string_view default_template_json();
std::string_view default_rules_json();
std::string_view qrak_hints_json();

}  // namespace greybox::detail
