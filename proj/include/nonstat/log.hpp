#pragma once

#include <functional>
#include <string>

namespace nonstat {

using WarningSink = std::function<void(const std::string&)>;

/// Replace the warning sink (stderr by default). Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace nonstat
