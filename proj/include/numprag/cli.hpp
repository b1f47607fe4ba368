#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "numprag/errors.hpp"

namespace numprag {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kData = 3;
inline constexpr int kInference = 4;
inline constexpr int kElicitation = 5;
inline constexpr int kIo = 6;
}  // namespace exit_code

int exit_code_for(ErrorClass cls);

/// Entry point of the numprag tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace numprag
