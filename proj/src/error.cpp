#include "levy/error.hpp"

namespace levy {

void fail_parameter(const std::string& message) { throw ParameterError(message); }

}  // namespace levy
