#include "phibvp/error.hpp"

#include <sstream>

namespace phibvp {

namespace {

std::string image_message(double y, double lo, double hi) {
    std::ostringstream os;
    os.precision(17);
    os << "value " << y << " outside branch image (" << lo << ", " << hi << ")";
    return os.str();
}

std::string located(const std::string& msg, int line, int column) {
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": " << msg;
    return os.str();
}

} // namespace

ImageDomainError::ImageDomainError(double y, double lo, double hi)
    : Error(image_message(y, lo, hi)), y_(y), lo_(lo), hi_(hi) {}

RhsEvaluationError::RhsEvaluationError(std::size_t node, const std::string& what)
    : Error("right-hand side non-finite at node " + std::to_string(node) + ": " + what),
      node_(node) {}

ParseError::ParseError(const std::string& msg, int line, int column)
    : Error(located(msg, line, column)), message_(msg), line_(line), column_(column) {}

} // namespace phibvp
