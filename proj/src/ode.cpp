#include "lir/ode.hpp"

#include <sstream>

namespace lir::detail {

void throw_blowup(double t, std::size_t step) {
    std::ostringstream msg;
    msg << "integration blew up (non-finite state) at t = " << t << ", step " << step;
    throw BlowupError(msg.str());
}

}  // namespace lir::detail
