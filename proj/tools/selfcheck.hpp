// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_TOOLS_SELFCHECK_HPP_
#define XRNOMA_TOOLS_SELFCHECK_HPP_

#include <iosfwd>

namespace xrnoma::tools {

// Quick oracle and property checks; prints one line per check and returns
// the number of failures.
int run_selfcheck(std::ostream& out);

}  // namespace xrnoma::tools

#endif  // XRNOMA_TOOLS_SELFCHECK_HPP_
