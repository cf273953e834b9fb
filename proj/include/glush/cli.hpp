#ifndef glush_cli_hpp
#define glush_cli_hpp

#include <iostream>
#include <string>
#include <vector>

namespace glush {

// Entry point shared by the binary and the tests. Exit codes: 0 success
// (match accepted / engines agree), 1 reject/disagree, 2 usage or syntax
// errors (reported on `err`).
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err);

} // namespace glush

#endif
