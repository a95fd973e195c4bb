#pragma once

// Reference implementations used only by tests. They work from the printed
// query text or with plain loops and share no code with the library.

#include <string>
#include <vector>

namespace t2s::testing {

// Skeleton read straight off a normalized query: clause keywords at
// parenthesis depth 0 are kept, every other run of tokens becomes `_`, and a
// repeated sort direction inside one order by is written once.
std::string skeleton_oracle(const std::string& normalized);

// Identifiers introduced by `as` in the source text.
std::vector<std::string> as_bound_names(const std::string& sql);

// Whitespace-separated words of a printed query.
std::vector<std::string> words(const std::string& text);

}  // namespace t2s::testing
