#pragma once

// JSON, CSV and DOT encodings of the library types. JSON numbers use the
// shortest representation that round-trips; CSV uses %.17g.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "flagdyn/frame.hpp"
#include "flagdyn/morse.hpp"
#include "flagdyn/skeleton.hpp"
#include "flagdyn/tree.hpp"

namespace flagdyn {

using Json = nlohmann::ordered_json;

std::string format_double(double v);  // %.17g, locale independent

Json to_json(const Frame& x);
Frame frame_from_json(const Json& j);

Json to_json(const Tree& t);
Tree tree_from_json(const Json& j);

Json to_json(const Perm& p);
Perm perm_from_json(const Json& j, int n, bool symplectic);

Json to_json(const SkeletonGraph& g);
SkeletonGraph graph_from_json(const Json& j);
std::string to_dot(const SkeletonGraph& g);

Json to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);
// perm,H,morse_index,expanding,ok
std::string certificate_csv(const Certificate& c);

Json audit_summary_json(const LyapunovReport& r);
// t,Q,grad_norm,field_norm
std::string audit_csv(const LyapunovReport& r);

}  // namespace flagdyn
