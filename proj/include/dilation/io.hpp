// io.hpp: JSON wire formats for matrices, index elements and bundles

#pragma once

#include "dilation/ando.hpp"
#include "dilation/index.hpp"
#include "dilation/matcore.hpp"
#include "dilation/regular.hpp"

#include <json.hpp>

#include <string>

namespace dilation::io {

using nlohmann::json;

// {"rows": R, "cols": C, "data": [[re, im], ...]} in row-major order.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// {"omega": k, "coords": {"j": "p/q", ...}} with zero coordinates omitted.
json index_to_json(const IndexElement& e);
IndexElement index_from_json(const json& j);

json bundle_to_json(const ando::DilationBundle& b);
ando::DilationBundle bundle_from_json(const json& j);

json block_report_to_json(const ando::BlockReport& r);

json naimark_to_json(const regular::NaimarkBundle& b);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dilation::io
