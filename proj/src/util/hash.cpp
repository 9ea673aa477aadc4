#include "pragmarank/util/hash.hpp"

#include <fstream>
#include <sstream>

#include "pragmarank/errors.hpp"

namespace prk {

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::uint64_t h = fnv1a(buf.str());
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace prk
