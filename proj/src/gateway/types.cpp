#include "theorygen/gateway/types.hpp"

#include <cstdio>

#include "theorygen/core/digest.hpp"
#include "theorygen/core/errors.hpp"

namespace theorygen {

void ChatRequest::validate() const {
    if (prompt_asset_id.empty()) throw ValidationError("chat request needs a prompt asset id");
    if (temperature < 0.0 || temperature > 2.0) {
        throw ValidationError("temperature must lie in [0, 2]");
    }
    if (max_output_tokens <= 0) throw ValidationError("max_output_tokens must be positive");
}

std::string ChatRequest::digest() const {
    json vars = json::object();
    for (const auto& [k, v] : variables) vars[k] = v;
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.4f", temperature);
    std::string key = prompt_asset_id + "\n" + canonical_dump(vars) + "\n" + temp + "\n" +
                      (response_contract == ResponseContract::structured ? "structured" : "free_text");
    return sha256_hex(key);
}

}  // namespace theorygen
