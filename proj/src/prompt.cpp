#include "sentinel/prompt.hpp"

#include <array>

namespace sentinel {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string prompt_hash(const PromptBundle& prompt) {
    std::string material;
    material.reserve(prompt.system_prompt.size() + prompt.user_prompt.size() +
                     (prompt.external_data ? prompt.external_data->size() : 0) +
                     2);
    material += prompt.system_prompt;
    material += '\x1f';
    material += prompt.user_prompt;
    material += '\x1f';
    if (prompt.external_data.has_value()) {
        material += *prompt.external_data;
    }

    std::uint64_t hash = fnv1a64(material);
    static constexpr char kHex[] = "0123456789abcdef";
    std::array<char, 16> digits{};
    for (int i = 15; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
        hash >>= 4;
    }
    return std::string(digits.data(), digits.size());
}

}  // namespace sentinel
