#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace sentinel {

/// The three prompt segments, concatenated system + user + external when
/// presented to a model.
struct PromptBundle {
    std::string system_prompt;
    std::string user_prompt;
    std::optional<std::string> external_data;
};

/// FNV-1a 64-bit over a byte string, exposed for reuse in tests.
std::uint64_t fnv1a64(std::string_view bytes);

/// Content hash keying trace records: FNV-1a 64 over
/// system \x1f user \x1f external (absent external hashes as empty),
/// rendered as 16 lowercase hex digits.
std::string prompt_hash(const PromptBundle& prompt);

}  // namespace sentinel
