#pragma once

#include <cstddef>

namespace tracebench::detail {

struct EmbeddedPromptFile {
    const char* name;
    const char* text;
};

// Defined in the generated prompts_data.cpp (see scripts/embed_prompts.py).
extern const EmbeddedPromptFile kPromptFiles[];
extern const std::size_t kPromptFileCount;

}  // namespace tracebench::detail
