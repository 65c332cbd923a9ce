#!/usr/bin/env python3
"""Embed the prompt template files into a generated C++ translation unit.

The .prompt files under data/prompts/ are the canonical, diffable source of
every template; this script bakes their exact bytes into the library so the
binaries need no runtime data directory.
"""

import argparse
import pathlib
import sys

DELIM = "tbprompt"


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("files", nargs="+")
    args = parser.parse_args()

    entries = []
    for path in sorted(args.files):
        p = pathlib.Path(path)
        text = p.read_text(encoding="utf-8")
        if f"){DELIM}\"" in text:
            sys.exit(f"{p}: body collides with the raw string delimiter")
        entries.append((p.name, text))

    lines = [
        "// Generated by scripts/embed_prompts.py from data/prompts/. Do not edit.",
        '#include "core/prompts_data.hpp"',
        "",
        "namespace tracebench::detail {",
        "",
        "const EmbeddedPromptFile kPromptFiles[] = {",
    ]
    for name, text in entries:
        lines.append(f'    {{"{name}", R"{DELIM}({text}){DELIM}"}},')
    lines += [
        "};",
        "",
        f"const std::size_t kPromptFileCount = {len(entries)};",
        "",
        "}  // namespace tracebench::detail",
    ]
    pathlib.Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
