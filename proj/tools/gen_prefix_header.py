#!/usr/bin/env python3
"""Regenerates include/forge/prefix_data.hpp from data/nonbreaking_prefixes/."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
src = root / "data" / "nonbreaking_prefixes"
out = root / "include" / "forge" / "prefix_data.hpp"

parts = [
    "#pragma once\n",
    "\n",
    "// Generated by tools/gen_prefix_header.py from data/nonbreaking_prefixes/. Do not edit.\n",
    "\n",
    "namespace forge::prefix_data {\n",
]
for name, ident in (("nonbreaking_prefix.en", "kEnglish"), ("nonbreaking_prefix.indic", "kIndic")):
    text = (src / name).read_text(encoding="utf-8")
    parts.append(f'\ninline constexpr const char* {ident} = R"PFX({text})PFX";\n')
parts.append("\n}  // namespace forge::prefix_data\n")
out.write_text("".join(parts), encoding="utf-8")
