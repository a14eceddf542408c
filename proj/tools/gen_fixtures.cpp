/*
 * Copyright 2026 The StopLens Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Writes the synthetic JSONL corpora used by the tests and the pilots.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "stoplens/synth.hpp"

namespace {

void write(const std::filesystem::path& path, const stoplens::synth::PlantedSpec& spec) {
  const auto pc = stoplens::synth::generate(spec);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  stoplens::synth::write_jsonl(out, pc.docs);
  std::cout << path.string() << ": " << pc.docs.size() << " documents\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic planted-topic corpora"};
  std::filesystem::path dir = "data/fixtures";
  app.add_option("--out", dir, "output directory");
  CLI11_PARSE(app, argc, argv);
  try {
    std::filesystem::create_directories(dir);
    write(dir / "planted_2000.jsonl", stoplens::synth::planted_default());
    write(dir / "small_200.jsonl", stoplens::synth::planted_small());
    for (const char* style : {"academic", "news", "dialogue"}) {
      write(dir / (std::string("style_") + style + ".jsonl"), stoplens::synth::style_variant(style));
    }
  } catch (const std::exception& e) {
    std::cerr << "gen_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
