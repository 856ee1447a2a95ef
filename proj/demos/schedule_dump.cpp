/*
 * Copyright (C) 2026 The Promist Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Prints the derived blur schedule of every stock configuration at a chosen
// image width, handy for eyeballing how density and focal length move the
// sigma/weight table.
//
//   ./schedule_dump [width]

#include <cstdlib>
#include <iostream>

#include <promist/filter.hpp>

int main(int argc, char** argv) {
    const int width = argc > 1 ? std::atoi(argv[1]) : 1024;
    for (const promist::FilterConfig& cfg : promist::default_configs()) {
        const promist::BlurStack stack = promist::derive_params(cfg, width);
        std::cout << promist::label(cfg) << " (alpha " << stack.alpha << ")\n";
        for (const promist::BlurLayer& l : stack.layers)
            std::cout << "  sigma " << l.sigma << "  weight " << l.weight << "\n";
    }
    return 0;
}
