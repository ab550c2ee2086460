// Copyright 2026 The Repgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Scripted bridge backend for the transport tests.
//   fake_bridge_server offer <price>
//   fake_bridge_server flaky <bad_replies>
//   fake_bridge_server garbage
//   fake_bridge_server no_index
//   fake_bridge_server slow_once <marker_file>
//   fake_bridge_server exit
//   fake_bridge_server record <log_file>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

namespace {

std::string Offer(int price) {
  return R"({"proposal":{"kind":"offer","price":)" + std::to_string(price) +
         R"(},"message":"neutral","chosen_index":2,"thoughts":""})";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: fake_bridge_server <mode> [arg]\n";
    return 2;
  }
  const std::string mode = argv[1];
  const std::string arg = argc > 2 ? argv[2] : "";
  int served = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    ++served;
    std::string reply = Offer(50);
    if (mode == "offer") {
      reply = Offer(std::atoi(arg.c_str()));
    } else if (mode == "flaky") {
      if (served <= std::atoi(arg.c_str())) reply = Offer(1000);
    } else if (mode == "garbage") {
      reply = "not json";
    } else if (mode == "no_index") {
      reply = R"({"thoughts":"none"})";
    } else if (mode == "slow_once") {
      if (!std::filesystem::exists(arg)) {
        std::ofstream(arg) << "slept\n";
        std::this_thread::sleep_for(std::chrono::seconds(3));
      }
    } else if (mode == "exit") {
      return 0;
    } else if (mode == "record") {
      std::ofstream(arg, std::ios::app) << line << '\n';
    }
    std::cout << reply << '\n' << std::flush;
  }
  return 0;
}
