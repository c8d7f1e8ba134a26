// Line-protocol scorer used by the subprocess adapter tests. Reads one JSON
// request per line on stdin and answers with one JSON reply per line. The
// first argument selects a behavior.

#include <json.hpp>

#include <chrono>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

using nlohmann::json;

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "echo";
  long long requests = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    ++requests;
    json request = json::parse(line, nullptr, false);
    if (request.is_discarded()) return 2;

    if (mode == "crash") return 1;
    if (mode == "slow") std::this_thread::sleep_for(std::chrono::seconds(30));
    if (mode == "garbage") {
      std::cout << "this is not json\n" << std::flush;
      continue;
    }
    if (mode == "badlen") {
      std::cout << R"({"tokens":["A","B"],"logprobs":[-0.1]})" << "\n" << std::flush;
      continue;
    }
    if (mode == "fixed") {
      std::cout << R"({"tokens":["A","B"],"logprobs":[-0.1,-2.4]})" << "\n" << std::flush;
      continue;
    }
    if (mode == "count") {
      json reply;
      reply["tokens"] = {"A", "B"};
      reply["logprobs"] = {0.0, -static_cast<double>(requests)};
      std::cout << reply.dump() << "\n" << std::flush;
      continue;
    }

    // echo: continue the source, then end.
    std::vector<std::string> src = request["src"].get<std::vector<std::string>>();
    if (!src.empty() && src.back() == "</s>") src.pop_back();
    std::vector<std::string> tgt = request["tgt"].get<std::vector<std::string>>();
    json reply;
    if (tgt.size() < src.size()) {
      reply["tokens"] = {src[tgt.size()], "</s>"};
      reply["logprobs"] = {-0.05, -3.0};
    } else {
      reply["tokens"] = {"</s>"};
      reply["logprobs"] = {0.0};
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
