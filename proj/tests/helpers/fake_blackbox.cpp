// Child process for the external black-box protocol tests.
//   fake_blackbox [sign|garbage|silent|exit]
// "sign" answers 1 iff the first feature is positive.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

int main(int argc, char** argv)
{
    const std::string mode = argc > 1 ? argv[1] : "sign";
    std::ios::sync_with_stdio(false);
    std::string line;
    for (;;) {
        if (!std::getline(std::cin, line)) {
            return 0;
        }
        if (line.rfind("f0", 0) != 0) {
            std::cerr << "fake_blackbox: expected header, got '" << line << "'\n";
            return 3;
        }
        if (mode == "exit") {
            return 0;
        }
        std::vector<std::string> rows;
        while (std::getline(std::cin, line) && !line.empty()) {
            rows.push_back(line);
        }
        if (mode == "silent") {
            std::this_thread::sleep_for(std::chrono::seconds(60));
            return 0;
        }
        for (const auto& r : rows) {
            if (mode == "garbage") {
                std::cout << "maybe\n";
            } else {
                std::cout << (std::strtod(r.c_str(), nullptr) > 0.0 ? "1" : "0") << "\n";
            }
        }
        std::cout.flush();
    }
}
