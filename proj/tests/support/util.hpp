#pragma once

// Process and file helpers shared by the CLI-facing tests.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>

namespace support {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
};

// Runs the installed CLI from the repository root, so file paths in reports
// stay exactly as passed on the command line.
inline CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string("cd '") + IVDL_REPO_ROOT + "' && '" + IVDL_CLI_PATH + "' " +
                      args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) throw std::runtime_error("popen failed for: " + cmd);
    CliResult res;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) res.out.append(buf, n);
    int st = pclose(p);
    res.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return res;
}

inline std::string sample(const std::string& name) {
    return std::string(IVDL_SAMPLES_DIR) + "/" + name;
}

inline std::string golden(const std::string& name) {
    return std::string(IVDL_GOLDEN_DIR) + "/" + name;
}

} // namespace support
