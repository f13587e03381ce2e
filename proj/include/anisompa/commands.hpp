#pragma once

#include <string>
#include <vector>

namespace anisompa {

// Exit codes shared with the CLI: 0 success / all hypotheses pass,
// 1 hypothesis failure or computational failure, 2 origin-integrability
// failure in `conjugate`, 3 iteration budget exhausted, 4 collapse to zero,
// 64 bad input (grammar, unknown keys, invariant violations, missing files).
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitIntegrability = 2;
inline constexpr int kExitMaxIter = 3;
inline constexpr int kExitDegenerate = 4;
inline constexpr int kExitUsage = 64;

struct RunConfig {
    std::string input_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    bool force = false;
};

int cmd_conjugate(const RunConfig& rc);
int cmd_audit(const RunConfig& rc);
int cmd_solve(const RunConfig& rc);
int cmd_diagnose(const RunConfig& rc);

} // namespace anisompa
