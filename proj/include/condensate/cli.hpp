#pragma once

namespace condensate {

// Entry point of the condensate_lab tool. Exit codes: 0 ok, 1 config or usage error,
// 2 numeric failure, 3 failed acceptance checks.
int cli_main(int argc, char** argv);

}  // namespace condensate
