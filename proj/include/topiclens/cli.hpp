#pragma once

namespace topiclens::cli {

/// Entry point for the `topiclens` binary. Returns 0 on success, 1 on
/// failure, 2 on a usage error.
int run(int argc, char** argv);

}  // namespace topiclens::cli
