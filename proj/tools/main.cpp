// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

int main() {
    std::puts("relit: subcommands land here as modules come online");
    return 0;
}
