// Copyright (c) 2026 the IDDM authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace iddm {

/// Runs body(i) for i in [0, count) across up to `threads` workers. Each index
/// is claimed atomically, so the body must write only to index-owned storage;
/// callers keep determinism by reducing results in index order afterwards.
/// threads <= 1 runs inline.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Resolves a requested thread count: 0 means "use IDDM_THREADS or 1".
int resolve_threads(int requested);

}  // namespace iddm
