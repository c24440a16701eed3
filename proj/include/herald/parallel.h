// Copyright 2026 The Herald Authors
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


#ifndef HERALD_PARALLEL_H
#define HERALD_PARALLEL_H

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace herald {

/// Worker count: HERALD_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_budget() {
    if (const char *env = std::getenv("HERALD_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception &) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates f(0), ..., f(n-1) on up to `threads` workers and returns the
/// results in index order. If any call throws, the exception of the lowest
/// failing index is rethrown after all workers finish.
template <typename F>
auto parallel_map(size_t n, F f, unsigned threads = thread_budget()) {
    using R = decltype(f(size_t{0}));
    std::vector<R> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < n; i = next++) {
            try {
                results[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = static_cast<unsigned>(std::min<size_t>(std::max(1u, threads), n));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < count; k++) {
            pool.emplace_back(worker);
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

}  // namespace herald

#endif
