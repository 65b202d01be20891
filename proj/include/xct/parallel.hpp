/* Copyright 2026 The XCT Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef XCT_PARALLEL_HPP_
#define XCT_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace xct {

// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks must
// write only to storage they own; callers index results by i so output is
// independent of the worker count. The first exception thrown by any task
// is rethrown after all threads join.
void ParallelFor(int workers, std::size_t count,
                 const std::function<void(std::size_t)>& task);

}  // namespace xct

#endif  // XCT_PARALLEL_HPP_
