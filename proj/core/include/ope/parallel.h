/*
 * Copyright 2026 The ope-shrink Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OPE_PARALLEL_H_
#define OPE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace ope {

// Runs body(0) ... body(count - 1) on up to `threads` workers. Each index
// must write only to its own output slot, so results do not depend on the
// schedule. If any call throws, the exception of the lowest failing index
// is rethrown after all workers stop.
void ParallelFor(size_t count, int threads,
                 const std::function<void(size_t)>& body);

// `requested` when positive, else OPE_SHRINK_THREADS when set to a
// positive integer, else 1.
int ResolveThreadCount(int requested);

}  // namespace ope

#endif  // OPE_PARALLEL_H_
