// Copyright 2026 The fdrpred Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <malloc.h>

#include <cerrno>
#include <cstddef>
#include <cstring>

#include "fdr/alloc_stats.hpp"

// Interposes the malloc family for the whole executable so that Eigen's
// aligned buffers are counted alongside operator new. Forwards to glibc's
// exported __libc_* entry points; accounting uses malloc_usable_size on both
// sides so every release matches its allocation.

extern "C" {
void* __libc_malloc(std::size_t);
void* __libc_calloc(std::size_t, std::size_t);
void* __libc_realloc(void*, std::size_t);
void* __libc_memalign(std::size_t, std::size_t);
void __libc_free(void*);
}

namespace {

struct Activate {
  Activate() { fdr::alloc::mark_active(); }
} g_activate;

inline void* track(void* p) {
  if (p) fdr::alloc::on_allocate(malloc_usable_size(p));
  return p;
}

}  // namespace

extern "C" {

void* malloc(std::size_t n) { return track(__libc_malloc(n)); }

void* calloc(std::size_t count, std::size_t n) { return track(__libc_calloc(count, n)); }

void free(void* p) {
  if (!p) return;
  fdr::alloc::on_release(malloc_usable_size(p));
  __libc_free(p);
}

void* realloc(void* p, std::size_t n) {
  std::size_t old = p ? malloc_usable_size(p) : 0;
  void* q = __libc_realloc(p, n);
  if (q || n == 0) {
    if (p) fdr::alloc::on_release(old);
    if (q) fdr::alloc::on_allocate(malloc_usable_size(q));
  }
  return q;
}

void* memalign(std::size_t alignment, std::size_t n) { return track(__libc_memalign(alignment, n)); }

void* aligned_alloc(std::size_t alignment, std::size_t n) { return track(__libc_memalign(alignment, n)); }

int posix_memalign(void** out, std::size_t alignment, std::size_t n) {
  if (alignment % sizeof(void*) != 0 || (alignment & (alignment - 1)) != 0) return EINVAL;
  void* p = track(__libc_memalign(alignment, n));
  if (!p) return ENOMEM;
  *out = p;
  return 0;
}

}  // extern "C"
