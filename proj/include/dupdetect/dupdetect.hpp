// Copyright 2026 The dupdetect authors
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

// Umbrella header: the whole duplicate-question pipeline. The remote
// provider (remote.hpp) is not pulled in here because it drags along an
// HTTP client; include it explicitly where needed.

#pragma once

#include "dupdetect/binio.hpp"
#include "dupdetect/census.hpp"
#include "dupdetect/clean.hpp"
#include "dupdetect/corpus.hpp"
#include "dupdetect/embedding.hpp"
#include "dupdetect/error.hpp"
#include "dupdetect/gradient.hpp"
#include "dupdetect/index.hpp"
#include "dupdetect/loss.hpp"
#include "dupdetect/metrics.hpp"
#include "dupdetect/projection.hpp"
#include "dupdetect/rng.hpp"
#include "dupdetect/sampler.hpp"
#include "dupdetect/split.hpp"
#include "dupdetect/train.hpp"
#include "dupdetect/util.hpp"
