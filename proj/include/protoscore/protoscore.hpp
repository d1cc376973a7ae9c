// Copyright 2026 The protoscore Authors.
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

// Umbrella header.

#ifndef PROTOSCORE_PROTOSCORE_HPP_
#define PROTOSCORE_PROTOSCORE_HPP_

#include "protoscore/advantages.hpp"
#include "protoscore/alignment.hpp"
#include "protoscore/corpus.hpp"
#include "protoscore/gates.hpp"
#include "protoscore/metrics.hpp"
#include "protoscore/parser.hpp"
#include "protoscore/score.hpp"
#include "protoscore/scoring.hpp"
#include "protoscore/service.hpp"
#include "protoscore/text.hpp"
#include "protoscore/types.hpp"

#endif  // PROTOSCORE_PROTOSCORE_HPP_
