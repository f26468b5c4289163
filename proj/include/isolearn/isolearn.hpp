// Copyright 2026 The isolearn Authors.
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


#ifndef ISOLEARN_ISOLEARN_HPP
#define ISOLEARN_ISOLEARN_HPP

#include "isolearn/config.hpp"
#include "isolearn/error.hpp"
#include "isolearn/game.hpp"
#include "isolearn/game_io.hpp"
#include "isolearn/generators.hpp"
#include "isolearn/harness.hpp"
#include "isolearn/learning.hpp"
#include "isolearn/metrics.hpp"
#include "isolearn/prediction.hpp"

#endif  // ISOLEARN_ISOLEARN_HPP
