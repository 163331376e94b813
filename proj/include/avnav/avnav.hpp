// Copyright 2026 The avnav Authors
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


#ifndef AVNAV_AVNAV_HPP_
#define AVNAV_AVNAV_HPP_

#include "avnav/acoustics.hpp"
#include "avnav/agent.hpp"
#include "avnav/gridworld.hpp"
#include "avnav/harness.hpp"
#include "avnav/occmap.hpp"
#include "avnav/planner.hpp"
#include "avnav/rng.hpp"
#include "avnav/vismem.hpp"

#endif  // AVNAV_AVNAV_HPP_
