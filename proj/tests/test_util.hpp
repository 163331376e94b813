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


#ifndef AVNAV_TESTS_TEST_UTIL_HPP_
#define AVNAV_TESTS_TEST_UTIL_HPP_

#include <string>
#include <vector>

#include "avnav/gridworld.hpp"

namespace avnav::testing
{

inline std::string map_path(const std::string & name) { return std::string(AVNAV_MAPS_DIR) + "/" + name + ".map"; }

inline GridMap bundled(const std::string & name) { return load_map_file(map_path(name)); }

inline const std::vector<std::string> & apartment_maps()
{
  static const std::vector<std::string> names{"apt1", "apt2", "apt3", "apt4", "apt5"};
  return names;
}

inline const std::vector<std::string> & all_maps()
{
  static const std::vector<std::string> names{"apt1",   "apt2",   "apt3", "apt4", "apt5",
                                              "train1", "train2", "umap", "open"};
  return names;
}

}  // namespace avnav::testing

#endif  // AVNAV_TESTS_TEST_UTIL_HPP_
