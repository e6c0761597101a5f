// Copyright 2026 The csg-solver Authors
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

#ifndef CSG_CSG_HPP
#define CSG_CSG_HPP

#include "csg/bnb.hpp"
#include "csg/coalition.hpp"
#include "csg/instance.hpp"
#include "csg/linearize.hpp"
#include "csg/master.hpp"
#include "csg/oracle.hpp"
#include "csg/pricing.hpp"
#include "csg/report.hpp"
#include "csg/simplex.hpp"
#include "csg/util.hpp"
#include "csg/valuation.hpp"

#endif  // CSG_CSG_HPP
