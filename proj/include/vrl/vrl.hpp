// Copyright 2026 The VRL Authors. All Rights Reserved.
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

// Umbrella header for the library.

#pragma once

#include "vrl/action_graph.hpp"
#include "vrl/agent.hpp"
#include "vrl/binary_io.hpp"
#include "vrl/common.hpp"
#include "vrl/eval.hpp"
#include "vrl/experiment.hpp"
#include "vrl/features.hpp"
#include "vrl/qnetwork.hpp"
#include "vrl/scene.hpp"
#include "vrl/scene_io.hpp"
#include "vrl/synthetic.hpp"
#include "vrl/traversal.hpp"
