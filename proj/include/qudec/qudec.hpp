// Copyright 2026 The qudec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#pragma once

#include "qudec/bloch_geometry.hpp"
#include "qudec/constraints.hpp"
#include "qudec/correlation.hpp"
#include "qudec/decompose.hpp"
#include "qudec/density_matrix.hpp"
#include "qudec/errors.hpp"
#include "qudec/parallel.hpp"
#include "qudec/random_states.hpp"
#include "qudec/serialization.hpp"
