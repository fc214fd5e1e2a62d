// Copyright 2026 The topoff Authors
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

#include "topoff/anyon.hpp"
#include "topoff/circuit.hpp"
#include "topoff/clifford1q.hpp"
#include "topoff/estimators.hpp"
#include "topoff/gf2.hpp"
#include "topoff/lattice.hpp"
#include "topoff/noise.hpp"
#include "topoff/pauli.hpp"
#include "topoff/prep.hpp"
#include "topoff/rng.hpp"
#include "topoff/tableau.hpp"
