// Copyright 2026 The ergolab Authors
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

#pragma once

#include "ergolab/core.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/state.hpp"
#include "ergolab/entropy.hpp"
#include "ergolab/hamiltonian.hpp"
#include "ergolab/ensemble.hpp"
#include "ergolab/ergodicity.hpp"
#include "ergolab/constructions.hpp"
#include "ergolab/rates.hpp"
#include "ergolab/tensor_network.hpp"
#include "ergolab/io.hpp"
#include "ergolab/experiments.hpp"
