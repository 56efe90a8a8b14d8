// Copyright 2026 The isolab Authors
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

/// @file isolab.hpp
/// @brief Umbrella header for the numerical modules (no JSON or OpenSSL).

#pragma once

#include "algebra.hpp"
#include "cbnorm.hpp"
#include "decompose.hpp"
#include "envelope.hpp"
#include "errors.hpp"
#include "gen.hpp"
#include "holsztynski.hpp"
#include "linmap.hpp"
#include "nicex.hpp"
#include "numeric.hpp"
#include "report.hpp"
