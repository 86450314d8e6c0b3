// Copyright 2026 The asmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "asmpc/config.hpp"
#include "asmpc/costs.hpp"
#include "asmpc/dealer.hpp"
#include "asmpc/engine.hpp"
#include "asmpc/error.hpp"
#include "asmpc/local.hpp"
#include "asmpc/numeric.hpp"
#include "asmpc/oracle.hpp"
#include "asmpc/program.hpp"
#include "asmpc/protocols.hpp"
#include "asmpc/sharing.hpp"
#include "asmpc/tcp.hpp"
#include "asmpc/transport.hpp"
