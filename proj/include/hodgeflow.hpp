// Copyright 2026 The hodgeflow Authors.
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

#ifndef HODGEFLOW_HODGEFLOW_HPP_
#define HODGEFLOW_HODGEFLOW_HPP_

#include "hodgeflow/common.hpp"
#include "hodgeflow/community.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/ingest.hpp"
#include "hodgeflow/netbuild.hpp"
#include "hodgeflow/rank.hpp"
#include "hodgeflow/report.hpp"

#endif  // HODGEFLOW_HODGEFLOW_HPP_
