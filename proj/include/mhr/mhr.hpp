/*
Copyright (c) 2026 The mhr Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "mhr/bench.hpp"
#include "mhr/concurrent_map.hpp"
#include "mhr/error.hpp"
#include "mhr/format.hpp"
#include "mhr/generator.hpp"
#include "mhr/generic.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/oracle.hpp"
#include "mhr/parallel.hpp"
#include "mhr/pipeline.hpp"
#include "mhr/scoring.hpp"
#include "mhr/topk.hpp"
#include "mhr/types.hpp"
