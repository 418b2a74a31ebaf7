/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

// Everything except the WebSocket server, which needs Boost (hrcsim/ui_server.hpp).

#include "hrcsim/config.hpp"
#include "hrcsim/errors.hpp"
#include "hrcsim/events.hpp"
#include "hrcsim/geometry.hpp"
#include "hrcsim/hsm.hpp"
#include "hrcsim/intent.hpp"
#include "hrcsim/io.hpp"
#include "hrcsim/kernel.hpp"
#include "hrcsim/metrics.hpp"
#include "hrcsim/perception.hpp"
#include "hrcsim/pick_place.hpp"
#include "hrcsim/planner.hpp"
#include "hrcsim/random.hpp"
#include "hrcsim/scenario.hpp"
#include "hrcsim/serialization.hpp"
#include "hrcsim/ui_protocol.hpp"
#include "hrcsim/world.hpp"
