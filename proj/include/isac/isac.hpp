// SPDX-License-Identifier: Apache-2.0
//
// isac-waveforms: range-Doppler simulation of ISAC candidate radar waveforms
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "isac/common.hpp"
#include "isac/fft.hpp"
#include "isac/waveform.hpp"
#include "isac/scene.hpp"
#include "isac/rsp.hpp"
#include "isac/fxp.hpp"
#include "isac/bench.hpp"
#include "isac/config.hpp"
#include "isac/harness.hpp"
