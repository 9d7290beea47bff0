//
// Copyright 2026 The ShuffleDP Authors
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
//

#ifndef SHUFFLEDP_SHUFFLEDP_H_
#define SHUFFLEDP_SHUFFLEDP_H_

#include "shuffledp/base_sum.h"
#include "shuffledp/baselines.h"
#include "shuffledp/budget.h"
#include "shuffledp/dataset.h"
#include "shuffledp/errors.h"
#include "shuffledp/experiment.h"
#include "shuffledp/high_dim.h"
#include "shuffledp/message.h"
#include "shuffledp/noise.h"
#include "shuffledp/rng.h"
#include "shuffledp/shuffler.h"
#include "shuffledp/sparse_vec.h"
#include "shuffledp/sum_dp.h"

#endif  // SHUFFLEDP_SHUFFLEDP_H_
