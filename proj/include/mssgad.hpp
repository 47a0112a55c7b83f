/*
 * Copyright 2026 The MssGAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "mssgad/anomaly_aware.hpp"
#include "mssgad/config.hpp"
#include "mssgad/encoder.hpp"
#include "mssgad/error.hpp"
#include "mssgad/evaluation.hpp"
#include "mssgad/gradcheck.hpp"
#include "mssgad/gradcheck_suite.hpp"
#include "mssgad/graph.hpp"
#include "mssgad/metrics.hpp"
#include "mssgad/model_io.hpp"
#include "mssgad/ops.hpp"
#include "mssgad/optim.hpp"
#include "mssgad/rng.hpp"
#include "mssgad/scorer.hpp"
#include "mssgad/synth.hpp"
#include "mssgad/tape.hpp"
#include "mssgad/trainer.hpp"
#include "mssgad/tudataset.hpp"
#include "mssgad/version.hpp"
