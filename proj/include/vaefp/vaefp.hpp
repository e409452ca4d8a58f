// SPDX-License-Identifier: Apache-2.0
/*
Copyright (C) 2026 The vaefp Authors.

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

#include "error.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"
#include "trace.hpp"
#include "workload.hpp"
#include "summarizer.hpp"
#include "normalization.hpp"
#include "vae.hpp"
#include "optimizer.hpp"
#include "training.hpp"
#include "stability.hpp"
#include "model_io.hpp"
#include "sink.hpp"
#include "publisher.hpp"
#include "pipeline.hpp"
