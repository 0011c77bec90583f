// Copyright 2026 The discex Authors.
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

// Everything in one include.

#ifndef DISCEX_DISCEX_HPP_
#define DISCEX_DISCEX_HPP_

#include "discex/biodrb.hpp"
#include "discex/candidates.hpp"
#include "discex/classifier.hpp"
#include "discex/columns.hpp"
#include "discex/corpus.hpp"
#include "discex/distribution.hpp"
#include "discex/errors.hpp"
#include "discex/evaluation.hpp"
#include "discex/experiment.hpp"
#include "discex/inference.hpp"
#include "discex/ngram.hpp"
#include "discex/relation.hpp"
#include "discex/report.hpp"
#include "discex/scoring.hpp"
#include "discex/sense.hpp"
#include "discex/sidecar.hpp"
#include "discex/text.hpp"

#endif  // DISCEX_DISCEX_HPP_
