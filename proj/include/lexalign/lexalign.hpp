/*
 * Copyright 2026 The lexalign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEXALIGN_LEXALIGN_HPP_
#define LEXALIGN_LEXALIGN_HPP_

#include "lexalign/alignment.hpp"
#include "lexalign/data_model.hpp"
#include "lexalign/error.hpp"
#include "lexalign/gbt.hpp"
#include "lexalign/metrics.hpp"
#include "lexalign/regression.hpp"
#include "lexalign/rng.hpp"
#include "lexalign/shap.hpp"
#include "lexalign/simulation.hpp"
#include "lexalign/stats.hpp"
#include "lexalign/synthetic.hpp"

#endif  // LEXALIGN_LEXALIGN_HPP_
