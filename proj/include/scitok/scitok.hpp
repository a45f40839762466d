// Copyright 2026 The scitok Authors
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


#pragma once

#include "scitok/bpe.hpp"
#include "scitok/codec.hpp"
#include "scitok/detector.hpp"
#include "scitok/error.hpp"
#include "scitok/metrics.hpp"
#include "scitok/modality.hpp"
#include "scitok/packer.hpp"
#include "scitok/smiles.hpp"
#include "scitok/utf8.hpp"
#include "scitok/vocab.hpp"
