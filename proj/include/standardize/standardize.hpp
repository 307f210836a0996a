// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "standardize/artifacts.hpp"
#include "standardize/backend.hpp"
#include "standardize/distance.hpp"
#include "standardize/error.hpp"
#include "standardize/evaluation.hpp"
#include "standardize/external_classifier.hpp"
#include "standardize/gold_profile.hpp"
#include "standardize/http_backend.hpp"
#include "standardize/mock_backend.hpp"
#include "standardize/orchestrator.hpp"
#include "standardize/spec_extractor.hpp"
#include "standardize/standards.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"
