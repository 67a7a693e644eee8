// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cieig/contour.hpp"
#include "cieig/eig.hpp"
#include "cieig/errors.hpp"
#include "cieig/forge.hpp"
#include "cieig/harness.hpp"
#include "cieig/lu.hpp"
#include "cieig/matrix.hpp"
#include "cieig/moments.hpp"
#include "cieig/pencil.hpp"
#include "cieig/qr.hpp"
#include "cieig/solvers.hpp"
#include "cieig/svd.hpp"
#include "cieig/verify.hpp"
