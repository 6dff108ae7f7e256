// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "snapnet/classify.hpp"
#include "snapnet/core.hpp"
#include "snapnet/dh.hpp"
#include "snapnet/dualquat.hpp"
#include "snapnet/io.hpp"
#include "snapnet/koenigs.hpp"
#include "snapnet/line_axis.hpp"
#include "snapnet/quadnet.hpp"
#include "snapnet/rolling.hpp"
#include "snapnet/rotation3.hpp"
#include "snapnet/studynet.hpp"
