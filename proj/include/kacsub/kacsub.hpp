#pragma once

// Umbrella header.

#include "kacsub/errors.hpp"
#include "kacsub/linalg.hpp"
#include "kacsub/legs.hpp"
#include "kacsub/report.hpp"
#include "kacsub/algebra.hpp"
#include "kacsub/algcore.hpp"
#include "kacsub/group.hpp"
#include "kacsub/kac.hpp"
#include "kacsub/coaction_map.hpp"
#include "kacsub/corep.hpp"
#include "kacsub/coaction.hpp"
#include "kacsub/tower.hpp"
#include "kacsub/invariant.hpp"
